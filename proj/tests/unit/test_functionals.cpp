#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "upasim/errors.hpp"
#include "upasim/functionals.hpp"

using namespace upasim;
using namespace upasim::test;

namespace {

FieldHistory linear_history(const Grid& g, int samples, double dt) {
  FieldHistory h(g, {Species::C});
  const Field f = sample(g, [](const Point& x) { return x[0]; });
  for (int m = 0; m < samples; ++m) h.append(m * dt, std::span<const Field>(&f, 1));
  return h;
}

}  // namespace

TEST_CASE("Lp norms") {
  const Grid g = grid1(4);
  const Field f(g, std::vector<double>{1.0, -2.0, 3.0, -4.0});
  CHECK(lp_norm(f, 1) == doctest::Approx(10.0 * 0.25));
  CHECK(lp_norm(f, 2) == doctest::Approx(std::sqrt(30.0 * 0.25)));
  CHECK(lp_norm(f, 3) == doctest::Approx(std::cbrt(100.0 * 0.25)));
  CHECK(lp_norm(f, kInfinityNorm) == 4.0);
  CHECK_THROWS_AS(lp_norm(f, 1.5), DiagnosticError);
}

TEST_CASE("gradient norm of a linear field") {
  const Grid g = grid2(8, 4);
  const Field f = sample(g, [](const Point& x) { return 2.0 * x[0]; });
  // 7 interior faces per row of 4, gradient 2, weight cell volume.
  CHECK(gradient_l2_squared(f) == doctest::Approx(4.0 * 7 * 4 * g.cell_volume()));
}

TEST_CASE("field history bookkeeping") {
  const Grid g = grid1(8);
  FieldHistory h = linear_history(g, 5, 0.1);
  CHECK(h.samples() == 5);
  CHECK(h.tracks(Species::C));
  CHECK_FALSE(h.tracks(Species::N));
  CHECK_THROWS_AS(h.values(Species::N, 0), DiagnosticError);
  CHECK(h.uniform_step() == doctest::Approx(0.1));
  CHECK(h.thinned(2).samples() == 3);
  const Field f(g);
  CHECK_THROWS(h.append(0.3, std::span<const Field>(&f, 1)));  // times must increase
}

TEST_CASE("V2 norm of a stationary linear field") {
  const Grid g = grid1(10);
  const FieldHistory h = linear_history(g, 3, 0.5);
  const Field f = sample(g, [](const Point& x) { return x[0]; });
  const double expected = lp_norm(f, 2) + std::sqrt(1.0 * gradient_l2_squared(f));
  CHECK(v2_norm(h, Species::C) == doctest::Approx(expected).epsilon(1e-14));
  // 9 interior faces of unit gradient, weight h = 0.1.
  CHECK(gradient_l2_squared(f) == doctest::Approx(0.9));
}

TEST_CASE("space-time L2 uses the Campanato weights") {
  const Grid g = grid1(4);
  FieldHistory h(g, {Species::C});
  const Field f(g, 2.0);
  for (int m = 0; m < 3; ++m) h.append(0.25 * m, std::span<const Field>(&f, 1));
  CHECK(space_time_l2_squared(h, Species::C) == doctest::Approx(4.0 * 4 * 0.25 * 3 * 0.25));
}

TEST_CASE("Campanato seminorm of hand-checked data") {
  const Grid g = grid1(4);
  FieldHistory h(g, {Species::C});
  const Field f(g, std::vector<double>{0.0, 1.0, 0.0, 1.0});
  h.append(0.0, std::span<const Field>(&f, 1));
  h.append(1.0, std::span<const Field>(&f, 1));
  // r = 0.3 > h: ball {k-1, k, k+1}; r^2 < dt, so one time level.
  // Interior cell 1: {0, 1, 0}, mean 1/3, dev 2/3. Cell 2: {1, 0, 1}, same.
  const double r = 0.3;
  const double expected = std::pow(r, -1.0) * (2.0 / 3.0) * (0.25 * 1.0);
  CHECK(campanato_seminorm(h, Species::C, 1.0, std::vector<double>{r}) == doctest::Approx(expected));
  CHECK_THROWS_AS(campanato_seminorm(h, Species::C, 1.0, std::vector<double>{0.1}), DiagnosticError);
  CHECK_THROWS_AS(campanato_seminorm(h, Species::C, 1.0, std::vector<double>{}), DiagnosticError);
}

TEST_CASE("Hoelder seminorm of hand-checked data") {
  const Grid g = grid1(4);
  FieldHistory h(g, {Species::C});
  const Field f(g, std::vector<double>{0.0, 1.0, 1.0, 1.0});
  h.append(0.0, std::span<const Field>(&f, 1));
  // The steepest pair is (0, 1): |1 - 0| / 0.25^0.5.
  CHECK(holder_seminorm(h, Species::C, 0.5) == doctest::Approx(2.0));
  CHECK_THROWS_AS(holder_seminorm(h, Species::C, 1.5), DiagnosticError);
}

TEST_CASE("functional series records margins") {
  const Grid g = grid1(4);
  BoundCertificates c;
  c.max_uA = 1.0;
  FunctionalSeries s(c);
  s.record(StateFields::uniform(g, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}));
  s.record(StateFields::uniform(g, {0.1, 0.2, 0.3, 0.5, 0.5, 0.6}, 0.1));
  CHECK(s.size() == 2);
  CHECK(s.back().margin_A == doctest::Approx(0.5));
  CHECK(std::isnan(s.back().margin_V));
  CHECK(s.back().l1[index_of(Species::A)] == doctest::Approx(0.5));
  CHECK(s.back().sup_l2[index_of(Species::A)] == doctest::Approx(0.5));
  CHECK(s.back().grad_l2sq[0] == 0.0);
}
