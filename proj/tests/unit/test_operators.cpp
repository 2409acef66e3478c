#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "upasim/errors.hpp"
#include "upasim/operators.hpp"
#include "upasim/verification.hpp"

using namespace upasim;
using namespace upasim::test;

TEST_CASE("face gradient is zero on boundary faces") {
  const Grid g = grid1(5);
  const Field u = sample(g, [](const Point& x) { return x[0] * x[0]; });
  const FaceGradient gr = face_gradient(u);
  CHECK(gr.axis[0][4] == 0.0);
  CHECK(gr.axis[0][0] == doctest::Approx((u[1] - u[0]) / 0.2));
}

TEST_CASE("diffusion_apply agrees with the assembled matrix") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.1, 2.0);
  for (const Grid& g : {grid1(17), grid2(6, 9), grid3(5)}) {
    std::vector<double> d(g.size());
    Field u(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      d[k] = U(rng);
      u[k] = U(rng);
    }
    const Field a = diffusion_apply(u, d);
    const OperatorMatrix m = assemble_diffusion_matrix(d, g);
    const Eigen::Map<const Eigen::VectorXd> uv(u.values.data(), static_cast<Eigen::Index>(u.size()));
    const Eigen::VectorXd mu = m.matrix * uv;
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(a[k] == doctest::Approx(mu[static_cast<Eigen::Index>(k)]).epsilon(1e-12));
    CHECK(compare_with_oracle(m.matrix, matrix_oracle(g, d)).empty());
  }
}

TEST_CASE("diffusion annihilates constants and is second order on smooth data") {
  const Grid g = grid1(64);
  const auto d = DiffusionCoefficient::constant(0.5);
  for (double v : diffusion_apply(Field(g, 3.0), d, 0.0).values) CHECK(std::abs(v) < 1e-12);
  double prev = 0.0;
  for (int n : {32, 64, 128}) {
    const Grid gn = grid1(n);
    const Field u = sample(gn, [](const Point& x) { return std::cos(std::numbers::pi * x[0]); });
    const Field lap = diffusion_apply(u, DiffusionCoefficient::constant(1.0), 0.0);
    double err = 0.0;
    for (std::size_t k = 0; k < gn.size(); ++k)
      err = std::max(err, std::abs(lap[k] + std::numbers::pi * std::numbers::pi * u[k]));
    if (prev > 0.0) CHECK(std::log2(prev / err) > 1.9);
    prev = err;
  }
}

TEST_CASE("harmonic face diffusivity") {
  CHECK(harmonic_mean(1.0, 3.0) == doctest::Approx(1.5));
  const Grid g = grid1(3);
  const std::vector<double> d{1.0, 3.0, 3.0};
  const OperatorMatrix m = assemble_diffusion_matrix(d, g);
  const double h2 = g.spacing()[0] * g.spacing()[0];
  CHECK(m.matrix.coeff(0, 1) == doctest::Approx(1.5 / h2));
  CHECK(m.matrix.coeff(0, 0) == doctest::Approx(-1.5 / h2));
  CHECK(m.symmetric);
}

TEST_CASE("face carrier") {
  CHECK(face_carrier(0.2, 0.6, 1.0, TaxisScheme::central) == doctest::Approx(0.4));
  CHECK(face_carrier(0.2, 0.6, 1.0, TaxisScheme::upwind) == 0.2);
  CHECK(face_carrier(0.2, 0.6, -1.0, TaxisScheme::upwind) == 0.6);
  CHECK(face_carrier(1.4, 1.8, 1.0, TaxisScheme::central) == 1.0);
  CHECK(face_carrier(-0.5, -0.1, 1.0, TaxisScheme::upwind) == 0.0);
}

TEST_CASE("taxis divergence") {
  const Grid g = grid1(8);
  const Field c(g, 0.5);
  SUBCASE("vanishes without drift") {
    for (double v : taxis_divergence(c, FaceField(g)).values) CHECK(v == 0.0);
  }
  SUBCASE("uniform drift moves mass between interior cells only") {
    FaceField w(g);
    for (std::size_t k = 0; k + 1 < g.size(); ++k) w.axis[0][k] = 1.0;
    const Field div = taxis_divergence(c, w);
    const double h = g.spacing()[0];
    CHECK(div[0] == doctest::Approx(0.5 / h));
    CHECK(div[7] == doctest::Approx(-0.5 / h));
    for (std::size_t k = 1; k < 7; ++k) CHECK(std::abs(div[k]) < 1e-12);
  }
  SUBCASE("grid mismatch") {
    CHECK_THROWS_AS(taxis_divergence(c, FaceField(grid1(9))), ShapeError);
  }
}
