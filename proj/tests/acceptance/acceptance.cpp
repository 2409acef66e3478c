// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: upasim_acceptance [criterion numbers...]

#include <unistd.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "upasim/errors.hpp"
#include "upasim/functionals.hpp"
#include "upasim/grid.hpp"
#include "upasim/io/config.hpp"
#include "upasim/io/run_directory.hpp"
#include "upasim/io/snapshot.hpp"
#include "upasim/model.hpp"
#include "upasim/monitors.hpp"
#include "upasim/operators.hpp"
#include "upasim/parallel.hpp"
#include "upasim/run.hpp"
#include "upasim/stepper.hpp"
#include "upasim/summation.hpp"
#include "upasim/verification.hpp"

namespace fs = std::filesystem;
using namespace upasim;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

fs::path config_path(const char* name) { return fs::path(UPASIM_CONFIG_DIR) / name; }

double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

Grid random_grid(std::mt19937_64& rng, std::size_t max_cells) {
  std::uniform_int_distribution<int> dim_dist(1, 3);
  std::uniform_real_distribution<double> ext(0.5, 3.0);
  const int dim = dim_dist(rng);
  const int per_axis = std::max(3, static_cast<int>(std::floor(std::pow(static_cast<double>(max_cells), 1.0 / dim))));
  std::uniform_int_distribution<int> n(3, per_axis);
  std::vector<double> e;
  std::vector<int> c;
  for (int a = 0; a < dim; ++a) {
    e.push_back(ext(rng));
    c.push_back(n(rng));
  }
  return Grid::make(dim, e, c);
}

// ---------------------------------------------------------------------------
// Reference runs, shared by several criteria

struct Probe : OutputSink {
  const ModelParams* params = nullptr;
  TaxisScheme scheme = TaxisScheme::central;
  WeakResidualAccumulator* weak = nullptr;
  bool check_unit_test_function = false;

  StateFields prev;
  double min_value = kInf;
  double max_boundary = 0.0;
  double max_ratio_A = 0.0, max_ratio_V = 0.0;
  std::optional<double> M_A, M_V;
  std::vector<double> l1_residuals;
  double max_unit_mismatch = 0.0;

  void observe(const StateFields& s) {
    for (const Field& f : s.fields) min_value = std::min(min_value, *std::min_element(f.values.begin(), f.values.end()));
    for (double d : boundary_normal_difference(s[Species::V])) max_boundary = std::max(max_boundary, std::abs(d));
    const auto& a = s[Species::A].values;
    const auto& v = s[Species::V].values;
    if (M_A) max_ratio_A = std::max(max_ratio_A, *std::max_element(a.begin(), a.end()) / *M_A);
    if (M_V) max_ratio_V = std::max(max_ratio_V, *std::max_element(v.begin(), v.end()) / *M_V);
  }
  void begin(const StateFields& s) override {
    prev = s;
    if (weak) weak->add(s);
    observe(s);
  }
  void on_step(long, const StateFields& s, const StepReport& r) override {
    const double monitor = l1_identity_residual(prev, s, *params, r.dt_used);
    l1_residuals.push_back(monitor);
    if (check_unit_test_function) {
      WeakResidualAccumulator one(s.grid(), *params, scheme, prev.t, s.t, {TestFunction{{0, 0, 0}, 0}}, true);
      one.add(prev);
      one.add(s);
      const double weak_form = one.residuals()[0][index_of(Species::N)] / r.dt_used;
      max_unit_mismatch = std::max(max_unit_mismatch, std::abs(std::abs(weak_form) - monitor));
    }
    if (weak) weak->add(s);
    observe(s);
    prev = s;
  }
};

struct ReferenceRun {
  io::RunConfig config;
  RunResult result;
  Probe probe;
  std::array<double, 6> weak_max{};
};

ReferenceRun run_config(io::RunConfig c, bool with_weak, bool unit_check) {
  c.certificates = validate(c.params, io::make_initial_fields(c), c.regime);
  ReferenceRun out;
  out.config = c;
  const StateFields initial(io::make_initial_fields(c), 0.0);
  const TimeWindow window(c.t_end, c.dt);
  RunOptions options;
  options.scheme = c.scheme;
  options.monitors = c.monitors;
  std::optional<WeakResidualAccumulator> weak;
  if (with_weak)
    weak.emplace(initial.grid(), c.params, c.scheme.taxis, 0.0, c.t_end, default_test_bank(initial.grid()));
  out.probe.params = &out.config.params;
  out.probe.scheme = c.scheme.taxis;
  out.probe.weak = weak ? &*weak : nullptr;
  out.probe.check_unit_test_function = unit_check;
  out.probe.M_A = c.certificates.max_uA;
  out.probe.M_V = c.certificates.max_uV;
  OutputSink* sinks[] = {&out.probe};
  out.result = run(initial, c.params, c.certificates, window, options, sinks);
  out.probe.weak = nullptr;
  if (weak) out.weak_max = weak->max_abs();
  return out;
}

io::RunConfig reference_config() { return io::load_config(config_path("reference_strict.ini")); }

io::RunConfig refined(io::RunConfig c) {
  for (int a = 0; a < c.grid.dim; ++a) c.grid.cells[static_cast<std::size_t>(a)] *= 2;
  c.dt /= 2.0;
  return c;
}

const ReferenceRun& reference() {
  static const ReferenceRun r = run_config(reference_config(), true, true);
  return r;
}

const ReferenceRun& reference_refined() {
  static const ReferenceRun r = run_config(refined(reference_config()), true, false);
  return r;
}

const ReferenceRun& reference_half_dt() {
  static const ReferenceRun r = [] {
    io::RunConfig c = reference_config();
    c.dt /= 2.0;
    return run_config(c, false, false);
  }();
  return r;
}

// ---------------------------------------------------------------------------
// 1

Outcome criterion_validator() {
  std::mt19937_64 rng(20240101);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Grid g = Grid::make(1, std::vector<double>{1.0}, std::vector<int>{8});
  int accepted = 0, rejected = 0, mismatches = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    ModelParams p;
    std::array<double, 5> lower{}, upper{};
    for (std::size_t i = 0; i < 5; ++i) {
      const double roll = U(rng);
      if (roll < 0.02) {
        const double v = -0.1 * U(rng);
        p.diffusion[i] = DiffusionCoefficient::constant(v);
        lower[i] = upper[i] = v;
      } else if (roll < 0.5) {
        SeparableProfile prof{0.01 + 0.5 * U(rng), 0.5 * U(rng), 1.0, 0.0, 0.0};
        p.diffusion[i] = DiffusionCoefficient::separable(prof);
        lower[i] = prof.base * (1.0 - prof.amp_x);
        upper[i] = prof.base * (1.0 + prof.amp_x);
      } else {
        const double v = 0.01 + 0.5 * U(rng);
        p.diffusion[i] = DiffusionCoefficient::constant(v);
        lower[i] = upper[i] = v;
      }
    }
    p.alpha.a11 = 1.2 * U(rng);
    p.alpha.a21 = U(rng);
    p.mu.C = U(rng);
    p.K.C = 0.5 + 1.5 * U(rng);
    p.chi[0][0] = 0.15 * U(rng);
    p.chi[1][0] = 0.15 * U(rng);
    InitialFields init;
    bool negative = false;
    for (std::size_t s = 0; s < 6; ++s) {
      init[s] = Field(g, U(rng));
      if (U(rng) < 0.01) {
        init[s][3] = -0.1 * U(rng) - 1e-9;
        negative = true;
      }
    }

    // Direct evaluation of the hypotheses.
    const std::size_t cs = *parabolic_slot(Species::C), ns = *parabolic_slot(Species::N);
    bool h1 = true;
    for (std::size_t i = 0; i < 5; ++i) h1 = h1 && lower[i] > 0.0 && lower[i] <= upper[i];
    const double h4 = 4.0 * p.alpha.a21 * p.mu.C / p.K.C - p.alpha.a11 * p.alpha.a11;
    const double chi_sum = p.chi[0][0] + p.chi[1][0];
    const double chi = 4.0 * lower[cs] * lower[ns] - chi_sum * chi_sum;
    const bool expect = h1 && !negative && h4 > 0.0 && chi > 0.0;

    try {
      const BoundCertificates b = validate(p, init, Regime::strict);
      ++accepted;
      const double e = std::max(rel_diff(b.h4_margin, h4), rel_diff(b.chi_margin, chi));
      worst = std::max(worst, e);
      if (!expect || e > 1e-14) ++mismatches;
    } catch (const ValidationError& err) {
      ++rejected;
      bool right = !expect;
      if (right && h1 && !negative) {
        // The first failing hypothesis is reported with its margin.
        if (h4 <= 0.0) {
          right = dynamic_cast<const ReactionBalanceError*>(&err) != nullptr;
          worst = std::max(worst, rel_diff(err.margin(), h4));
          right = right && rel_diff(err.margin(), h4) <= 1e-14;
        } else {
          right = dynamic_cast<const ChiConditionError*>(&err) != nullptr;
          worst = std::max(worst, rel_diff(err.margin(), chi));
          right = right && rel_diff(err.margin(), chi) <= 1e-14;
        }
      } else if (right && !h1) {
        right = dynamic_cast<const EllipticityError*>(&err) != nullptr;
      } else if (right) {
        right = dynamic_cast<const NegativeInitialDataError*>(&err) != nullptr;
      }
      if (!right) ++mismatches;
    }
  }
  return {mismatches == 0 && accepted > 0 && rejected > 0,
          fmt::format("{} accepted, {} rejected, {} disagreements, worst margin rel. diff {:.2e}", accepted, rejected,
                      mismatches, worst)};
}

// 2

Outcome criterion_clamp() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 3.0);
  std::uniform_int_distribution<int> pick(0, 9);
  const double specials[] = {0.0, -0.0, 1.0, std::nextafter(1.0, 2.0), std::nextafter(0.0, -1.0), 1e-300, -1e-300, 0.5};
  long failures = 0;
  for (long i = 0; i < 1000000; ++i) {
    const double x = pick(rng) == 0 ? specials[static_cast<std::size_t>(pick(rng) % 8)] : U(rng);
    const double y = pick(rng) == 0 ? specials[static_cast<std::size_t>(pick(rng) % 8)] : U(rng);
    const double bx = clamp_B(x), by = clamp_B(y);
    if (clamp_B(bx) != bx) ++failures;
    if (std::abs(bx - by) > std::abs(x - y)) ++failures;
    if (bx != std::min(std::max(x, 0.0), 1.0)) ++failures;
  }
  return {failures == 0, fmt::format("10^6 pairs, {} failures", failures)};
}

// 3

Outcome criterion_operator_oracle() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::size_t mismatch = 0, largest = 0;
  double asym = 0.0, rowsum = 0.0;
  for (int c = 0; c < 20; ++c) {
    const Grid g = c == 0 ? Grid::make(1, std::vector<double>{1.0}, std::vector<int>{10000})
                          : random_grid(rng, 10000);
    largest = std::max(largest, g.size());
    OperatorMatrix m;
    OracleMatrix oracle;
    if (c % 2 == 0) {
      std::vector<double> d(g.size());
      for (double& v : d) v = 0.05 + 5.0 * U(rng);
      m = assemble_diffusion_matrix(d, g);
      oracle = matrix_oracle(g, d);
    } else {
      const auto coef = DiffusionCoefficient::separable({0.1 + U(rng), 0.6 * U(rng), 1.0 + std::floor(3 * U(rng)),
                                                         0.3 * U(rng), 2.0 * U(rng)});
      const double t = U(rng);
      m = assemble_diffusion_matrix(coef, t, g);
      oracle = matrix_oracle(g, coef, t);
    }
    mismatch += compare_with_oracle(m.matrix, oracle, 1e-14).size();
    const auto& A = m.matrix;
    for (int r = 0; r < A.outerSize(); ++r) {
      double sum = 0.0, diag = 0.0;
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A, r); it; ++it) {
        sum += it.value();
        if (it.col() == r) diag = std::abs(it.value());
        asym = std::max(asym, rel_diff(it.value(), A.coeff(it.col(), r)));
      }
      if (diag > 0.0) rowsum = std::max(rowsum, std::abs(sum) / diag);
    }
  }
  return {mismatch == 0 && asym <= 1e-14 && rowsum <= 1e-13,
          fmt::format("20 cases up to {} cells, {} entry mismatches, max asymmetry {:.1e}, max |row sum|/|diag| {:.1e}",
                      largest, mismatch, asym, rowsum)};
}

// 4

Outcome criterion_conservation() {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst_diff = 0.0, worst_taxis = 0.0;
  auto relative_total = [](const Field& f) {
    CompensatedSum s, a;
    for (double v : f.values) {
      s.add(v * f.grid.cell_volume());
      a.add(std::abs(v) * f.grid.cell_volume());
    }
    return a.value() == 0.0 ? 0.0 : std::abs(s.value()) / a.value();
  };
  for (int c = 0; c < 100; ++c) {
    const Grid g = random_grid(rng, 4096);
    Field u(g), carrier(g);
    std::vector<double> d(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      u[k] = 3.0 * U(rng) - 1.0;
      carrier[k] = 2.0 * U(rng) - 0.5;
      d[k] = 0.05 + 5.0 * U(rng);
    }
    FaceField drift(g);
    for (int a = 0; a < g.dim(); ++a) {
      auto& w = drift.axis[static_cast<std::size_t>(a)];
      for (std::size_t k = 0; k < g.size(); ++k)
        w[k] = g.coords(k)[static_cast<std::size_t>(a)] == g.cells()[static_cast<std::size_t>(a)] - 1 ? 0.0
                                                                                                        : 4.0 * U(rng) - 2.0;
    }
    worst_diff = std::max(worst_diff, relative_total(diffusion_apply(u, d)));
    const TaxisScheme scheme = c % 2 == 0 ? TaxisScheme::central : TaxisScheme::upwind;
    worst_taxis = std::max(worst_taxis, relative_total(taxis_divergence(carrier, drift, scheme)));
  }
  return {worst_diff <= 1e-13 && worst_taxis <= 1e-13,
          fmt::format("100 inputs, max |sum|/sum|.| diffusion {:.1e}, taxis {:.1e}", worst_diff, worst_taxis)};
}

// 5

Outcome criterion_logistic() {
  const Grid g = Grid::make(1, std::vector<double>{1.0}, std::vector<int>{64});
  ModelParams p;
  p.mu.V = 1.5;
  p.K.V = 1.0;
  const Field v0 = sample(g, [](const Point& x) { return 0.1 + 0.4 * (1.0 + std::cos(std::numbers::pi * x[0])); });
  std::array<Field, 6> f{Field(g), Field(g), v0, Field(g), Field(g), Field(g)};
  StateFields s(f, 0.0);
  Stepper stepper(g, p);
  const TimeWindow w(1.0, 1e-3);
  for (long n = 0; n < w.steps(); ++n) {
    s = stepper.step(s, w.step_length(n)).first;
    s.t = w.time_at(n + 1);
  }
  double err = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    err = std::max(err, std::abs(s[Species::V][k] - logistic(v0[k], p.mu.V, p.K.V, 1.0)));
  return {err <= 1e-6, fmt::format("grid-Linf error at t = 1: {:.2e}", err)};
}

// 6

Outcome criterion_homogeneous() {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Grid g = Grid::make(1, std::vector<double>{1.0}, std::vector<int>{4});
  double worst = 0.0, spread = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    ModelParams p;
    for (auto& d : p.diffusion) d = DiffusionCoefficient::constant(0.01 + U(rng));
    for (auto& row : p.chi)
      for (double& c : row) c = 0.01 * U(rng);
    auto rate = [&] { return 0.1 * U(rng); };
    auto& a = p.alpha;
    a.a21 = rate() + 0.05;
    p.mu.C = rate() + 0.05;
    p.K.C = 0.5 + U(rng);
    a.a11 = std::sqrt(4.0 * a.a21 * p.mu.C / p.K.C) * U(rng);  // reaction balance holds
    a.a31 = rate(), a.a32 = rate(), a.a33 = rate(), a.a41 = rate(), a.a42 = rate();
    a.a51 = rate(), a.a52 = rate(), a.a61 = rate(), a.a62 = rate();
    p.mu.N = rate(), p.mu.V = rate(), p.mu.A = rate(), p.mu.I = rate();
    p.K.N = 0.5 + U(rng), p.K.V = 0.5 + U(rng);
    p.delta.C = rate(), p.delta.N = rate(), p.delta.P = rate();
    LocalState u0;
    for (double& v : u0) v = 0.1 + 0.9 * U(rng);
    StateFields s = StateFields::uniform(g, u0);
    InitialFields init = s.fields;
    (void)validate(p, init, Regime::strict);

    Stepper stepper(g, p);
    const TimeWindow w(1.0, 1e-4);
    for (long n = 0; n < w.steps(); ++n) {
      s = stepper.step(s, w.step_length(n)).first;
      s.t = w.time_at(n + 1);
    }
    const LocalState exact = ode_oracle(u0, p, 1.0);
    for (Species sp : kAllSpecies) {
      const Field& f = s[sp];
      for (std::size_t k = 0; k < g.size(); ++k) {
        worst = std::max(worst, std::abs(f[k] - exact[index_of(sp)]));
        spread = std::max(spread, std::abs(f[k] - f[0]));
      }
    }
  }
  return {worst <= 1e-6, fmt::format("5 parameter sets, max error vs ODE oracle {:.2e} (spatial spread {:.1e})", worst,
                                     spread)};
}

// 7

Outcome criterion_nonnegativity() {
  const ReferenceRun& r = reference();
  long hard = 0;
  for (const Violation& v : r.result.violations)
    if (v.monitor == "nonnegativity") ++hard;
  double stab = 0.0;
  for (const StepReport& s : r.result.reports) stab = std::max(stab, s.stability_number);
  const bool complete = !r.result.halted && r.result.steps_completed == TimeWindow(r.config.t_end, r.config.dt).steps();
  return {complete && hard == 0 && r.probe.min_value >= -1e-12 && stab < 0.5,
          fmt::format("{} steps, negativity violations {}, min value {:.3e}, max stability number {:.2e}",
                      r.result.steps_completed, hard, r.probe.min_value, stab)};
}

// 8

Outcome criterion_ceilings() {
  const ReferenceRun& r = reference();
  io::RunConfig doubled_cfg = reference_config();
  doubled_cfg.t_end *= 2.0;
  const ReferenceRun doubled = run_config(doubled_cfg, false, false);
  const bool same = doubled.config.certificates.max_uA == r.config.certificates.max_uA &&
                    doubled.config.certificates.max_uV == r.config.certificates.max_uV;
  const bool certified = r.config.certificates.max_uA && r.config.certificates.max_uV;
  const double lim = 1.0 + 1e-10;
  const bool ok = certified && same && r.probe.max_ratio_A <= lim && r.probe.max_ratio_V <= lim &&
                  doubled.probe.max_ratio_A <= lim && doubled.probe.max_ratio_V <= lim && !doubled.result.halted;
  return {ok, fmt::format("M_A {}, M_V {}; max u_A/M_A {:.6f} (T doubled {:.6f}), max u_V/M_V {:.6f} (T doubled "
                          "{:.6f}); certificates unchanged: {}",
                          certified ? *r.config.certificates.max_uA : NAN, certified ? *r.config.certificates.max_uV : NAN,
                          r.probe.max_ratio_A, doubled.probe.max_ratio_A, r.probe.max_ratio_V,
                          doubled.probe.max_ratio_V, same ? "yes" : "no")};
}

// 9

Outcome criterion_boundary() {
  const io::RunConfig c = io::load_config(config_path("boundary_induced.ini"));
  const Field v0 = io::make_initial_fields(c)[index_of(Species::V)];
  double initial = 0.0;
  for (double d : boundary_normal_difference(v0)) initial = std::max(initial, std::abs(d));
  const ReferenceRun r = run_config(c, false, false);
  return {initial == 0.0 && r.probe.max_boundary <= 1e-10 && !r.result.halted,
          fmt::format("initial {:.1e}, max over {} steps {:.2e}", initial, r.result.steps_completed,
                      r.probe.max_boundary)};
}

// 10

Outcome criterion_l1_identity() {
  const auto& a = reference().probe.l1_residuals;
  const auto& b = reference_half_dt().probe.l1_residuals;
  const double ma = *std::max_element(a.begin(), a.end());
  const double mb = *std::max_element(b.begin(), b.end());
  const double ratio = ma / mb;
  return {ratio >= 1.6 && ratio <= 2.4,
          fmt::format("max residual dt=1e-3: {:.3e}, dt=5e-4: {:.3e}, ratio {:.3f}", ma, mb, ratio)};
}

// 11

Outcome criterion_mms() {
  const std::vector<int> ladder{32, 64, 128};
  const ConvergenceTable diffusion = mms_run(ManufacturedCase::diffusion_only(), ladder);
  const ConvergenceTable coupled = mms_run(ManufacturedCase::coupled(), ladder);
  const double od = diffusion.min_order(), oc = coupled.min_order();
  return {od >= 1.9 && oc >= 1.5, fmt::format("diffusion-only order {:.3f}, coupled order {:.3f} (errors {:.2e} -> "
                                               "{:.2e})",
                                               od, oc, coupled.rows.front().error, coupled.rows.back().error)};
}

// 12

Outcome criterion_weak_residual() {
  const auto& coarse = reference().weak_max;
  const auto& fine = reference_refined().weak_max;
  const double mc = *std::max_element(coarse.begin(), coarse.end());
  const double mf = *std::max_element(fine.begin(), fine.end());
  const double ratio = mc / mf;
  const double unit = reference().probe.max_unit_mismatch;
  return {ratio >= 1.8 && unit <= 1e-13,
          fmt::format("max residual {:.3e} -> {:.3e} (ratio {:.3f}); phi=1 u_N residual vs monitor: max diff {:.1e}",
                      mc, mf, ratio, unit)};
}

// 13

Outcome criterion_picard() {
  long bad = 0, steps = 0;
  int most = 0;
  for (const ReferenceRun* r : {&reference(), &reference_half_dt()}) {
    for (const StepReport& s : r->result.reports) {
      ++steps;
      most = std::max(most, s.picard_iterations);
      for (std::size_t i = 1; i < s.picard_residuals.size(); ++i)
        if (!(s.picard_residuals[i] < s.picard_residuals[i - 1])) {
          ++bad;
          break;
        }
      if (s.picard_residuals.size() < 2 || !s.converged) ++bad;
    }
  }
  return {bad == 0, fmt::format("{} steps (dt 1e-3 and 5e-4), {} not strictly decreasing or unconverged, at most {} "
                                "sweeps",
                                steps, bad, most)};
}

// 14

double campanato_oracle(const std::vector<std::vector<double>>& u, const std::vector<double>& x,
                        const std::vector<double>& t, double h, double mu, const std::vector<double>& radii) {
  double best = -1.0;
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (double r : radii) {
    for (std::size_t m0 = 0; m0 < t.size(); ++m0)
      for (std::size_t k0 = 0; k0 < x.size(); ++k0) {
        std::vector<double> pts;
        for (std::size_t m = 0; m < t.size(); ++m) {
          if (!(t[m] > t[m0] - r * r && m <= m0)) continue;
          for (std::size_t k = 0; k < x.size(); ++k)
            if ((x[k] - x[k0]) * (x[k] - x[k0]) < r * r) pts.push_back(u[m][k]);
        }
        if (pts.size() < 2) continue;
        double sum = 0.0;
        for (double v : pts) sum += v - pts[0];
        const double mean = sum / static_cast<double>(pts.size());
        double dev = 0.0;
        for (double v : pts) dev += ((v - pts[0]) - mean) * ((v - pts[0]) - mean);
        best = std::max(best, std::pow(r, -mu) * (dev * (h * dt)));
      }
  }
  return best;
}

double holder_oracle(const std::vector<std::vector<double>>& u, const std::vector<double>& x,
                     const std::vector<double>& t, double alpha) {
  double best = 0.0;
  for (std::size_t m1 = 0; m1 < t.size(); ++m1)
    for (std::size_t k1 = 0; k1 < x.size(); ++k1)
      for (std::size_t m2 = 0; m2 < t.size(); ++m2)
        for (std::size_t k2 = 0; k2 < x.size(); ++k2) {
          if (m1 == m2 && k1 == k2) continue;
          const double denom = std::pow(std::sqrt((x[k1] - x[k2]) * (x[k1] - x[k2])), alpha) +
                               std::pow(std::abs(t[m1] - t[m2]), alpha / 2.0);
          best = std::max(best, std::abs(u[m1][k1] - u[m2][k2]) / denom);
        }
  return best;
}

Outcome criterion_campanato() {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const Grid g = Grid::make(1, std::vector<double>{1.0}, std::vector<int>{8});
  const std::vector<double> radii{0.2, 0.3, 0.5};
  std::vector<double> x(8), t(8);
  for (std::size_t k = 0; k < 8; ++k) x[k] = g.center(k)[0];
  for (std::size_t m = 0; m < 8; ++m) t[m] = 0.02 * static_cast<double>(m);

  auto make = [&](const std::vector<std::vector<double>>& u) {
    FieldHistory h(g, {Species::C});
    for (std::size_t m = 0; m < 8; ++m) {
      const Field f(g, u[m]);
      h.append(t[m], std::span<const Field>(&f, 1));
    }
    return h;
  };
  auto random_u = [&] {
    std::vector<std::vector<double>> u(8, std::vector<double>(8));
    for (auto& row : u)
      for (double& v : row) v = 4.0 * U(rng) - 2.0;
    return u;
  };

  long constant_fail = 0, oracle_fail = 0, property_fail = 0;
  double worst_property = 0.0;
  for (int c = 0; c < 20; ++c) {
    const double value = 10.0 * U(rng) - 5.0;
    const FieldHistory h = make(std::vector<std::vector<double>>(8, std::vector<double>(8, value)));
    if (campanato_seminorm(h, Species::C, 1.0 + 3.0 * U(rng), radii) != 0.0) ++constant_fail;
    if (holder_seminorm(h, Species::C, 0.1 + 0.8 * U(rng)) != 0.0) ++constant_fail;
  }
  for (int c = 0; c < 100; ++c) {
    const auto u = random_u();
    const double mu = 3.0 * U(rng), alpha = 0.05 + 0.9 * U(rng);
    const FieldHistory h = make(u);
    const double cam = campanato_seminorm(h, Species::C, mu, radii);
    const double hol = holder_seminorm(h, Species::C, alpha);
    if (cam != campanato_oracle(u, x, t, g.cell_volume(), mu, radii)) ++oracle_fail;
    if (hol != holder_oracle(u, x, t, alpha)) ++oracle_fail;

    // Scaling by lambda multiplies the Campanato sum by lambda^2 and the Hoelder quotient by |lambda|;
    // adding a constant changes neither.
    const double lambda = 0.1 + 5.0 * U(rng), shift = 20.0 * U(rng) - 10.0;
    auto scaled = u, shifted = u;
    for (std::size_t m = 0; m < 8; ++m)
      for (std::size_t k = 0; k < 8; ++k) {
        scaled[m][k] *= -lambda;
        shifted[m][k] += shift;
      }
    const FieldHistory hs = make(scaled), ht = make(shifted);
    const double e = std::max({rel_diff(campanato_seminorm(hs, Species::C, mu, radii), lambda * lambda * cam),
                               rel_diff(holder_seminorm(hs, Species::C, alpha), lambda * hol),
                               rel_diff(campanato_seminorm(ht, Species::C, mu, radii), cam),
                               rel_diff(holder_seminorm(ht, Species::C, alpha), hol)});
    worst_property = std::max(worst_property, e);
    if (e > 1e-12) ++property_fail;
  }
  return {constant_fail == 0 && oracle_fail == 0 && property_fail == 0,
          fmt::format("constant nonzero {}, oracle mismatches {} of 200, property failures {} (worst {:.1e})",
                      constant_fail, oracle_fail, property_fail, worst_property)};
}

// 15

Outcome criterion_epsilon() {
  std::array<StateFields, 3> finals;
  const double eps[] = {0.0, 1e-3, 1e-2};
  for (int i = 0; i < 3; ++i) {
    io::RunConfig c = reference_config();
    c.params.epsilon_reg = eps[i];
    finals[static_cast<std::size_t>(i)] =
        i == 0 ? reference().result.final_state : run_config(c, false, false).result.final_state;
  }
  auto dist = [&](const StateFields& a, const StateFields& b) {
    double m = 0.0;
    for (std::size_t s = 0; s < 6; ++s)
      for (std::size_t k = 0; k < a.fields[s].size(); ++k)
        m = std::max(m, std::abs(a.fields[s][k] - b.fields[s][k]));
    return m;
  };
  const double d1 = dist(finals[1], finals[0]), d2 = dist(finals[2], finals[0]);
  const double ratio = d2 / d1;
  return {ratio >= 8.0 && ratio <= 12.0,
          fmt::format("Linf difference eps=1e-3: {:.3e}, eps=1e-2: {:.3e}, ratio {:.3f}, C ~ {:.3f}", d1, d2, ratio,
                      d2 / 1e-2)};
}

// 16

Outcome criterion_determinism() {
  set_thread_count(1);
  const fs::path root = fs::temp_directory_path() / fmt::format("upasim_acceptance_{}", ::getpid());
  fs::remove_all(root);
  io::RunConfig c = reference_config();
  c.t_end = 0.05;
  c.output.snapshot_every = 10;
  auto do_run = [&](const fs::path& dir) {
    io::RunDirectorySink sink(dir, c);
    OutputSink* sinks[] = {&sink};
    RunOptions o;
    o.scheme = c.scheme;
    o.monitors = c.monitors;
    (void)run(StateFields(io::make_initial_fields(c), 0.0), c.params, c.certificates, TimeWindow(c.t_end, c.dt), o,
              sinks);
  };
  do_run(root / "a");
  do_run(root / "b");
  long files = 0, differ = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    ++files;
    if (io::read_file(e.path()) != io::read_file(root / "b" / e.path().filename())) ++differ;
  }

  std::mt19937_64 rng(23);
  const Grid g = Grid::make(2, std::vector<double>{1.0, 2.0}, std::vector<int>{17, 9});
  long roundtrip_fail = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Field f(g);
    for (double& v : f.values) v = std::bit_cast<double>(rng());
    const io::Snapshot s = io::decode_snapshot(io::encode_snapshot(f, 0.125 * trial, Species::P));
    for (std::size_t k = 0; k < f.size(); ++k)
      if (std::bit_cast<std::uint64_t>(s.values[k]) != std::bit_cast<std::uint64_t>(f[k])) ++roundtrip_fail;
  }

  bool rejected = false;
  try {
    (void)io::parse_config("[grid]\ndim = 1\nextents = 1\ncells = 8\n[time]\nt_end = 1\ndt = 0.1\n[taxis]\nchii_11 = 0.1\n");
  } catch (const ConfigError& e) {
    rejected = std::string(e.what()).find("chii_11") != std::string::npos;
  }
  fs::remove_all(root);
  return {files > 0 && differ == 0 && roundtrip_fail == 0 && rejected,
          fmt::format("{} run files compared, {} differ; {} round-trip bit mismatches; unknown key rejected: {}", files,
                      differ, roundtrip_fail, rejected ? "yes" : "no")};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "hypothesis validator", criterion_validator},
      {2, "clamp properties", criterion_clamp},
      {3, "diffusion matrix oracle", criterion_operator_oracle},
      {4, "discrete conservation", criterion_conservation},
      {5, "logistic oracle", criterion_logistic},
      {6, "homogeneous reduction", criterion_homogeneous},
      {7, "non-negativity", criterion_nonnegativity},
      {8, "L-infinity ceilings", criterion_ceilings},
      {9, "induced u_V boundary condition", criterion_boundary},
      {10, "L1 identity residual order", criterion_l1_identity},
      {11, "manufactured-solution convergence", criterion_mms},
      {12, "weak-form residual", criterion_weak_residual},
      {13, "Picard contraction", criterion_picard},
      {14, "Campanato and Hoelder diagnostics", criterion_campanato},
      {15, "epsilon regularization", criterion_epsilon},
      {16, "determinism and IO", criterion_determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.contains(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    fmt::print("{} {:2d} {}: {} [{:.1f}s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail, secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
