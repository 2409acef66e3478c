#include "upasim/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "upasim/errors.hpp"
#include "upasim/summation.hpp"

namespace upasim {
namespace {

constexpr double kPi = std::numbers::pi;

// prod_a cos(k_a pi xi_a) and its pieces, xi the position rescaled to [0, 1].
struct CosineProduct {
  std::array<double, 3> c{1, 1, 1}, s{0, 0, 0}, w{0, 0, 0};  // cos, sin, k pi / L per axis

  CosineProduct(const Grid& g, const std::array<int, 3>& k, const Point& x) {
    for (std::size_t a = 0; a < static_cast<std::size_t>(g.dim()); ++a) {
      w[a] = k[a] * kPi / g.extents()[a];
      const double arg = w[a] * (x[a] - g.origin()[a]);
      c[a] = std::cos(arg);
      s[a] = std::sin(arg);
    }
  }
  double value() const { return c[0] * c[1] * c[2]; }
  double derivative(std::size_t a) const {
    double v = -w[a] * s[a];
    for (std::size_t b = 0; b < 3; ++b)
      if (b != a) v *= c[b];
    return v;
  }
  double laplacian_factor() const { return -(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]); }
};

double grid_l2_distance(const StateFields& a, const StateFields& b) { return state_distance(a, b); }

}  // namespace

// ---------------------------------------------------------------------------
// ManufacturedCase

double ManufacturedCase::value(Species s, const Grid& g, const Point& x, double t) const {
  const ManufacturedField& f = fields[index_of(s)];
  return f.base + f.amplitude * CosineProduct(g, f.wavenumber, x).value() * std::exp(-f.decay * t);
}

Point ManufacturedCase::gradient(Species s, const Grid& g, const Point& x, double t) const {
  const ManufacturedField& f = fields[index_of(s)];
  const CosineProduct cp(g, f.wavenumber, x);
  const double e = f.amplitude * std::exp(-f.decay * t);
  Point out{0, 0, 0};
  for (std::size_t a = 0; a < static_cast<std::size_t>(g.dim()); ++a) out[a] = e * cp.derivative(a);
  return out;
}

double ManufacturedCase::laplacian(Species s, const Grid& g, const Point& x, double t) const {
  const ManufacturedField& f = fields[index_of(s)];
  const CosineProduct cp(g, f.wavenumber, x);
  return f.amplitude * std::exp(-f.decay * t) * cp.laplacian_factor() * cp.value();
}

double ManufacturedCase::time_derivative(Species s, const Grid& g, const Point& x, double t) const {
  const ManufacturedField& f = fields[index_of(s)];
  return -f.decay * f.amplitude * CosineProduct(g, f.wavenumber, x).value() * std::exp(-f.decay * t);
}

double ManufacturedCase::source(Species s, const Grid& g, const Point& x, double t) const {
  LocalState u{};
  for (Species q : kAllSpecies) u[index_of(q)] = value(q, g, x, t);
  double rhs = reaction(s, u, params);

  if (s != Species::V) {
    const DiffusionCoefficient& d = params.diffusion_of(s);
    const double dv = d.evaluate(g, x, t);
    const Point dg = d.gradient(g, x, t);
    const Point ug = gradient(s, g, x, t);
    double div = dv * laplacian(s, g, x, t);
    for (std::size_t a = 0; a < 3; ++a) div += dg[a] * ug[a];
    rhs += div;
  }
  if (s == Species::C || s == Species::N) {
    const std::size_t row = s == Species::C ? 0 : 1;
    const std::array<Species, 4> partners{s == Species::C ? Species::N : Species::C, Species::A, Species::I,
                                          Species::V};
    Point W{0, 0, 0};
    double divW = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      const double chi = params.chi[row][j];
      if (chi == 0.0) continue;
      const Point gj = gradient(partners[j], g, x, t);
      for (std::size_t a = 0; a < 3; ++a) W[a] += chi * gj[a];
      divW += chi * laplacian(partners[j], g, x, t);
    }
    // The carrier is B(u_s); B is the identity on (0, 1), where check() keeps u_C and u_N.
    const double us = u[index_of(s)];
    const Point gs = gradient(s, g, x, t);
    double carrier_term = clamp_B(us) * divW;
    if (us > 0.0 && us < 1.0)
      for (std::size_t a = 0; a < 3; ++a) carrier_term += gs[a] * W[a];
    rhs -= carrier_term;
  }
  return time_derivative(s, g, x, t) - rhs;
}

SourceFunction ManufacturedCase::sources(const Grid& g) const {
  std::vector<Point> centers(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) centers[k] = g.center(k);
  return [self = *this, g, centers](Species s, double t, std::span<double> out) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = self.source(s, g, centers[k], t);
  };
}

StateFields ManufacturedCase::exact_state(const Grid& g, double t) const {
  std::array<Field, 6> f;
  for (Species s : kAllSpecies) f[index_of(s)] = sample(g, [&](const Point& x) { return value(s, g, x, t); });
  return StateFields(std::move(f), t);
}

void ManufacturedCase::check(const Grid& g, double t_end) const {
  constexpr int n = 17;
  for (int it = 0; it <= 4; ++it) {
    const double t = t_end * it / 4.0;
    for (int i2 = 0; i2 < (g.dim() > 2 ? n : 1); ++i2)
      for (int i1 = 0; i1 < (g.dim() > 1 ? n : 1); ++i1)
        for (int i0 = 0; i0 < n; ++i0) {
          Point x = g.origin();
          const std::array<int, 3> idx{i0, i1, i2};
          for (std::size_t a = 0; a < static_cast<std::size_t>(g.dim()); ++a)
            x[a] += g.extents()[a] * idx[a] / (n - 1.0);
          for (Species s : kAllSpecies) {
            const double v = value(s, g, x, t);
            if (v < 0.0)
              throw HarnessFailure(fmt::format("manufactured u_{} is negative ({}) at t={}", name_of(s), v, t));
            if ((s == Species::C || s == Species::N) && v > 1.0)
              throw HarnessFailure(fmt::format("manufactured u_{} exceeds 1 ({}) at t={}", name_of(s), v, t));
          }
        }
  }
}

ManufacturedCase ManufacturedCase::coupled() {
  ManufacturedCase mc;
  mc.name = "coupled";
  ModelParams& p = mc.params;
  p.diffusion = {DiffusionCoefficient::constant(0.05), DiffusionCoefficient::constant(0.05),
                 DiffusionCoefficient::constant(0.1), DiffusionCoefficient::constant(0.1),
                 DiffusionCoefficient::constant(0.1)};
  p.chi = {{{0.02, 0.01, 0.01, 0.01}, {0.02, 0.01, 0.01, 0.01}}};
  p.alpha = {.a11 = 0.2, .a21 = 0.5, .a31 = 0.1, .a32 = 0.2, .a33 = 0.1, .a41 = 0.1,
             .a42 = 0.5, .a51 = 0.1, .a52 = 0.1, .a61 = 0.2, .a62 = 0.1};
  p.mu = {.C = 0.5, .N = 0.3, .V = 0.2, .A = 0.1, .I = 0.1};
  p.delta = {.C = 0.05, .N = 0.05, .P = 0.1};
  mc.fields[index_of(Species::C)] = {0.5, 0.2, {1, 1, 1}, 0.5};
  mc.fields[index_of(Species::N)] = {0.6, 0.3, {1, 1, 1}, 0.3};
  mc.fields[index_of(Species::V)] = {0.6, 0.2, {1, 1, 1}, 0.2};
  mc.fields[index_of(Species::A)] = {0.3, 0.1, {1, 1, 1}, 0.4};
  mc.fields[index_of(Species::I)] = {0.4, 0.1, {1, 1, 1}, 0.1};
  mc.fields[index_of(Species::P)] = {0.5, 0.2, {1, 1, 1}, 0.6};
  return mc;
}

ManufacturedCase ManufacturedCase::constant() {
  ManufacturedCase mc = coupled();
  mc.name = "constant";
  for (auto& f : mc.fields) f.amplitude = 0.0;
  return mc;
}

ManufacturedCase ManufacturedCase::diffusion_only() {
  ManufacturedCase mc;
  mc.name = "diffusion";
  for (auto& f : mc.fields) f = {1.0, 0.5, {1, 1, 1}, 1.0};
  mc.fields[index_of(Species::C)] = {0.5, 0.4, {1, 1, 1}, 1.0};  // u_C and u_N stay inside [0, 1]
  mc.fields[index_of(Species::N)] = {0.5, 0.4, {1, 1, 1}, 1.0};
  return mc;
}

ManufacturedCase ManufacturedCase::by_name(const std::string& name) {
  if (name == "constant") return constant();
  if (name == "diffusion") return diffusion_only();
  if (name == "coupled") return coupled();
  throw HarnessFailure(fmt::format("unknown manufactured case '{}' (constant, diffusion, coupled)", name));
}

// ---------------------------------------------------------------------------
// Convergence

double observed_order(double coarse, double fine, double ratio) { return std::log(coarse / fine) / std::log(ratio); }

double ConvergenceTable::min_order() const {
  double m = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : rows)
    if (r.order) m = std::isnan(m) ? *r.order : std::min(m, *r.order);
  return m;
}

std::string ConvergenceTable::to_csv() const {
  std::string out = "cells,h,dt,error,order\n";
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{},{}\n", r.cells, r.h, r.dt, r.error, r.order ? fmt::format("{}", *r.order) : "");
  return out;
}

StateFields mms_solve(const ManufacturedCase& mc, const Grid& grid, const TimeWindow& window,
                      const SchemeOptions& scheme, bool with_sources) {
  Stepper stepper(grid, mc.params, scheme, with_sources ? mc.sources(grid) : SourceFunction{});
  StateFields state = mc.exact_state(grid, 0.0);
  for (long n = 0; n < window.steps(); ++n) {
    state = stepper.step(state, window.step_length(n)).first;
    state.t = window.time_at(n + 1);
  }
  return state;
}

ConvergenceTable mms_run(const ManufacturedCase& mc, std::span<const int> ladder, const MmsOptions& opt) {
  if (ladder.size() < 2) throw HarnessFailure("a convergence ladder needs at least two grids");
  ConvergenceTable table;
  for (int n : ladder) {
    const std::array<double, 3> extents{1.0, 1.0, 1.0};
    const std::array<int, 3> cells{n, n, n};
    const Grid g = Grid::make(opt.dim, std::span(extents).first(static_cast<std::size_t>(opt.dim)),
                              std::span(cells).first(static_cast<std::size_t>(opt.dim)));
    mc.check(g, opt.t_end);
    const double h = g.min_spacing();
    const long steps = static_cast<long>(std::ceil(opt.t_end / (opt.dt_factor * h * h) - 1e-9));
    const TimeWindow window(opt.t_end, opt.t_end / static_cast<double>(steps));
    const StateFields final_state = mms_solve(mc, g, window, opt.scheme, true);
    ConvergenceRow row{n, h, window.dt(), grid_l2_distance(final_state, mc.exact_state(g, opt.t_end)), {}};
    if (!table.rows.empty()) {
      const ConvergenceRow& prev = table.rows.back();
      row.order = observed_order(prev.error, row.error, prev.h / row.h);
    }
    table.rows.push_back(row);
  }
  for (std::size_t i = 1; i < table.rows.size(); ++i)
    if (table.rows[i].error > table.rows[i - 1].error && table.rows[i - 1].error > 1e-13)
      throw HarnessFailure("error grows along the ladder:\n" + table.to_csv());
  return table;
}

// ---------------------------------------------------------------------------
// Weak residual

std::vector<TestFunction> default_test_bank(const Grid& grid, int kmax) {
  std::vector<TestFunction> bank;
  const int d = grid.dim();
  for (int q = 1; q <= 2; ++q)
    for (int k2 = 0; k2 <= (d > 2 ? kmax : 0); ++k2)
      for (int k1 = 0; k1 <= (d > 1 ? kmax : 0); ++k1)
        for (int k0 = 0; k0 <= kmax; ++k0) bank.push_back({{k0, k1, k2}, q});
  return bank;
}

WeakResidualAccumulator::WeakResidualAccumulator(const Grid& grid, ModelParams params, TaxisScheme scheme,
                                                 double t0, double t_end, std::vector<TestFunction> bank,
                                                 bool allow_terminal)
    : grid_(grid),
      params_(std::move(params)),
      scheme_(scheme),
      t0_(t0),
      t_end_(t_end),
      bank_(std::move(bank)),
      allow_terminal_(allow_terminal) {
  if (!(t_end > t0)) throw HarnessFailure("weak residual window must have positive length");
  if (bank_.empty()) throw HarnessFailure("empty test bank");
  for (const TestFunction& tf : bank_) {
    if (tf.time_power < 0) throw HarnessFailure("test function time power must be >= 0");
    if (!allow_terminal_ && std::abs(p(tf.time_power, t_end_)) > 1e-14)
      throw HarnessFailure(fmt::format("test function with time power {} does not vanish at the final time",
                                       tf.time_power));
    std::array<int, 3> k = tf.wavenumber;
    for (std::size_t a = static_cast<std::size_t>(grid_.dim()); a < 3; ++a) k[a] = 0;
    auto it = std::find(profiles_.begin(), profiles_.end(), k);
    if (it == profiles_.end()) {
      profiles_.push_back(k);
      Field psi = sample(grid_, [&](const Point& x) { return CosineProduct(grid_, k, x).value(); });
      psi_grad_.push_back(face_gradient(psi));
      psi_.push_back(std::move(psi.values));
      profile_of_.push_back(profiles_.size() - 1);
    } else {
      profile_of_.push_back(static_cast<std::size_t>(it - profiles_.begin()));
    }
  }
  integral_.assign(bank_.size(), std::array<double, 6>{});
}

double WeakResidualAccumulator::p(int q, double t) const {
  return std::pow(1.0 - (t - t0_) / (t_end_ - t0_), q);
}

double WeakResidualAccumulator::dp(int q, double t) const {
  if (q == 0) return 0.0;
  return -q / (t_end_ - t0_) * std::pow(1.0 - (t - t0_) / (t_end_ - t0_), q - 1);
}

WeakResidualAccumulator::Sample WeakResidualAccumulator::evaluate(const StateFields& st) const {
  if (!(st.grid() == grid_)) throw ShapeError("weak residual: state grid differs from the accumulator grid");
  const std::size_t n = grid_.size();
  const double vol = grid_.cell_volume();
  const auto dim = static_cast<std::size_t>(grid_.dim());
  Sample out{st.t, std::vector<std::array<double, 6>>(profiles_.size()),
             std::vector<std::array<double, 6>>(profiles_.size())};

  for (Species s : kAllSpecies) {
    const std::size_t i = index_of(s);
    const Field& u = st[s];
    std::vector<double> R(n);
    for (std::size_t k = 0; k < n; ++k) R[k] = reaction(s, st.at(k), params_);

    // Total face flux d grad u - B W, on the scheme's faces.
    FaceField flux(grid_);
    if (s != Species::V) {
      const auto d = params_.diffusion_of(s).sample_cells(grid_, st.t);
      const FaceGradient gu = face_gradient(u);
      for (std::size_t a = 0; a < dim; ++a) {
        const std::size_t stride = grid_.stride(static_cast<int>(a));
        for (std::size_t k = 0; k < n; ++k)
          if (gu.axis[a][k] != 0.0) flux.axis[a][k] = harmonic_mean(d[k], d[k + stride]) * gu.axis[a][k];
      }
    }
    if (s == Species::C || s == Species::N) {
      const Species partner = s == Species::C ? Species::N : Species::C;
      const std::array<FaceGradient, 4> grads{face_gradient(st[partner]), face_gradient(st[Species::A]),
                                              face_gradient(st[Species::I]), face_gradient(st[Species::V])};
      const FaceField x = taxis_flux(u, drift_vector(s, grads, params_), scheme_);
      for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t k = 0; k < n; ++k) flux.axis[a][k] -= x.axis[a][k];
    }

    for (std::size_t j = 0; j < profiles_.size(); ++j) {
      const auto& psi = psi_[j];
      CompensatedSum U, F, Rs;
      for (std::size_t k = 0; k < n; ++k) {
        U.add(psi[k] * u[k]);
        Rs.add(psi[k] * R[k]);
      }
      for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t k = 0; k < n; ++k) F.add(flux.axis[a][k] * psi_grad_[j].axis[a][k]);
      out.U[j][i] = U.value() * vol;
      out.G[j][i] = F.value() * vol - Rs.value() * vol;
    }
  }
  return out;
}

void WeakResidualAccumulator::add(const StateFields& state) {
  Sample s = evaluate(state);
  if (!first_) {
    if (std::abs(state.t - t0_) > 1e-12 * std::max(1.0, std::abs(t0_)))
      throw HarnessFailure(fmt::format("first state is at t={}, expected {}", state.t, t0_));
    for (std::size_t b = 0; b < bank_.size(); ++b)
      for (std::size_t i = 0; i < 6; ++i)
        integral_[b][i] = -p(bank_[b].time_power, s.t) * s.U[profile_of_[b]][i];
    first_ = s;
  } else {
    if (!(s.t > last_->t)) throw HarnessFailure("weak residual states must have increasing times");
    const double h = s.t - last_->t;
    for (std::size_t b = 0; b < bank_.size(); ++b) {
      const int q = bank_[b].time_power;
      const std::size_t j = profile_of_[b];
      for (std::size_t i = 0; i < 6; ++i) {
        const double f0 = -dp(q, last_->t) * last_->U[j][i] + p(q, last_->t) * last_->G[j][i];
        const double f1 = -dp(q, s.t) * s.U[j][i] + p(q, s.t) * s.G[j][i];
        integral_[b][i] += 0.5 * h * (f0 + f1);
      }
    }
  }
  last_ = std::move(s);
}

std::vector<std::array<double, 6>> WeakResidualAccumulator::residuals() const {
  if (!last_ || !first_ || last_->t == first_->t) throw HarnessFailure("weak residual needs at least two states");
  if (std::abs(last_->t - t_end_) > 1e-12 * std::max(1.0, std::abs(t_end_)))
    throw HarnessFailure(fmt::format("last state is at t={}, expected {}", last_->t, t_end_));
  std::vector<std::array<double, 6>> out = integral_;
  for (std::size_t b = 0; b < bank_.size(); ++b) {
    const double pT = p(bank_[b].time_power, t_end_);
    if (pT == 0.0) continue;
    for (std::size_t i = 0; i < 6; ++i) out[b][i] += pT * last_->U[profile_of_[b]][i];
  }
  return out;
}

std::array<double, 6> WeakResidualAccumulator::max_abs() const {
  std::array<double, 6> m{};
  for (const auto& r : residuals())
    for (std::size_t i = 0; i < 6; ++i) m[i] = std::max(m[i], std::abs(r[i]));
  return m;
}

std::vector<std::array<double, 6>> weak_residual(const FieldHistory& history, const ModelParams& params,
                                                 std::span<const TestFunction> bank, TaxisScheme scheme) {
  for (Species s : kAllSpecies)
    if (!history.tracks(s)) throw HarnessFailure("weak residual needs a history of all six species");
  if (history.samples() < 2) throw HarnessFailure("weak residual needs at least two samples");
  WeakResidualAccumulator acc(history.grid(), params, scheme, history.times().front(), history.times().back(),
                              {bank.begin(), bank.end()});
  for (std::size_t m = 0; m < history.samples(); ++m) {
    std::array<Field, 6> f;
    for (Species s : kAllSpecies) {
      const auto v = history.values(s, m);
      f[index_of(s)] = Field(history.grid(), std::vector<double>(v.begin(), v.end()));
    }
    acc.add(StateFields(std::move(f), history.times()[m]));
  }
  return acc.residuals();
}

// ---------------------------------------------------------------------------
// Oracles

LocalState ode_oracle(const LocalState& u0, const ModelParams& params, double T, double rel_tol,
                      double abs_tol) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 6>;
  for (double v : u0)
    if (!std::isfinite(v)) throw OracleFailure("ode_oracle: non-finite initial value");
  if (!(T >= 0.0)) throw OracleFailure("ode_oracle: negative final time");
  State x = u0;
  if (T == 0.0) return x;
  auto rhs = [&](const State& u, State& du, double /*t*/) {
    for (Species s : kAllSpecies) du[index_of(s)] = reaction(s, u, params);
  };
  try {
    ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<State>>(abs_tol, rel_tol), rhs, x, 0.0,
                            T, std::min(1e-3, T));
  } catch (const std::exception& e) {
    throw OracleFailure(fmt::format("ode_oracle: integrator failed: {}", e.what()));
  }
  for (double v : x)
    if (!std::isfinite(v)) throw OracleFailure("ode_oracle: integration produced a non-finite value");
  return x;
}

double logistic(double u0, double rate, double capacity, double t) {
  const double e = std::exp(rate * t);
  return capacity * u0 * e / (capacity + u0 * (e - 1.0));
}

double shifted_logistic(double u0, double mu, double delta, double capacity, double t) {
  const double r = mu - delta;
  if (r == 0.0) return u0 / (1.0 + mu / capacity * u0 * t);
  // u' = r u (1 - u / K') with K' = K r / mu; also valid for r < 0.
  return logistic(u0, r, capacity * r / mu, t);
}

OracleMatrix matrix_oracle(const Grid& grid, std::span<const double> d) {
  if (grid.size() > 10000) throw OracleFailure("matrix_oracle is limited to 10^4 cells");
  if (d.size() != grid.size()) throw OracleFailure("matrix_oracle: coefficient size does not match the grid");
  OracleMatrix m;
  const Index3 n = grid.cells();
  for (int i2 = 0; i2 < n[2]; ++i2)
    for (int i1 = 0; i1 < n[1]; ++i1)
      for (int i0 = 0; i0 < n[0]; ++i0) {
        const std::size_t row = static_cast<std::size_t>(i0 + n[0] * (i1 + n[1] * i2));
        m[{row, row}] += 0.0;
        for (int axis = 0; axis < grid.dim(); ++axis) {
          const double h = grid.spacing()[static_cast<std::size_t>(axis)];
          for (int dir : {-1, +1}) {
            std::array<int, 3> nb{i0, i1, i2};
            nb[static_cast<std::size_t>(axis)] += dir;
            // Ghost cell outside the box: it mirrors this cell, value and diffusivity.
            const bool ghost = nb[static_cast<std::size_t>(axis)] < 0 ||
                               nb[static_cast<std::size_t>(axis)] >= n[static_cast<std::size_t>(axis)];
            const std::size_t col =
                ghost ? row : static_cast<std::size_t>(nb[0] + n[0] * (nb[1] + n[1] * nb[2]));
            const double dface = 2.0 / (1.0 / d[row] + 1.0 / d[col]);
            const double c = dface / (h * h);
            // flux c (u_col - u_row); a ghost adds +c and -c to the diagonal.
            if (ghost) continue;
            m[{row, col}] += c;
            m[{row, row}] -= c;
          }
        }
      }
  return m;
}

OracleMatrix matrix_oracle(const Grid& grid, const DiffusionCoefficient& d, double t) {
  std::vector<double> cells(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) cells[k] = d.evaluate(grid, grid.center(k), t);
  return matrix_oracle(grid, cells);
}

std::vector<std::string> compare_with_oracle(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m,
                                             const OracleMatrix& oracle, double tol) {
  std::vector<std::string> out;
  OracleMatrix seen;
  for (Eigen::Index r = 0; r < m.outerSize(); ++r)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m, r); it; ++it)
      seen[{static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col())}] += it.value();
  auto mismatch = [&](std::size_t r, std::size_t c, double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (std::abs(a - b) > tol * scale || (scale == 0.0 && a != b))
      out.push_back(fmt::format("({}, {}): assembled {} oracle {}", r, c, a, b));
  };
  for (const auto& [key, b] : oracle) {
    auto it = seen.find(key);
    mismatch(key.first, key.second, it == seen.end() ? 0.0 : it->second, b);
  }
  for (const auto& [key, a] : seen)
    if (!oracle.contains(key)) mismatch(key.first, key.second, a, 0.0);
  return out;
}

}  // namespace upasim
