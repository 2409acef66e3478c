#include "upasim/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/IterativeLinearSolvers>
#include <fmt/format.h>

#include "upasim/parallel.hpp"
#include "upasim/summation.hpp"

namespace upasim {

StateFields::StateFields(std::array<Field, 6> f, double time) : fields(std::move(f)), t(time) {
  for (const Field& x : fields)
    if (!(x.grid == fields[0].grid)) throw ShapeError("state fields live on different grids");
}

StateFields StateFields::uniform(const Grid& grid, const LocalState& values, double time) {
  std::array<Field, 6> f;
  for (std::size_t i = 0; i < 6; ++i) f[i] = Field(grid, values[i]);
  return StateFields(std::move(f), time);
}

bool StateFields::all_finite() const noexcept {
  return std::all_of(fields.begin(), fields.end(), [](const Field& f) { return f.all_finite(); });
}

double state_distance(const StateFields& a, const StateFields& b) {
  CompensatedSum s;
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& x = a.fields[i].values;
    const auto& y = b.fields[i].values;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double d = x[k] - y[k];
      s.add(d * d);
    }
  }
  return std::sqrt(s.value() * a.grid().cell_volume());
}

Field ode_advance_V(const Field& uV, const Field& uP, const Field& uI, const Field& uA, const ModelParams& p,
                    double dt, const std::array<std::vector<double>, 3>* source) {
  if (!(uP.grid == uV.grid) || !(uI.grid == uV.grid) || !(uA.grid == uV.grid))
    throw ShapeError("ode_advance_V: fields live on different grids");
  Field out(uV.grid);
  parallel_for(uV.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      LocalState s{0.0, 0.0, uV[k], uA[k], uI[k], uP[k]};
      auto f = [&](double v, int stage) {
        s[2] = v;
        const double extra = source ? (*source)[static_cast<std::size_t>(stage)][k] : 0.0;
        return reaction(Species::V, s, p) + extra;
      };
      const double v0 = uV[k];
      const double k1 = f(v0, 0);
      const double k2 = f(v0 + 0.5 * dt * k1, 1);
      const double k3 = f(v0 + 0.5 * dt * k2, 1);
      const double k4 = f(v0 + dt * k3, 2);
      out[k] = v0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  });
  return out;
}

Field explicit_terms(Species species, const StateFields& state, const ModelParams& p, TaxisScheme scheme,
                     double* max_drift) {
  const Grid& g = state.grid();
  Field rhs(g);
  parallel_for(g.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) rhs[k] = reaction(species, state.at(k), p);
  });
  if (species != Species::C && species != Species::N) return rhs;

  const auto& row = p.chi[species == Species::C ? 0 : 1];
  if (row[0] == 0.0 && row[1] == 0.0 && row[2] == 0.0 && row[3] == 0.0) return rhs;

  const Species partner = species == Species::C ? Species::N : Species::C;
  const std::array<FaceGradient, 4> grads{face_gradient(state[partner]), face_gradient(state[Species::A]),
                                          face_gradient(state[Species::I]), face_gradient(state[Species::V])};
  const FaceField drift = drift_vector(species, grads, p);
  if (max_drift) {
    for (int a = 0; a < g.dim(); ++a)
      for (double w : drift.axis[static_cast<std::size_t>(a)]) *max_drift = std::max(*max_drift, std::abs(w));
  }
  const Field div = taxis_divergence(state[species], drift, scheme);
  for (std::size_t k = 0; k < g.size(); ++k) rhs[k] -= div[k];
  return rhs;
}

// ---------------------------------------------------------------------------

namespace {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using CgSolver = Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::IdentityPreconditioner>;

// (I - dt M(t)) for one parabolic species, rebuilt only when dt or a time-dependent d changes.
struct ImplicitSystem {
  std::optional<double> dt;
  std::optional<double> t;
  SparseMatrix matrix;
  std::unique_ptr<CgSolver> solver;
};

constexpr std::array<Species, 6> kSweepOrder{Species::A, Species::I, Species::P,
                                             Species::V, Species::C, Species::N};

}  // namespace

struct Stepper::Impl {
  Grid grid;
  std::array<ImplicitSystem, 5> systems;

  ImplicitSystem& system_for(Species s, const ModelParams& p, const SchemeOptions& opt, double dt, double t) {
    const std::size_t slot = *parabolic_slot(s);
    ImplicitSystem& sys = systems[slot];
    const auto& d = p.diffusion_of(s);
    const bool stale = !sys.dt || *sys.dt != dt || (d.time_dependent() && (!sys.t || *sys.t != t));
    if (stale) {
      const OperatorMatrix m = assemble_diffusion_matrix(d, t, grid);
      SparseMatrix id(m.matrix.rows(), m.matrix.cols());
      id.setIdentity();
      sys.matrix = id - dt * m.matrix;
      sys.matrix.makeCompressed();
      sys.solver = std::make_unique<CgSolver>();
      sys.solver->setTolerance(opt.linear_tol);
      sys.solver->setMaxIterations(static_cast<Eigen::Index>(opt.linear_max_per_cell) *
                                   static_cast<Eigen::Index>(grid.size()));
      sys.solver->compute(sys.matrix);
      sys.dt = dt;
      sys.t = t;
    }
    return sys;
  }
};

Stepper::Stepper(const Grid& grid, ModelParams params, SchemeOptions options, SourceFunction sources)
    : params_(std::move(params)), options_(options), sources_(std::move(sources)), impl_(std::make_unique<Impl>()) {
  impl_->grid = grid;
  if (options_.picard_max < 1) throw ConfigError("picard_max must be >= 1");
  if (!(options_.picard_tol > 0.0)) throw ConfigError("picard_tol must be positive");
}

Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;

std::pair<StateFields, StepReport> Stepper::step(const StateFields& old, double dt) {
  if (!(dt > 0.0)) throw ConfigError(fmt::format("step size must be positive (got {})", dt));
  if (!(old.grid() == impl_->grid)) throw ShapeError("state grid does not match the stepper grid");

  const Grid& g = impl_->grid;
  const std::size_t n = g.size();
  const double t_new = old.t + dt;

  StepReport report;
  report.dt_used = dt;

  // Sources are evaluated once per step: parabolic ones at t + dt, S_V at the RK4 stage times.
  std::array<std::vector<double>, 6> source_new;
  std::array<std::vector<double>, 3> source_v;
  const bool have_sources = static_cast<bool>(sources_);
  if (have_sources) {
    for (Species s : kParabolicSpecies) {
      source_new[index_of(s)].assign(n, 0.0);
      sources_(s, t_new, source_new[index_of(s)]);
    }
    const std::array<double, 3> stage_times{old.t, old.t + 0.5 * dt, t_new};
    for (std::size_t i = 0; i < 3; ++i) {
      source_v[i].assign(n, 0.0);
      sources_(Species::V, stage_times[i], source_v[i]);
    }
  }

  StateFields iter = old;
  iter.t = t_new;
  double max_drift = 0.0;
  int increases = 0;

  for (int sweep = 1; sweep <= options_.picard_max; ++sweep) {
    const StateFields previous = iter;
    for (Species s : kSweepOrder) {
      if (s == Species::V) {
        iter[Species::V] = ode_advance_V(old[Species::V], iter[Species::P], iter[Species::I], iter[Species::A],
                                         params_, dt, have_sources ? &source_v : nullptr);
        continue;
      }
      const Field expl = explicit_terms(s, iter, params_, options_.taxis, &max_drift);
      Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
      const auto& src = source_new[index_of(s)];
      for (std::size_t k = 0; k < n; ++k)
        rhs[static_cast<Eigen::Index>(k)] = old[s][k] + dt * (expl[k] + (have_sources ? src[k] : 0.0));

      ImplicitSystem& sys = impl_->system_for(s, params_, options_, dt, t_new);
      Eigen::Map<Eigen::VectorXd> x(iter[s].values.data(), static_cast<Eigen::Index>(n));
      // Solve for the correction to the current iterate so the CG tolerance is
      // relative to the change, not to the state.
      const Eigen::VectorXd residual = rhs - sys.matrix * x;
      if (residual.squaredNorm() > 0.0) {
        const Eigen::VectorXd delta = sys.solver->solve(residual);
        if (sys.solver->info() != Eigen::Success) {
          report.picard_iterations = sweep;
          throw StepFailure(fmt::format("linear solve for u_{} did not converge at t={} ({} iterations, residual {})",
                                        name_of(s), t_new, sys.solver->iterations(), sys.solver->error()),
                            report);
        }
        report.linear_iterations[*parabolic_slot(s)] += static_cast<int>(sys.solver->iterations());
        x += delta;
      }
    }

    const double res = state_distance(iter, previous);
    report.picard_iterations = sweep;
    if (!report.picard_residuals.empty() && res > report.picard_residuals.back()) ++increases;
    else increases = 0;
    report.picard_residuals.push_back(res);
    if (!std::isfinite(res)) throw StepFailure(fmt::format("non-finite Picard residual at t={}", t_new), report);
    if (sweep > 1 && res <= options_.picard_tol) {
      report.converged = true;
      break;
    }
    if (increases >= 3) {
      report.non_contraction = true;
      report.warnings.push_back(
          fmt::format("Picard residual increased for 3 consecutive sweeps at t={} (last {})", t_new, res));
      if (res > options_.picard_tol)
        throw StepFailure(fmt::format("Picard iteration is not contracting at t={} (residual {})", t_new, res),
                          report);
      break;
    }
  }
  if (!report.converged && options_.picard_max > 1 && !report.non_contraction)
    report.warnings.push_back(fmt::format("Picard iteration stopped after {} sweeps at t={} with residual {}",
                                          report.picard_iterations, t_new, report.picard_residuals.back()));

  report.stability_number = max_drift * dt / g.min_spacing();
  if (report.stability_number > options_.stability_warning)
    report.warnings.push_back(fmt::format("explicit stability number {} exceeds {} at t={}",
                                          report.stability_number, options_.stability_warning, t_new));

  if (options_.clip_negative) {
    for (Field& f : iter.fields)
      for (double& v : f.values)
        if (v < 0.0) {
          v = 0.0;
          report.clipped = true;
        }
  }
  if (!iter.all_finite()) throw StepFailure(fmt::format("non-finite state after step to t={}", t_new), report);
  return {std::move(iter), std::move(report)};
}

std::pair<StateFields, StepReport> step(const StateFields& state, const ModelParams& params, double dt,
                                        const SchemeOptions& options) {
  Stepper stepper(state.grid(), params, options);
  return stepper.step(state, dt);
}

}  // namespace upasim
