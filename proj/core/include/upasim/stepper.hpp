#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "upasim/errors.hpp"
#include "upasim/model.hpp"
#include "upasim/operators.hpp"
#include "upasim/state.hpp"

namespace upasim {

struct SchemeOptions {
  TaxisScheme taxis = TaxisScheme::central;
  int picard_max = 5;
  double picard_tol = 1e-10;  // grid-L2 of successive iterates, all species together
  bool clip_negative = false;
  double linear_tol = 1e-10;      // CG relative residual
  int linear_max_per_cell = 10;   // CG iteration cap = this * cells
  double stability_warning = 0.5;

  bool operator==(const SchemeOptions&) const = default;
};

/// Extra source S_i(x, t) added to species' equation, written cell-wise into `out`.
/// Used by manufactured-solution runs; an empty function adds nothing.
using SourceFunction = std::function<void(Species, double t, std::span<double> out)>;

struct StepReport {
  double dt_used = 0.0;
  int picard_iterations = 0;
  /// Entry k is the grid-L2 distance between sweep k+1 and sweep k, sweep 0 being the old state.
  std::vector<double> picard_residuals;
  bool converged = false;
  bool non_contraction = false;
  /// CG iterations summed over sweeps, indexed by parabolic_slot().
  std::array<int, 5> linear_iterations{};
  /// max |drift| dt / h over the step's taxis evaluations.
  double stability_number = 0.0;
  bool clipped = false;
  std::vector<std::string> warnings;
};

class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, StepReport report) : Error(what), report_(std::move(report)) {}
  const StepReport& report() const noexcept { return report_; }

 private:
  StepReport report_;
};

/// Advances (state, t) -> (state, t + dt) by one IMEX step.
///
/// Each Picard sweep visits A, I, P, V, C, N in that order. A parabolic species
/// solves (I - dt M_i(t+dt)) u_new = u_old + dt (reaction - div taxis + source)
/// with the explicit terms taken from the freshest iterate; u_V is integrated
/// cell-wise with RK4 over the step, u_P, u_I, u_A frozen at their iterate values.
/// Sweeps stop once the successive-iterate distance is <= picard_tol.
class Stepper {
 public:
  Stepper(const Grid& grid, ModelParams params, SchemeOptions options = {}, SourceFunction sources = {});
  ~Stepper();
  Stepper(Stepper&&) noexcept;
  Stepper& operator=(Stepper&&) noexcept;

  std::pair<StateFields, StepReport> step(const StateFields& state, double dt);

  const ModelParams& params() const noexcept { return params_; }
  const SchemeOptions& options() const noexcept { return options_; }

 private:
  struct Impl;
  ModelParams params_;
  SchemeOptions options_;
  SourceFunction sources_;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience around Stepper.
std::pair<StateFields, StepReport> step(const StateFields& state, const ModelParams& params, double dt,
                                        const SchemeOptions& options = {});

/// Cell-wise classical RK4 for the u_V equation over one step of length dt,
/// u_P, u_I, u_A frozen. `source`, when given, holds S_V at t, t + dt/2, t + dt.
Field ode_advance_V(const Field& uV, const Field& uP, const Field& uI, const Field& uA,
                    const ModelParams& params, double dt,
                    const std::array<std::vector<double>, 3>* source = nullptr);

/// Explicit right-hand side of a parabolic species: reaction minus taxis divergence.
Field explicit_terms(Species species, const StateFields& state, const ModelParams& params, TaxisScheme scheme,
                     double* max_drift = nullptr);

/// Grid-L2 distance between two states, all six species together.
double state_distance(const StateFields& a, const StateFields& b);

}  // namespace upasim
