#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "upasim/functionals.hpp"
#include "upasim/stepper.hpp"

namespace upasim {

// ---------------------------------------------------------------------------
// Manufactured solutions

/// u(x, t) = base + amplitude * prod_a cos(k_a pi (x_a - o_a) / L_a) * exp(-decay t).
/// Every such field has zero normal derivative on the box faces.
struct ManufacturedField {
  double base = 1.0;
  double amplitude = 0.0;
  std::array<int, 3> wavenumber{1, 1, 1};
  double decay = 0.0;
};

struct ManufacturedCase {
  std::string name;
  ModelParams params;
  std::array<ManufacturedField, 6> fields;  // storage order

  double value(Species s, const Grid& g, const Point& x, double t) const;
  Point gradient(Species s, const Grid& g, const Point& x, double t) const;
  double laplacian(Species s, const Grid& g, const Point& x, double t) const;
  double time_derivative(Species s, const Grid& g, const Point& x, double t) const;

  /// S_i = d_t u - [div(d grad u) - div(B(u_i) W_i) + reaction], at a point.
  double source(Species s, const Grid& g, const Point& x, double t) const;
  /// Sources sampled at cell centers, in the form the stepper consumes.
  SourceFunction sources(const Grid& g) const;
  StateFields exact_state(const Grid& g, double t) const;

  /// HarnessFailure unless every field is >= 0 and every C and N value lies in [0, 1]
  /// (so the clamp never binds) on a sampling lattice over [0, t_end].
  void check(const Grid& g, double t_end) const;

  static ManufacturedCase constant();
  static ManufacturedCase diffusion_only();
  static ManufacturedCase coupled();
  /// "constant", "diffusion" or "coupled"; HarnessFailure otherwise.
  static ManufacturedCase by_name(const std::string& name);
};

struct ConvergenceRow {
  int cells = 0;
  double h = 0.0;
  double dt = 0.0;
  double error = 0.0;  // grid-L2 over all six species at t_end
  std::optional<double> order;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  /// Smallest observed order; NaN with fewer than two rows.
  double min_order() const;
  std::string to_csv() const;
};

struct MmsOptions {
  int dim = 1;
  double t_end = 0.1;
  /// dt = dt_factor * h^2 (rounded so the window divides evenly).
  double dt_factor = 0.25;
  SchemeOptions scheme{};
};

/// Final state of the coupled stepper started from the exact fields, with or
/// without the manufactured sources.
StateFields mms_solve(const ManufacturedCase& mc, const Grid& grid, const TimeWindow& window,
                      const SchemeOptions& scheme, bool with_sources = true);

/// One run per ladder entry (cells per axis). HarnessFailure, message carrying the
/// table, when errors do not decrease along the ladder (except at rounding level).
ConvergenceTable mms_run(const ManufacturedCase& mc, std::span<const int> ladder, const MmsOptions& options = {});

/// log(e_coarse / e_fine) / log(ratio).
double observed_order(double coarse_error, double fine_error, double ratio = 2.0);

// ---------------------------------------------------------------------------
// Weak-form residual

/// phi(x, t) = prod_a cos(k_a pi (x_a - o_a) / L_a) * (1 - (t - t0) / (T - t0))^time_power.
struct TestFunction {
  std::array<int, 3> wavenumber{0, 0, 0};
  int time_power = 1;
};

/// Tensor cosines with every k_a in 0..kmax on the active axes, times powers 1 and 2.
std::vector<TestFunction> default_test_bank(const Grid& grid, int kmax = 3);

/// Streams committed states (initial state first) and accumulates, per test function
/// and per equation, the discrete weak-form defect
///   int int [-u d_t phi + d grad u . grad phi - B W . grad phi - R phi] - int u_0 phi(0) + int u(T) phi(T).
/// Space integrals use the scheme's own face fluxes; time integrals are trapezoid.
/// The terminal term vanishes for admissible test functions; a test function with
/// phi(T) != 0 is accepted only when `allow_terminal` is set.
class WeakResidualAccumulator {
 public:
  WeakResidualAccumulator(const Grid& grid, ModelParams params, TaxisScheme scheme, double t0, double t_end,
                          std::vector<TestFunction> bank, bool allow_terminal = false);

  void add(const StateFields& state);

  /// Signed defects, [test function][species], species in storage order. HarnessFailure
  /// when the last state added is not at t_end.
  std::vector<std::array<double, 6>> residuals() const;
  /// max over test functions of |defect|, per equation.
  std::array<double, 6> max_abs() const;

  const std::vector<TestFunction>& bank() const noexcept { return bank_; }

 private:
  struct Sample {
    double t;
    // [spatial profile][species]
    std::vector<std::array<double, 6>> U, G;
  };
  Sample evaluate(const StateFields& s) const;
  double p(int q, double t) const;
  double dp(int q, double t) const;

  Grid grid_;
  ModelParams params_;
  TaxisScheme scheme_;
  double t0_, t_end_;
  std::vector<TestFunction> bank_;
  bool allow_terminal_;

  std::vector<std::array<int, 3>> profiles_;  // distinct spatial factors
  std::vector<std::size_t> profile_of_;       // bank index -> profile index
  std::vector<std::vector<double>> psi_;      // cell values per profile
  std::vector<FaceField> psi_grad_;

  std::optional<Sample> first_, last_;
  std::vector<std::array<double, 6>> integral_;  // per bank entry
};

/// Runs the accumulator over a stored history holding all six species.
std::vector<std::array<double, 6>> weak_residual(const FieldHistory& history, const ModelParams& params,
                                                 std::span<const TestFunction> bank,
                                                 TaxisScheme scheme = TaxisScheme::central);

// ---------------------------------------------------------------------------
// Oracles

/// Adaptive Dormand-Prince integration of the spatially homogeneous system from
/// t = 0 to T. OracleFailure when the integrator gives up or produces non-finite values.
LocalState ode_oracle(const LocalState& u0, const ModelParams& params, double T, double rel_tol = 1e-10,
                      double abs_tol = 1e-12);

/// K u0 e^{r t} / (K + u0 (e^{r t} - 1)).
double logistic(double u0, double rate, double capacity, double t);
/// Solution of u' = mu u (1 - u/K) - delta u.
double shifted_logistic(double u0, double mu, double delta, double capacity, double t);

/// Diffusion operator rebuilt cell by cell with the ghost values written out.
/// Entries keyed by (row, column); absent keys are zero.
using OracleMatrix = std::map<std::pair<std::size_t, std::size_t>, double>;

/// Requires at most 10^4 cells.
OracleMatrix matrix_oracle(const Grid& grid, const DiffusionCoefficient& d, double t);
OracleMatrix matrix_oracle(const Grid& grid, std::span<const double> d_cells);

/// Entrywise comparison, relative to the larger magnitude of each pair. Returns a
/// description of every mismatch; empty when the matrices agree.
std::vector<std::string> compare_with_oracle(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m,
                                             const OracleMatrix& oracle, double tol = 1e-14);

}  // namespace upasim
