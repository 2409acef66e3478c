#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "upasim/grid.hpp"
#include "upasim/model.hpp"
#include "upasim/state.hpp"

namespace upasim {

inline constexpr double kInfinityNorm = std::numeric_limits<double>::infinity();

/// Cell-volume weighted p-norm for p in {1, 2, 3, infinity}. Other p throw DiagnosticError.
double lp_norm(const Field& u, double p);

/// sum over interior faces of (face gradient)^2 times cell volume.
double gradient_l2_squared(const Field& u);

/// Stored samples of some species on one grid at strictly increasing times.
class FieldHistory {
 public:
  FieldHistory() = default;
  explicit FieldHistory(Grid grid, std::vector<Species> tracked = {kAllSpecies.begin(), kAllSpecies.end()});

  /// Stores the tracked species of `state` at state.t.
  void append(const StateFields& state);
  /// Stores one sample per tracked species, in tracking order.
  void append(double t, std::span<const Field> fields);

  const Grid& grid() const noexcept { return grid_; }
  const std::vector<double>& times() const noexcept { return times_; }
  std::size_t samples() const noexcept { return times_.size(); }
  bool tracks(Species s) const noexcept { return tracked_[index_of(s)]; }
  const std::vector<Species>& tracked() const noexcept { return order_; }

  /// Values of species s at sample m. Throws DiagnosticError for an untracked species.
  std::span<const double> values(Species s, std::size_t m) const;

  /// Common sample spacing; DiagnosticError when the cadence is not uniform to 1e-9 relative.
  double uniform_step() const;

  /// Every `stride`-th sample, always keeping the first.
  FieldHistory thinned(std::size_t stride) const;

 private:
  Grid grid_;
  std::vector<Species> order_;
  std::array<bool, 6> tracked_{};
  std::vector<double> times_;
  std::array<std::vector<std::vector<double>>, 6> data_;
};

/// max over samples of the spatial L2 norm plus the square root of the time
/// trapezoid of the squared face-gradient norm. Needs at least two samples.
double v2_norm(const FieldHistory& history, Species s);

/// Rectangle-rule space-time integral of u^2 with weights cell volume times the
/// uniform sample step, the same weights the Campanato sum uses.
double space_time_l2_squared(const FieldHistory& history, Species s);

/// Lower bound of the Campanato seminorm from a finite lattice of cylinders.
///
/// Centers run over every stored (cell, sample) pair and radii over `radii`.
/// The cylinder holds cells with |x - x0| < r and samples with t0 - r^2 < t <= t0.
/// Each entry is r^(-mu) * sum |u - mean|^2 * (cell volume * dt_store). Cylinders
/// with fewer than two points are skipped; DiagnosticError if all are.
double campanato_seminorm(const FieldHistory& history, Species s, double mu, std::span<const double> radii);

/// max |u(z1) - u(z2)| / (|x1 - x2|^alpha + |t1 - t2|^(alpha/2)) over all pairs of stored points.
double holder_seminorm(const FieldHistory& history, Species s, double alpha);

/// One row of the functional series.
struct SeriesRecord {
  double t = 0.0;
  std::array<double, 6> l1{}, l2{}, linf{}, min{};
  /// Running sup_t ||u||_L2 and int_0^t ||grad u||^2_L2 (trapezoid).
  std::array<double, 6> sup_l2{}, grad_l2sq{};
  /// M_A - max u_A and M_V - max u_V; NaN when the ceiling is not certified.
  double margin_A = std::numeric_limits<double>::quiet_NaN();
  double margin_V = std::numeric_limits<double>::quiet_NaN();
};

/// Time-indexed norms, V2 accumulators and ceiling margins.
class FunctionalSeries {
 public:
  FunctionalSeries() = default;
  explicit FunctionalSeries(const BoundCertificates& certs) : max_uA_(certs.max_uA), max_uV_(certs.max_uV) {}

  void record(const StateFields& state);
  const std::vector<SeriesRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  const SeriesRecord& back() const { return records_.back(); }

 private:
  std::optional<double> max_uA_, max_uV_;
  std::array<double, 6> last_grad_{};
  std::vector<SeriesRecord> records_;
};

}  // namespace upasim
