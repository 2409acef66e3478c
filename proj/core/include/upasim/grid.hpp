#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace upasim {

using Point = std::array<double, 3>;
using Index3 = std::array<int, 3>;

/// Rectangular box discretized into cell-centered cells.
///
/// Cells are ordered axis-0 fastest: k = i0 + n0 * (i1 + n1 * i2). Axes at or
/// beyond `dim()` are inert (one cell, unit width) and never enter stencils or
/// volumes. The zero-flux condition is encoded by reflecting ghost cells: the
/// ghost neighbour of a boundary cell carries the boundary cell's own value.
class Grid {
 public:
  /// Throws ConfigError unless dim is 1..3, every extent is positive and finite,
  /// and every active axis has at least three cells.
  static Grid make(int dim, std::span<const double> extents, std::span<const int> cells,
                   std::span<const double> origin = {});

  int dim() const noexcept { return dim_; }
  const Index3& cells() const noexcept { return cells_; }
  const Point& extents() const noexcept { return extents_; }
  const Point& spacing() const noexcept { return spacing_; }
  const Point& origin() const noexcept { return origin_; }

  std::size_t size() const noexcept { return size_; }
  double cell_volume() const noexcept { return cell_volume_; }
  double measure() const noexcept;  // |Omega|
  double min_spacing() const noexcept;
  double diameter() const noexcept;

  /// Offset between cell k and its +1 neighbour along `axis`.
  std::size_t stride(int axis) const noexcept { return strides_[static_cast<std::size_t>(axis)]; }

  std::size_t index(const Index3& ijk) const noexcept;
  Index3 coords(std::size_t k) const noexcept;
  Point center(std::size_t k) const noexcept;

  /// Position rescaled to [0,1] per active axis.
  Point normalized(const Point& x) const noexcept;

  bool operator==(const Grid&) const = default;

 private:
  int dim_ = 1;
  Index3 cells_{1, 1, 1};
  Point extents_{1.0, 1.0, 1.0};
  Point spacing_{1.0, 1.0, 1.0};
  Point origin_{0.0, 0.0, 0.0};
  std::array<std::size_t, 3> strides_{1, 1, 1};
  std::size_t size_ = 1;
  double cell_volume_ = 1.0;
};

/// Final time plus base step. The last step is shortened so the accumulated
/// time lands on t_end exactly.
class TimeWindow {
 public:
  TimeWindow(double t_end, double dt);

  double t_end() const noexcept { return t_end_; }
  double dt() const noexcept { return dt_; }
  long steps() const noexcept { return steps_; }

  /// Time after `n` completed steps; time_at(steps()) == t_end() exactly.
  double time_at(long n) const noexcept;
  double step_length(long n) const noexcept { return time_at(n + 1) - time_at(n); }

  bool operator==(const TimeWindow&) const = default;

 private:
  double t_end_;
  double dt_;
  long steps_;
};

/// One scalar per cell on a grid.
struct Field {
  Grid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  Field(const Grid& g, std::vector<double> v);

  std::size_t size() const noexcept { return values.size(); }
  double& operator[](std::size_t k) noexcept { return values[k]; }
  double operator[](std::size_t k) const noexcept { return values[k]; }

  bool all_finite() const noexcept;
};

/// values[k] = f(center(k)). Throws InitializationError naming the first cell
/// with a non-finite sample.
Field sample(const Grid& grid, const std::function<double(const Point&)>& f);

/// Cell-sum times cell volume, compensated.
double integrate(const Field& u);

/// A boundary face of the box: `side` is 0 for the low face, 1 for the high face.
struct BoundaryFace {
  int axis;
  int side;
  std::size_t cell;  // adjacent boundary cell
};

/// Every boundary face in a fixed order: axis, then side, then boundary cell in
/// canonical order.
std::vector<BoundaryFace> boundary_faces(const Grid& grid);

/// Outward normal derivative at every boundary face, from the one-sided
/// three-cell stencil (2 u_b - 3 u_{b+1} + u_{b+2}) / h. The stencil is exact on
/// quadratics, so it is the centered face difference against the quadratically
/// extrapolated ghost value; it vanishes exactly when that ghost equals the
/// reflected one. Order matches boundary_faces().
std::vector<double> boundary_normal_difference(const Field& field);

}  // namespace upasim
