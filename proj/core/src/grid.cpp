#include "upasim/grid.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "upasim/errors.hpp"
#include "upasim/summation.hpp"

namespace upasim {

Grid Grid::make(int dim, std::span<const double> extents, std::span<const int> cells,
                std::span<const double> origin) {
  if (dim < 1 || dim > 3) throw ConfigError(fmt::format("grid dim must be 1, 2 or 3 (got {})", dim));
  const auto d = static_cast<std::size_t>(dim);
  if (extents.size() != d || cells.size() != d)
    throw ConfigError(fmt::format("grid needs {} extents and {} cell counts (got {} and {})", d, d,
                                  extents.size(), cells.size()));
  if (!origin.empty() && origin.size() != d)
    throw ConfigError(fmt::format("grid origin needs {} entries (got {})", d, origin.size()));

  Grid g;
  g.dim_ = dim;
  for (std::size_t a = 0; a < d; ++a) {
    if (!(extents[a] > 0.0) || !std::isfinite(extents[a]))
      throw ConfigError(fmt::format("grid extent on axis {} must be positive (got {})", a, extents[a]));
    if (cells[a] < 3)
      throw ConfigError(fmt::format("grid needs at least 3 cells on axis {} (got {})", a, cells[a]));
    g.extents_[a] = extents[a];
    g.cells_[a] = cells[a];
    g.spacing_[a] = extents[a] / cells[a];
    g.origin_[a] = origin.empty() ? 0.0 : origin[a];
    if (!std::isfinite(g.origin_[a])) throw ConfigError(fmt::format("grid origin on axis {} is not finite", a));
  }
  g.strides_ = {1, static_cast<std::size_t>(g.cells_[0]),
                static_cast<std::size_t>(g.cells_[0]) * static_cast<std::size_t>(g.cells_[1])};
  g.size_ = static_cast<std::size_t>(g.cells_[0]) * static_cast<std::size_t>(g.cells_[1]) *
            static_cast<std::size_t>(g.cells_[2]);
  g.cell_volume_ = 1.0;
  for (std::size_t a = 0; a < d; ++a) g.cell_volume_ *= g.spacing_[a];
  return g;
}

double Grid::measure() const noexcept {
  double m = 1.0;
  for (int a = 0; a < dim_; ++a) m *= extents_[static_cast<std::size_t>(a)];
  return m;
}

double Grid::min_spacing() const noexcept {
  return *std::min_element(spacing_.begin(), spacing_.begin() + dim_);
}

double Grid::diameter() const noexcept {
  double s = 0.0;
  for (int a = 0; a < dim_; ++a) s += extents_[static_cast<std::size_t>(a)] * extents_[static_cast<std::size_t>(a)];
  return std::sqrt(s);
}

std::size_t Grid::index(const Index3& ijk) const noexcept {
  return static_cast<std::size_t>(ijk[0]) + strides_[1] * static_cast<std::size_t>(ijk[1]) +
         strides_[2] * static_cast<std::size_t>(ijk[2]);
}

Index3 Grid::coords(std::size_t k) const noexcept {
  const auto n0 = static_cast<std::size_t>(cells_[0]);
  const auto n1 = static_cast<std::size_t>(cells_[1]);
  return {static_cast<int>(k % n0), static_cast<int>((k / n0) % n1), static_cast<int>(k / (n0 * n1))};
}

Point Grid::center(std::size_t k) const noexcept {
  const Index3 ijk = coords(k);
  Point x{0.0, 0.0, 0.0};
  for (std::size_t a = 0; a < static_cast<std::size_t>(dim_); ++a)
    x[a] = origin_[a] + (ijk[a] + 0.5) * spacing_[a];
  return x;
}

Point Grid::normalized(const Point& x) const noexcept {
  Point xi{0.0, 0.0, 0.0};
  for (std::size_t a = 0; a < static_cast<std::size_t>(dim_); ++a) xi[a] = (x[a] - origin_[a]) / extents_[a];
  return xi;
}

TimeWindow::TimeWindow(double t_end, double dt) : t_end_(t_end), dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError(fmt::format("time step must be positive (got {})", dt));
  if (!(t_end >= dt) || !std::isfinite(t_end))
    throw ConfigError(fmt::format("t_end must be finite and >= dt (got t_end={}, dt={})", t_end, dt));
  // t_end/dt is frequently an integer up to rounding (1/1e-3); treat it as exact then.
  const double ratio = t_end / dt;
  const double nearest = std::round(ratio);
  steps_ = std::abs(ratio - nearest) <= 1e-9 * nearest ? static_cast<long>(nearest)
                                                        : static_cast<long>(std::ceil(ratio));
}

double TimeWindow::time_at(long n) const noexcept {
  if (n >= steps_) return t_end_;
  return static_cast<double>(n) * dt_;
}

Field::Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size())
    throw ShapeError(fmt::format("field has {} values for a grid of {} cells", values.size(), grid.size()));
}

bool Field::all_finite() const noexcept {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

Field sample(const Grid& grid, const std::function<double(const Point&)>& f) {
  Field out(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Point x = grid.center(k);
    const double v = f(x);
    if (!std::isfinite(v)) {
      const Index3 ijk = grid.coords(k);
      throw InitializationError(fmt::format("non-finite initial value {} at cell {} (i={}, j={}, l={})", v, k,
                                            ijk[0], ijk[1], ijk[2]));
    }
    out[k] = v;
  }
  return out;
}

double integrate(const Field& u) {
  return compensated_sum(u.values) * u.grid.cell_volume();
}

std::vector<BoundaryFace> boundary_faces(const Grid& grid) {
  std::vector<BoundaryFace> faces;
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const int n = grid.cells()[static_cast<std::size_t>(axis)];
    for (int side = 0; side < 2; ++side) {
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const int i = grid.coords(k)[static_cast<std::size_t>(axis)];
        if ((side == 0 && i == 0) || (side == 1 && i == n - 1)) faces.push_back({axis, side, k});
      }
    }
  }
  return faces;
}

std::vector<double> boundary_normal_difference(const Field& field) {
  const Grid& g = field.grid;
  const auto faces = boundary_faces(g);
  std::vector<double> out;
  out.reserve(faces.size());
  for (const auto& f : faces) {
    const std::size_t s = g.stride(f.axis);
    const double h = g.spacing()[static_cast<std::size_t>(f.axis)];
    const std::size_t k0 = f.cell;
    const std::size_t k1 = f.side == 0 ? k0 + s : k0 - s;
    const std::size_t k2 = f.side == 0 ? k0 + 2 * s : k0 - 2 * s;
    // Grouped as differences so a locally constant field gives exactly zero.
    out.push_back((2.0 * (field[k0] - field[k1]) - (field[k1] - field[k2])) / h);
  }
  return out;
}

}  // namespace upasim
