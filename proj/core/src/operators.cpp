#include "upasim/operators.hpp"

#include <fmt/format.h>

#include "upasim/errors.hpp"

namespace upasim {
namespace {

// Position of cell k along `axis`.
inline int axis_coord(const Grid& g, std::size_t k, std::size_t axis) noexcept {
  return static_cast<int>((k / g.stride(static_cast<int>(axis))) % static_cast<std::size_t>(g.cells()[axis]));
}

}  // namespace

FaceGradient face_gradient(const Field& u) {
  const Grid& g = u.grid;
  FaceGradient grad(g);
  for (std::size_t a = 0; a < static_cast<std::size_t>(g.dim()); ++a) {
    const std::size_t s = g.stride(static_cast<int>(a));
    const int last = g.cells()[a] - 1;
    const double inv_h = 1.0 / g.spacing()[a];
    auto& out = grad.axis[a];
    for (std::size_t k = 0; k < g.size(); ++k)
      out[k] = axis_coord(g, k, a) < last ? (u[k + s] - u[k]) * inv_h : 0.0;
  }
  return grad;
}

Field diffusion_apply(const Field& u, std::span<const double> d) {
  const Grid& g = u.grid;
  if (d.size() != g.size()) throw ShapeError("diffusion_apply: coefficient size does not match the grid");
  Field out(g);
  for (std::size_t a = 0; a < static_cast<std::size_t>(g.dim()); ++a) {
    const std::size_t s = g.stride(static_cast<int>(a));
    const int last = g.cells()[a] - 1;
    const double h = g.spacing()[a];
    for (std::size_t k = 0; k < g.size(); ++k) {
      const int i = axis_coord(g, k, a);
      const double up = i < last ? harmonic_mean(d[k], d[k + s]) * (u[k + s] - u[k]) / h : 0.0;
      const double down = i > 0 ? harmonic_mean(d[k - s], d[k]) * (u[k] - u[k - s]) / h : 0.0;
      out[k] += (up - down) / h;
    }
  }
  return out;
}

Field diffusion_apply(const Field& u, const DiffusionCoefficient& d, double t) {
  const auto cells = d.sample_cells(u.grid, t);
  return diffusion_apply(u, cells);
}

OperatorMatrix assemble_diffusion_matrix(std::span<const double> d, const Grid& g) {
  if (d.size() != g.size()) throw ShapeError("assemble_diffusion_matrix: coefficient size does not match the grid");
  const auto n = static_cast<Eigen::Index>(g.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(g.size() * (1 + 2 * static_cast<std::size_t>(g.dim())));
  std::vector<double> diag(g.size(), 0.0);
  for (std::size_t a = 0; a < static_cast<std::size_t>(g.dim()); ++a) {
    const std::size_t s = g.stride(static_cast<int>(a));
    const int last = g.cells()[a] - 1;
    const double h2 = g.spacing()[a] * g.spacing()[a];
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (axis_coord(g, k, a) == last) continue;
      const double c = harmonic_mean(d[k], d[k + s]) / h2;
      triplets.emplace_back(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k + s), c);
      triplets.emplace_back(static_cast<Eigen::Index>(k + s), static_cast<Eigen::Index>(k), c);
      diag[k] -= c;
      diag[k + s] -= c;
    }
  }
  for (std::size_t k = 0; k < g.size(); ++k)
    triplets.emplace_back(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k), diag[k]);
  OperatorMatrix m;
  m.matrix.resize(n, n);
  m.matrix.setFromTriplets(triplets.begin(), triplets.end());
  m.matrix.makeCompressed();
  m.symmetric = true;
  return m;
}

OperatorMatrix assemble_diffusion_matrix(const DiffusionCoefficient& d, double t, const Grid& grid) {
  const auto cells = d.sample_cells(grid, t);
  return assemble_diffusion_matrix(cells, grid);
}

double face_carrier(double left, double right, double drift, TaxisScheme scheme) noexcept {
  if (scheme == TaxisScheme::upwind) return clamp_B(drift >= 0.0 ? left : right);
  return clamp_B(0.5 * (left + right));
}

FaceField taxis_flux(const Field& carrier, const FaceField& drift, TaxisScheme scheme) {
  const Grid& g = carrier.grid;
  if (!(drift.grid == g)) throw ShapeError("taxis: drift and carrier live on different grids");
  FaceField flux(g);
  for (std::size_t a = 0; a < static_cast<std::size_t>(g.dim()); ++a) {
    const std::size_t s = g.stride(static_cast<int>(a));
    const int last = g.cells()[a] - 1;
    const auto& w = drift.axis[a];
    if (w.size() != g.size()) throw ShapeError("taxis: drift face array has the wrong size");
    auto& f = flux.axis[a];
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (axis_coord(g, k, a) == last) continue;
      f[k] = face_carrier(carrier[k], carrier[k + s], w[k], scheme) * w[k];
    }
  }
  return flux;
}

Field face_divergence(const FaceField& flux) {
  const Grid& g = flux.grid;
  Field out(g);
  for (std::size_t a = 0; a < static_cast<std::size_t>(g.dim()); ++a) {
    const std::size_t s = g.stride(static_cast<int>(a));
    const int last = g.cells()[a] - 1;
    const double inv_h = 1.0 / g.spacing()[a];
    const auto& f = flux.axis[a];
    for (std::size_t k = 0; k < g.size(); ++k) {
      const int i = axis_coord(g, k, a);
      const double up = i < last ? f[k] : 0.0;
      const double down = i > 0 ? f[k - s] : 0.0;
      out[k] += (up - down) * inv_h;
    }
  }
  return out;
}

Field taxis_divergence(const Field& carrier, const FaceField& drift, TaxisScheme scheme) {
  return face_divergence(taxis_flux(carrier, drift, scheme));
}

}  // namespace upasim
