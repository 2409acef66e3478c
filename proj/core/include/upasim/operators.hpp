#pragma once

#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "upasim/grid.hpp"
#include "upasim/model.hpp"

namespace upasim {

/// How the clamped carrier B(u) is evaluated on a face for the taxis flux.
enum class TaxisScheme {
  central,  // B(arithmetic mean of the two adjacent cells)
  upwind,   // B(value in the upstream cell relative to the drift sign)
};

/// Assembled form of u -> div(d grad u) over the canonical cell ordering.
struct OperatorMatrix {
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
  bool symmetric = true;
};

/// Harmonic mean 2ab/(a+b) used for face diffusivities.
inline double harmonic_mean(double a, double b) noexcept { return 2.0 * a * b / (a + b); }

/// One-sided differences (u_{k+1} - u_k)/h on interior faces, exact zero on boundary faces.
FaceGradient face_gradient(const Field& u);

/// Cell-wise div(d grad u) with harmonic face diffusivities and zero boundary flux.
/// `d_cells` are cell-center diffusivities.
Field diffusion_apply(const Field& u, std::span<const double> d_cells);
/// Same, with d sampled from the coefficient at time t (ModelError if out of bounds).
Field diffusion_apply(const Field& u, const DiffusionCoefficient& d, double t);

OperatorMatrix assemble_diffusion_matrix(std::span<const double> d_cells, const Grid& grid);
OperatorMatrix assemble_diffusion_matrix(const DiffusionCoefficient& d, double t, const Grid& grid);

/// Face value of B(carrier) used by the taxis flux.
double face_carrier(double left, double right, double drift, TaxisScheme scheme) noexcept;

/// Face fluxes B(carrier)_face * drift_face; zero on boundary faces.
FaceField taxis_flux(const Field& carrier, const FaceField& drift, TaxisScheme scheme = TaxisScheme::central);

/// Cell-wise div(B(carrier) drift). Throws ShapeError on mismatched grids.
Field taxis_divergence(const Field& carrier, const FaceField& drift,
                       TaxisScheme scheme = TaxisScheme::central);

/// Divergence of a face flux field (zero boundary flux).
Field face_divergence(const FaceField& flux);

}  // namespace upasim
