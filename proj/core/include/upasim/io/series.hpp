#pragma once

#include <span>
#include <string>

#include "upasim/functionals.hpp"
#include "upasim/monitors.hpp"
#include "upasim/stepper.hpp"
#include "upasim/verification.hpp"

namespace upasim::io {

/// Columns: t; for each species X in C,N,V,A,I,P: L1_X, L2_X, Linf_X, min_X; then
/// supL2_X and gradL2sq_X per species; then margin_A, margin_V (empty when uncertified).
std::string series_csv(const FunctionalSeries& series);

/// One row per step: step, t, dt, picard_iterations, picard_residual (last entry),
/// converged, non_contraction, stability_number, cg_C, cg_N, cg_A, cg_I, cg_P, clipped.
std::string steps_csv(std::span<const StepReport> reports, double t0 = 0.0);

/// monitor, step, species, cell, magnitude, tolerance, mode, count.
std::string violations_csv(std::span<const Violation> violations);

/// test_function, kx, ky, kz, time_power, then R_C .. R_P (signed defects).
std::string weak_residual_csv(std::span<const TestFunction> bank, std::span<const std::array<double, 6>> residuals);

}  // namespace upasim::io
