#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "upasim/model.hpp"
#include "upasim/state.hpp"

namespace upasim {

enum class MonitorMode { hard, warn, off };

std::string_view to_string(MonitorMode m) noexcept;
std::optional<MonitorMode> monitor_mode_from_string(std::string_view s) noexcept;

struct MonitorConfig {
  double negativity_tolerance = 1e-12;
  double ceiling_tolerance = 1e-10;  // relative
  double boundary_tolerance = 1e-10;
  /// The u_N mass identity tolerance is this factor times dt times max(1, magnitude).
  double l1_identity_factor = 10.0;

  MonitorMode negativity = MonitorMode::hard;
  MonitorMode ceilings = MonitorMode::hard;
  MonitorMode uv_boundary = MonitorMode::warn;
  MonitorMode l1_identity = MonitorMode::warn;

  bool operator==(const MonitorConfig&) const = default;
};

/// One bound found broken. `cell` is the worst offender (a boundary-face index
/// for the u_V boundary monitor, unused for the mass identity).
struct Violation {
  std::string monitor;
  long step = 0;
  Species species = Species::C;
  std::size_t cell = 0;
  double magnitude = 0.0;
  double tolerance = 0.0;
  MonitorMode mode = MonitorMode::hard;
  std::size_t count = 1;  // offending cells of this species
};

/// One violation per species holding a value below -negativity_tolerance.
std::vector<Violation> check_nonnegativity(const StateFields& state, const MonitorConfig& cfg, long step = 0);

/// u_A > M_A (1 + tol) or u_V > M_V (1 + tol); species without a certificate are skipped.
/// Magnitude is the relative excess u / M - 1.
std::vector<Violation> check_ceilings(const StateFields& state, const BoundCertificates& certs,
                                      const MonitorConfig& cfg, long step = 0);

/// Boundary faces where |boundary_normal_difference(u_V)| > boundary_tolerance.
std::vector<Violation> check_uV_boundary(const StateFields& state, const MonitorConfig& cfg, long step = 0);

/// Integrated nonlinear loss of u_N:
/// int alpha_21 u_N g(u_C) + (mu_N/K_N) u_N^2 - (mu_N - delta_N) int u_N.
double l1_loss(const StateFields& state, const ModelParams& params);

/// |(int u_N(next) - int u_N(prev)) / dt + (loss(prev) + loss(next)) / 2|.
/// Diffusion and taxis drop out because both conserve mass exactly.
double l1_identity_residual(const StateFields& prev, const StateFields& next, const ModelParams& params, double dt);

std::optional<Violation> check_l1_identity(const StateFields& prev, const StateFields& next,
                                           const ModelParams& params, double dt, const MonitorConfig& cfg,
                                           long step = 0);

/// All monitors with their modes, evaluated on committed states.
class MonitorSet {
 public:
  MonitorSet(MonitorConfig cfg, BoundCertificates certs, ModelParams params)
      : cfg_(cfg), certs_(std::move(certs)), params_(std::move(params)) {}

  std::vector<Violation> initial(const StateFields& state) const;
  std::vector<Violation> after_step(const StateFields& prev, const StateFields& next, double dt, long step) const;

  const MonitorConfig& config() const noexcept { return cfg_; }

 private:
  MonitorConfig cfg_;
  BoundCertificates certs_;
  ModelParams params_;
};

bool has_hard(const std::vector<Violation>& v) noexcept;

}  // namespace upasim
