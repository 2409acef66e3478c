#include "upasim/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "upasim/summation.hpp"

namespace upasim {

std::string_view to_string(MonitorMode m) noexcept {
  switch (m) {
    case MonitorMode::hard: return "hard";
    case MonitorMode::warn: return "warn";
    case MonitorMode::off: return "off";
  }
  return "off";
}

std::optional<MonitorMode> monitor_mode_from_string(std::string_view s) noexcept {
  if (s == "hard") return MonitorMode::hard;
  if (s == "warn") return MonitorMode::warn;
  if (s == "off") return MonitorMode::off;
  return std::nullopt;
}

std::vector<Violation> check_nonnegativity(const StateFields& state, const MonitorConfig& cfg, long step) {
  std::vector<Violation> out;
  for (Species s : kAllSpecies) {
    const auto& v = state[s].values;
    Violation worst{"nonnegativity", step, s, 0, 0.0, cfg.negativity_tolerance, cfg.negativity, 0};
    for (std::size_t k = 0; k < v.size(); ++k) {
      // NaN counts as a violation: it is certainly not >= -tol.
      if (!(v[k] >= -cfg.negativity_tolerance)) {
        ++worst.count;
        const double mag = std::isnan(v[k]) ? std::numeric_limits<double>::infinity() : -v[k];
        if (worst.count == 1 || mag > worst.magnitude) {
          worst.magnitude = mag;
          worst.cell = k;
        }
      }
    }
    if (worst.count > 0) out.push_back(worst);
  }
  return out;
}

std::vector<Violation> check_ceilings(const StateFields& state, const BoundCertificates& certs,
                                      const MonitorConfig& cfg, long step) {
  std::vector<Violation> out;
  auto check = [&](Species s, const std::optional<double>& ceiling) {
    if (!ceiling) return;
    const double M = *ceiling;
    const double limit = M * (1.0 + cfg.ceiling_tolerance);
    const auto& v = state[s].values;
    Violation worst{"ceiling", step, s, 0, 0.0, cfg.ceiling_tolerance, cfg.ceilings, 0};
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!(v[k] <= limit)) {
        ++worst.count;
        const double mag = M > 0.0 ? v[k] / M - 1.0 : std::numeric_limits<double>::infinity();
        if (worst.count == 1 || mag > worst.magnitude) {
          worst.magnitude = std::isnan(mag) ? std::numeric_limits<double>::infinity() : mag;
          worst.cell = k;
        }
      }
    }
    if (worst.count > 0) out.push_back(worst);
  };
  check(Species::A, certs.max_uA);
  check(Species::V, certs.max_uV);
  return out;
}

std::vector<Violation> check_uV_boundary(const StateFields& state, const MonitorConfig& cfg, long step) {
  const auto d = boundary_normal_difference(state[Species::V]);
  Violation worst{"uv_boundary", step, Species::V, 0, 0.0, cfg.boundary_tolerance, cfg.uv_boundary, 0};
  for (std::size_t f = 0; f < d.size(); ++f) {
    const double mag = std::isnan(d[f]) ? std::numeric_limits<double>::infinity() : std::abs(d[f]);
    if (mag > cfg.boundary_tolerance) {
      ++worst.count;
      if (worst.count == 1 || mag > worst.magnitude) {
        worst.magnitude = mag;
        worst.cell = f;
      }
    }
  }
  if (worst.count == 0) return {};
  return {worst};
}

namespace {

struct MassTerms {
  double mass;
  double loss;
  double scale;  // sum of the magnitudes entering `loss`
};

MassTerms mass_terms(const StateFields& state, const ModelParams& p) {
  const auto& uN = state[Species::N].values;
  const auto& uC = state[Species::C].values;
  CompensatedSum mass, recruit, crowd;
  for (std::size_t k = 0; k < uN.size(); ++k) {
    const double g = p.epsilon_reg > 0.0 ? uC[k] / (1.0 + p.epsilon_reg * uC[k]) : uC[k];
    mass.add(uN[k]);
    recruit.add(p.alpha.a21 * uN[k] * g);
    crowd.add(p.mu.N / p.K.N * uN[k] * uN[k]);
  }
  const double vol = state.grid().cell_volume();
  const double m = mass.value() * vol;
  const double a = recruit.value() * vol;
  const double b = crowd.value() * vol;
  const double c = (p.mu.N - p.delta.N) * m;
  return {m, a + b - c, std::abs(a) + std::abs(b) + std::abs(c) + std::abs(m)};
}

}  // namespace

double l1_loss(const StateFields& state, const ModelParams& params) { return mass_terms(state, params).loss; }

double l1_identity_residual(const StateFields& prev, const StateFields& next, const ModelParams& params,
                            double dt) {
  const MassTerms a = mass_terms(prev, params);
  const MassTerms b = mass_terms(next, params);
  return std::abs((b.mass - a.mass) / dt + 0.5 * (a.loss + b.loss));
}

std::optional<Violation> check_l1_identity(const StateFields& prev, const StateFields& next,
                                           const ModelParams& params, double dt, const MonitorConfig& cfg,
                                           long step) {
  const MassTerms a = mass_terms(prev, params);
  const MassTerms b = mass_terms(next, params);
  const double residual = std::abs((b.mass - a.mass) / dt + 0.5 * (a.loss + b.loss));
  const double tol = cfg.l1_identity_factor * dt * std::max({1.0, a.scale, b.scale});
  if (residual <= tol) return std::nullopt;
  return Violation{"l1_identity", step, Species::N, 0, std::isnan(residual) ? 1e308 : residual, tol,
                   cfg.l1_identity, 1};
}

std::vector<Violation> MonitorSet::initial(const StateFields& state) const {
  std::vector<Violation> out;
  if (cfg_.negativity != MonitorMode::off) out = check_nonnegativity(state, cfg_, 0);
  if (cfg_.ceilings != MonitorMode::off) {
    auto v = check_ceilings(state, certs_, cfg_, 0);
    out.insert(out.end(), v.begin(), v.end());
  }
  if (cfg_.uv_boundary != MonitorMode::off) {
    auto v = check_uV_boundary(state, cfg_, 0);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

std::vector<Violation> MonitorSet::after_step(const StateFields& prev, const StateFields& next, double dt,
                                              long step) const {
  std::vector<Violation> out;
  if (cfg_.negativity != MonitorMode::off) out = check_nonnegativity(next, cfg_, step);
  if (cfg_.ceilings != MonitorMode::off) {
    auto v = check_ceilings(next, certs_, cfg_, step);
    out.insert(out.end(), v.begin(), v.end());
  }
  if (cfg_.uv_boundary != MonitorMode::off) {
    auto v = check_uV_boundary(next, cfg_, step);
    out.insert(out.end(), v.begin(), v.end());
  }
  if (cfg_.l1_identity != MonitorMode::off)
    if (auto v = check_l1_identity(prev, next, params_, dt, cfg_, step)) out.push_back(*v);
  return out;
}

bool has_hard(const std::vector<Violation>& v) noexcept {
  return std::any_of(v.begin(), v.end(), [](const Violation& x) { return x.mode == MonitorMode::hard; });
}

}  // namespace upasim
