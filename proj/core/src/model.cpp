#include "upasim/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "upasim/errors.hpp"

namespace upasim {

char tag_of(Species s) noexcept {
  constexpr std::array<char, 6> tags{'C', 'N', 'V', 'A', 'I', 'P'};
  return tags[index_of(s)];
}

std::string_view name_of(Species s) noexcept {
  constexpr std::array<std::string_view, 6> names{"C", "N", "V", "A", "I", "P"};
  return names[index_of(s)];
}

std::optional<Species> species_from_tag(char tag) noexcept {
  for (Species s : kAllSpecies)
    if (tag_of(s) == tag) return s;
  return std::nullopt;
}

std::optional<std::size_t> parabolic_slot(Species s) noexcept {
  switch (s) {
    case Species::C: return 0;
    case Species::N: return 1;
    case Species::A: return 2;
    case Species::I: return 3;
    case Species::P: return 4;
    case Species::V: return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// DiffusionCoefficient

DiffusionCoefficient DiffusionCoefficient::constant(double value) {
  DiffusionCoefficient d;
  d.kind_ = Kind::constant;
  d.value_ = value;
  d.lower_ = value;
  d.upper_ = value;
  return d;
}

DiffusionCoefficient DiffusionCoefficient::separable(const SeparableProfile& p, std::optional<double> lower,
                                                     std::optional<double> upper) {
  DiffusionCoefficient d;
  d.kind_ = Kind::separable;
  d.profile_ = p;
  d.value_ = p.base;
  const double ax = std::abs(p.amp_x);
  const double at = p.omega == 0.0 ? 0.0 : std::abs(p.amp_t);
  d.lower_ = lower.value_or(p.base * (1.0 - ax) * (1.0 - at));
  d.upper_ = upper.value_or(p.base * (1.0 + ax) * (1.0 + at));
  return d;
}

DiffusionCoefficient DiffusionCoefficient::custom(Function f, double lower, double upper) {
  DiffusionCoefficient d;
  d.kind_ = Kind::custom;
  d.fn_ = std::move(f);
  d.lower_ = lower;
  d.upper_ = upper;
  return d;
}

bool DiffusionCoefficient::time_dependent() const noexcept {
  switch (kind_) {
    case Kind::constant: return false;
    case Kind::separable: return profile_.amp_t != 0.0 && profile_.omega != 0.0;
    case Kind::custom: return true;
  }
  return true;
}

double DiffusionCoefficient::evaluate(const Grid& grid, const Point& x, double t) const {
  switch (kind_) {
    case Kind::constant: return value_;
    case Kind::separable: {
      const Point xi = grid.normalized(x);
      double spatial = 1.0;
      for (std::size_t a = 0; a < static_cast<std::size_t>(grid.dim()); ++a)
        spatial *= std::cos(profile_.wavenumber * std::numbers::pi * xi[a]);
      return profile_.base * (1.0 + profile_.amp_x * spatial) * (1.0 + profile_.amp_t * std::sin(profile_.omega * t));
    }
    case Kind::custom: return fn_(x, t);
  }
  return value_;
}

Point DiffusionCoefficient::gradient(const Grid& grid, const Point& x, double t) const {
  Point g{0.0, 0.0, 0.0};
  switch (kind_) {
    case Kind::constant: return g;
    case Kind::separable: {
      const Point xi = grid.normalized(x);
      const auto dim = static_cast<std::size_t>(grid.dim());
      const double k = profile_.wavenumber * std::numbers::pi;
      const double time_factor = 1.0 + profile_.amp_t * std::sin(profile_.omega * t);
      for (std::size_t a = 0; a < dim; ++a) {
        double prod = -k / grid.extents()[a] * std::sin(k * xi[a]);
        for (std::size_t b = 0; b < dim; ++b)
          if (b != a) prod *= std::cos(k * xi[b]);
        g[a] = profile_.base * profile_.amp_x * prod * time_factor;
      }
      return g;
    }
    case Kind::custom: throw ModelError("gradient of a custom diffusion coefficient is not available");
  }
  return g;
}

std::vector<double> DiffusionCoefficient::sample_cells(const Grid& grid, double t) const {
  std::vector<double> d(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double v = evaluate(grid, grid.center(k), t);
    if (!(v >= lower_ && v <= upper_))
      throw ModelError(fmt::format("diffusion coefficient {} at cell {} and t={} is outside [{}, {}]", v, k, t,
                                   lower_, upper_));
    d[k] = v;
  }
  return d;
}

bool DiffusionCoefficient::operator==(const DiffusionCoefficient& o) const {
  if (kind_ != o.kind_ || lower_ != o.lower_ || upper_ != o.upper_) return false;
  switch (kind_) {
    case Kind::constant: return value_ == o.value_;
    case Kind::separable: return profile_ == o.profile_;
    case Kind::custom: return false;  // functions are not comparable
  }
  return false;
}

// ---------------------------------------------------------------------------
// ModelParams

const DiffusionCoefficient& ModelParams::diffusion_of(Species s) const {
  const auto slot = parabolic_slot(s);
  if (!slot) throw ModelError("vitronectin has no diffusion coefficient");
  return diffusion[*slot];
}

DiffusionCoefficient& ModelParams::diffusion_of(Species s) {
  const auto slot = parabolic_slot(s);
  if (!slot) throw ModelError("vitronectin has no diffusion coefficient");
  return diffusion[*slot];
}

// ---------------------------------------------------------------------------
// validate

namespace {

double max_abs(const Field& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0)) throw ValidationError(fmt::format("{} must be >= 0 (got {})", name, v), name, v);
}

}  // namespace

BoundCertificates validate(const ModelParams& p, const InitialFields& init, Regime regime) {
  const Grid& grid = init[0].grid;
  for (const Field& f : init)
    if (!(f.grid == grid)) throw ShapeError("initial fields are not sampled on a common grid");

  // Ellipticity
  for (Species s : kParabolicSpecies) {
    const auto& d = p.diffusion_of(s);
    const auto name = fmt::format("d_{}", name_of(s));
    if (!(d.lower() > 0.0))
      throw EllipticityError(fmt::format("ellipticity violated: lower bound of {} must be positive (got {})", name, d.lower()),
                             name + " lower bound", d.lower());
    if (!(d.lower() <= d.upper()))
      throw EllipticityError(
          fmt::format("ellipticity violated: bounds of {} are inverted ([{}, {}])", name, d.lower(), d.upper()),
          name + " bounds", d.upper() - d.lower());
    try {
      (void)d.sample_cells(grid, 0.0);
    } catch (const ModelError& e) {
      throw EllipticityError(fmt::format("ellipticity violated for {}: {}", name, e.what()), name, 0.0);
    }
  }

  // sign constraints on the reaction coefficients
  const auto& a = p.alpha;
  const std::array<std::pair<double, const char*>, 11> alphas{{{a.a11, "alpha_11"}, {a.a21, "alpha_21"},
                                                               {a.a31, "alpha_31"}, {a.a32, "alpha_32"},
                                                               {a.a33, "alpha_33"}, {a.a41, "alpha_41"},
                                                               {a.a42, "alpha_42"}, {a.a51, "alpha_51"},
                                                               {a.a52, "alpha_52"}, {a.a61, "alpha_61"},
                                                               {a.a62, "alpha_62"}}};
  for (const auto& [v, name] : alphas) require_nonnegative(v, name);
  require_nonnegative(p.delta.C, "delta_C");
  require_nonnegative(p.delta.N, "delta_N");
  require_nonnegative(p.delta.P, "delta_P");
  for (const auto& [v, name] : std::array<std::pair<double, const char*>, 3>{{{p.K.C, "K_C"}, {p.K.N, "K_N"}, {p.K.V, "K_V"}}})
    if (!(v > 0.0)) throw ValidationError(fmt::format("{} must be > 0 (got {})", name, v), name, v);
  if (!(p.epsilon_reg >= 0.0 && p.epsilon_reg < 1.0))
    throw ValidationError(fmt::format("epsilon_reg must lie in [0, 1) (got {})", p.epsilon_reg), "epsilon_reg",
                          p.epsilon_reg);

  // Non-negative initial data
  for (Species s : kAllSpecies) {
    const Field& f = init[index_of(s)];
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (!(f[k] >= 0.0))
        throw NegativeInitialDataError(
            fmt::format("negative initial data: initial u_{} is {} at cell {}", name_of(s), f[k], k),
            fmt::format("u_{}0", name_of(s)), f[k]);
    }
  }

  BoundCertificates cert;

  // Reaction balance
  cert.h4_margin = 4.0 * a.a21 * p.mu.C / p.K.C - a.a11 * a.a11;
  if (!(cert.h4_margin > 0.0))
    throw ReactionBalanceError(
        fmt::format("reaction balance violated: alpha_11^2 < 4 alpha_21 mu_C / K_C fails with margin {}", cert.h4_margin),
        "h4_margin", cert.h4_margin);

  // chi condition
  const double chi_sum = p.chi[0][0] + p.chi[1][0];
  cert.chi_margin =
      4.0 * p.diffusion_of(Species::C).lower() * p.diffusion_of(Species::N).lower() - chi_sum * chi_sum;
  cert.chi_enforced = regime == Regime::strict;
  if (!(cert.chi_margin > 0.0)) {
    const auto msg = fmt::format("(chi_11 + chi_21)^2 < 4 d_C^(0) d_N^(0) fails with margin {}", cert.chi_margin);
    if (regime == Regime::strict) throw ChiConditionError(msg, "chi_margin", cert.chi_margin);
    cert.warnings.push_back(msg);
  }

  // L-infinity ceilings
  if (a.a42 > 0.0) cert.max_uA = std::max(max_abs(init[index_of(Species::A)]), p.mu.A / a.a42);
  else cert.warnings.push_back("alpha_42 = 0: no ceiling for u_A, monitor disabled");

  // At u_V = M the right-hand side of the u_V equation is <= 0 once M >= (alpha_33/alpha_32) M_A
  // and, when mu_V > 0, M >= K_V; the K_V term is needed for the logistic part.
  std::optional<double> source_term;
  if (a.a33 == 0.0) source_term = 0.0;
  else if (a.a32 > 0.0 && cert.max_uA) source_term = a.a33 / a.a32 * *cert.max_uA;
  if (source_term) {
    double m = std::max(max_abs(init[index_of(Species::V)]), *source_term);
    if (p.mu.V > 0.0) m = std::max(m, p.K.V);
    cert.max_uV = m;
  } else {
    cert.warnings.push_back("alpha_32 = 0 or no u_A ceiling: no ceiling for u_V, monitor disabled");
  }
  return cert;
}

// ---------------------------------------------------------------------------
// reaction terms

double reaction(Species species, const LocalState& u, const ModelParams& p) noexcept {
  const double uC = u[0], uN = u[1], uV = u[2], uA = u[3], uI = u[4], uP = u[5];
  const auto& a = p.alpha;
  const double recruited = p.epsilon_reg > 0.0 ? uC / (1.0 + p.epsilon_reg * uC) : uC;
  switch (species) {
    case Species::C:
      return a.a11 * uN * recruited + p.mu.C * uC * (1.0 - uC / p.K.C) - p.delta.C * uC;
    case Species::N:
      return -a.a21 * uN * recruited + p.mu.N * uN * (1.0 - uN / p.K.N) - p.delta.N * uN;
    case Species::V:
      return -a.a31 * uV * uP - a.a32 * uV * uI + a.a33 * uA * uI + p.mu.V * uV * (1.0 - uV / p.K.V);
    case Species::A:
      return -a.a41 * uA * uI - a.a42 * uA * uC + p.mu.A * uC;
    case Species::I:
      return -a.a51 * uI * uA - a.a52 * uI * uV + p.mu.I * uP;
    case Species::P:
      return a.a61 * uC * uA + a.a62 * uV * uI - p.delta.P * uP;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// drift

FaceField::FaceField(const Grid& g) : grid(g) {
  for (int a = 0; a < g.dim(); ++a) axis[static_cast<std::size_t>(a)].assign(g.size(), 0.0);
}

FaceField drift_vector(Species species, std::span<const FaceGradient, 4> gradients, const ModelParams& p) {
  if (species != Species::C && species != Species::N)
    throw ModelError(fmt::format("no drift vector for species {}", name_of(species)));
  const Grid& grid = gradients[0].grid;
  for (const auto& g : gradients)
    if (!(g.grid == grid)) throw ShapeError("drift_vector: gradients live on different grids");
  const auto& coef = p.chi[species == Species::C ? 0 : 1];
  FaceField w(grid);
  for (std::size_t a = 0; a < static_cast<std::size_t>(grid.dim()); ++a) {
    auto& out = w.axis[a];
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] = coef[0] * gradients[0].axis[a][k] + coef[1] * gradients[1].axis[a][k] +
               coef[2] * gradients[2].axis[a][k] + coef[3] * gradients[3].axis[a][k];
  }
  return w;
}

}  // namespace upasim
