#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "upasim/grid.hpp"

namespace upasim {

/// The six unknowns, in storage order.
enum class Species : int { C = 0, N = 1, V = 2, A = 3, I = 4, P = 5 };

inline constexpr std::array<Species, 6> kAllSpecies{Species::C, Species::N, Species::V,
                                                    Species::A, Species::I, Species::P};
/// Species governed by a parabolic equation (all but vitronectin).
inline constexpr std::array<Species, 5> kParabolicSpecies{Species::C, Species::N, Species::A,
                                                          Species::I, Species::P};

constexpr std::size_t index_of(Species s) noexcept { return static_cast<std::size_t>(s); }
char tag_of(Species s) noexcept;
std::string_view name_of(Species s) noexcept;
/// Inverse of tag_of; nullopt for an unknown character.
std::optional<Species> species_from_tag(char tag) noexcept;
/// Slot of a parabolic species in a 5-element array; V has none.
std::optional<std::size_t> parabolic_slot(Species s) noexcept;

/// Parameters of d(x,t) = base * (1 + amp_x * prod_i cos(k pi xi_i)) * (1 + amp_t * sin(omega t)),
/// with xi the position rescaled to [0,1] on the grid's box.
struct SeparableProfile {
  double base = 1.0;
  double amp_x = 0.0;
  double wavenumber = 1.0;
  double amp_t = 0.0;
  double omega = 0.0;
  bool operator==(const SeparableProfile&) const = default;
};

/// Diffusivity d_i(x,t) with declared ellipticity bounds [lower, upper].
class DiffusionCoefficient {
 public:
  enum class Kind { constant, separable, custom };
  using Function = std::function<double(const Point&, double)>;

  DiffusionCoefficient() = default;  // constant 1

  static DiffusionCoefficient constant(double value);
  /// Bounds default to the envelope base (1 -+ |amp_x|)(1 -+ |amp_t|).
  static DiffusionCoefficient separable(const SeparableProfile& p, std::optional<double> lower = {},
                                        std::optional<double> upper = {});
  /// Arbitrary function of (x, t); not serializable.
  static DiffusionCoefficient custom(Function f, double lower, double upper);

  Kind kind() const noexcept { return kind_; }
  double value() const noexcept { return value_; }
  const SeparableProfile& profile() const noexcept { return profile_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  bool time_dependent() const noexcept;

  /// Raw evaluation, no bounds check.
  double evaluate(const Grid& grid, const Point& x, double t) const;
  /// Spatial gradient; throws for custom coefficients.
  Point gradient(const Grid& grid, const Point& x, double t) const;

  /// Cell-center samples at time t. Throws ModelError naming the cell when a
  /// sample leaves [lower, upper].
  std::vector<double> sample_cells(const Grid& grid, double t) const;

  bool operator==(const DiffusionCoefficient& o) const;

 private:
  Kind kind_ = Kind::constant;
  double value_ = 1.0;
  SeparableProfile profile_{};
  Function fn_{};
  double lower_ = 1.0;
  double upper_ = 1.0;
};

/// Interaction coefficients alpha_ij of the reaction terms.
struct InteractionRates {
  double a11 = 0, a21 = 0, a31 = 0, a32 = 0, a33 = 0, a41 = 0, a42 = 0, a51 = 0, a52 = 0, a61 = 0,
         a62 = 0;
  bool operator==(const InteractionRates&) const = default;
};

struct ProliferationRates {
  double C = 0, N = 0, V = 0, A = 0, I = 0;
  bool operator==(const ProliferationRates&) const = default;
};

struct Capacities {
  double C = 1, N = 1, V = 1;
  bool operator==(const Capacities&) const = default;
};

struct DegradationRates {
  double C = 0, N = 0, P = 0;
  bool operator==(const DegradationRates&) const = default;
};

/// Every coefficient of the six-species model.
struct ModelParams {
  /// Indexed by parabolic_slot(): C, N, A, I, P.
  std::array<DiffusionCoefficient, 5> diffusion{};
  /// chi[0][j] multiplies grad(u_N, u_A, u_I, u_V)[j] for C; chi[1][j] multiplies
  /// grad(u_C, u_A, u_I, u_V)[j] for N.
  std::array<std::array<double, 4>, 2> chi{};
  InteractionRates alpha{};
  ProliferationRates mu{};
  Capacities K{};
  DegradationRates delta{};
  /// Regularization of the recruitment products: u_C -> u_C / (1 + eps u_C). Zero disables it.
  double epsilon_reg = 0.0;

  const DiffusionCoefficient& diffusion_of(Species s) const;
  DiffusionCoefficient& diffusion_of(Species s);
  double chi_at(int row, int col) const noexcept {  // 1-based, as in chi_11 .. chi_24
    return chi[static_cast<std::size_t>(row - 1)][static_cast<std::size_t>(col - 1)];
  }

  bool operator==(const ModelParams&) const = default;
};

/// Whether the (chi_11 + chi_21)^2 < 4 d_C^(0) d_N^(0) condition is an error or a warning.
enum class Regime { strict, exploratory };

/// Outcome of `validate`. A missing ceiling means the argument that produces it
/// does not apply (zero denominator); the matching monitor is then disabled.
struct BoundCertificates {
  std::optional<double> max_uA;
  std::optional<double> max_uV;
  double h4_margin = 0.0;
  double chi_margin = 0.0;
  bool chi_enforced = true;
  std::vector<std::string> warnings;

  bool operator==(const BoundCertificates&) const = default;
};

/// Initial data, one field per species in storage order.
using InitialFields = std::array<Field, 6>;

/// Checks ellipticity bounds, non-negative initial data, alpha_11^2 < 4 alpha_21 mu_C / K_C
/// and, in the strict regime, the chi condition. Also checks the sign constraints
/// on alpha, K and delta. Throws the matching ValidationError subclass.
BoundCertificates validate(const ModelParams& params, const InitialFields& init,
                           Regime regime = Regime::strict);

/// max{0, min{u, 1}}.
constexpr double clamp_B(double u) noexcept { return u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u); }

/// Pointwise values of all six species, storage order.
using LocalState = std::array<double, 6>;

/// Zeroth-order right-hand side of the species' equation at one point.
double reaction(Species species, const LocalState& u, const ModelParams& params) noexcept;

/// Face-centered vector field: per active axis, entry k is the face between cell k
/// and its +axis neighbour. Entries on the high boundary stand for boundary faces
/// and low-boundary faces are implicit; both are zero under the reflection rule.
struct FaceField {
  Grid grid;
  std::array<std::vector<double>, 3> axis;

  FaceField() = default;
  explicit FaceField(const Grid& g);
};

using FaceGradient = FaceField;

/// W_C = chi_11 grad u_N + chi_12 grad u_A + chi_13 grad u_I + chi_14 grad u_V for C, and
/// W_N = chi_21 grad u_C + ... for N. `gradients` holds the four partner gradients in that order.
FaceField drift_vector(Species species, std::span<const FaceGradient, 4> gradients,
                       const ModelParams& params);

}  // namespace upasim
