#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "upasim/model.hpp"
#include "upasim/monitors.hpp"
#include "upasim/stepper.hpp"

namespace upasim::io {

struct GridSpec {
  int dim = 1;
  std::array<double, 3> extents{1.0, 1.0, 1.0};
  std::array<int, 3> cells{3, 3, 3};
  bool operator==(const GridSpec&) const = default;
};

Grid make_grid(const GridSpec& spec);

/// Builtin initial profiles. xi is the position rescaled to [0,1], r = |x - center|.
///   constant: value
///   gaussian: value + amplitude exp(-r^2 / (2 width^2))
///   cosine:   value + amplitude prod_a cos(wavenumber pi xi_a)
///   bump:     value + amplitude exp(1 - 1/(1 - (r/width)^2)) for r < width, else value
///   linear:   value + amplitude xi_0
///   file:     snapshot at `path`
struct InitialSpec {
  enum class Profile { constant, gaussian, cosine, bump, linear, file };
  Profile profile = Profile::constant;
  double value = 0.0;
  double amplitude = 0.0;
  std::array<double, 3> center{0.5, 0.5, 0.5};
  double width = 0.1;
  double wavenumber = 1.0;
  std::string path;
  bool operator==(const InitialSpec&) const = default;
};

struct OutputSpec {
  std::string directory = "run";
  /// Snapshot cadence in steps; 0 keeps only the initial and final states.
  long snapshot_every = 0;
  bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
  GridSpec grid;
  double t_end = 1.0;
  double dt = 1e-3;
  ModelParams params;
  std::array<InitialSpec, 6> initial{};  // storage order
  SchemeOptions scheme;
  Regime regime = Regime::strict;
  MonitorConfig monitors;
  OutputSpec output;
  std::uint64_t seed = 0;
  /// Filled by load_config from the model validation.
  BoundCertificates certificates;

  bool operator==(const RunConfig&) const = default;
};

/// Parses the INI-style text. Relative `path` entries are resolved against `base_dir`.
/// Throws ConfigError (with line number) on syntax errors, unknown sections or keys,
/// duplicate keys, bad values or missing required keys. No model validation.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

/// Reads and parses `path`, samples the initial data and runs `validate`, storing
/// the certificates in the result. Validation failures throw ValidationError subclasses.
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(serialize_config(c)) == c up to certificates.
std::string serialize_config(const RunConfig& config);

/// Samples every species' initial profile on the config's grid.
InitialFields make_initial_fields(const RunConfig& config);

std::string_view to_string(TaxisScheme s) noexcept;
std::string_view to_string(Regime r) noexcept;

}  // namespace upasim::io
