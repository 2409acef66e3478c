#pragma once

#include <array>

#include "upasim/grid.hpp"
#include "upasim/model.hpp"

namespace upasim {

/// u_C, u_N, u_V, u_A, u_I, u_P at one time level, all on one grid.
struct StateFields {
  std::array<Field, 6> fields;
  double t = 0.0;

  StateFields() = default;
  StateFields(std::array<Field, 6> f, double time);

  /// Every species spatially constant.
  static StateFields uniform(const Grid& grid, const LocalState& values, double time = 0.0);

  Field& operator[](Species s) noexcept { return fields[index_of(s)]; }
  const Field& operator[](Species s) const noexcept { return fields[index_of(s)]; }
  const Grid& grid() const noexcept { return fields[0].grid; }

  LocalState at(std::size_t k) const noexcept {
    return {fields[0][k], fields[1][k], fields[2][k], fields[3][k], fields[4][k], fields[5][k]};
  }
  bool all_finite() const noexcept;
};

}  // namespace upasim
