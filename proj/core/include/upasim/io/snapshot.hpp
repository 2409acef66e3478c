#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "upasim/grid.hpp"
#include "upasim/model.hpp"

namespace upasim::io {

/// Layout, all little-endian:
///   0  char[4]  "UPAS"
///   4  u32      format version
///   8  u32      dim
///   12 u32[3]   cells per axis (1 on inactive axes)
///   24 f64      time
///   32 u8       species tag ('C', 'N', 'V', 'A', 'I', 'P')
///   33 u8[7]    zero
///   40 f64[n]   values in canonical cell order
inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 40;

struct SnapshotHeader {
  std::uint32_t version = kSnapshotVersion;
  std::uint32_t dim = 1;
  std::array<std::uint32_t, 3> cells{1, 1, 1};
  double time = 0.0;
  Species species = Species::C;
  bool operator==(const SnapshotHeader&) const = default;
};

struct Snapshot {
  SnapshotHeader header;
  std::vector<double> values;

  /// ShapeError unless `grid` has the header's dim and cell counts.
  Field to_field(const Grid& grid) const;
};

std::string encode_snapshot(const Field& field, double time, Species species);
/// FormatError on bad magic or truncated/oversized payload, UnsupportedVersionError on
/// an unknown version.
Snapshot decode_snapshot(std::string_view bytes);

/// Writes to a temporary sibling and renames it into place.
void write_snapshot(const std::filesystem::path& path, const Field& field, double time, Species species);
Snapshot read_snapshot(const std::filesystem::path& path);

/// Atomic whole-file text write (temporary sibling, then rename).
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace upasim::io
