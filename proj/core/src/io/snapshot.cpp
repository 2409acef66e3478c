#include "upasim/io/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "upasim/errors.hpp"

namespace upasim::io {
namespace {

constexpr char kMagic[4] = {'U', 'P', 'A', 'S'};

template <class T>
void put_le(std::string& out, T v) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = std::bit_cast<U>(v);
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>(bits & 0xffu));
    bits >>= 8;
  }
}

template <class T>
T get_le(std::string_view in, std::size_t offset) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = 0;
  for (std::size_t i = sizeof(U); i-- > 0;) bits = (bits << 8) | static_cast<unsigned char>(in[offset + i]);
  return std::bit_cast<T>(bits);
}

}  // namespace

Field Snapshot::to_field(const Grid& grid) const {
  if (static_cast<int>(header.dim) != grid.dim())
    throw ShapeError(fmt::format("snapshot has dim {}, grid has dim {}", header.dim, grid.dim()));
  for (std::size_t a = 0; a < 3; ++a)
    if (static_cast<int>(header.cells[a]) != grid.cells()[a])
      throw ShapeError(fmt::format("snapshot has {} cells on axis {}, grid has {}", header.cells[a], a,
                                   grid.cells()[a]));
  return Field(grid, values);
}

std::string encode_snapshot(const Field& field, double time, Species species) {
  const Grid& g = field.grid;
  std::string out;
  out.reserve(kSnapshotHeaderBytes + 8 * field.size());
  out.append(kMagic, 4);
  put_le<std::uint32_t>(out, kSnapshotVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  for (std::size_t a = 0; a < 3; ++a)
    put_le<std::uint32_t>(out, a < static_cast<std::size_t>(g.dim()) ? static_cast<std::uint32_t>(g.cells()[a]) : 1u);
  put_le<double>(out, time);
  out.push_back(tag_of(species));
  out.append(7, '\0');
  for (double v : field.values) put_le<double>(out, v);
  return out;
}

Snapshot decode_snapshot(std::string_view bytes) {
  if (bytes.size() < kSnapshotHeaderBytes)
    throw FormatError(fmt::format("snapshot truncated: {} bytes, header needs {}", bytes.size(), kSnapshotHeaderBytes));
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("not a snapshot file (bad magic)");
  Snapshot s;
  s.header.version = get_le<std::uint32_t>(bytes, 4);
  if (s.header.version != kSnapshotVersion)
    throw UnsupportedVersionError(fmt::format("unsupported snapshot version {} (this build reads {})",
                                              s.header.version, kSnapshotVersion));
  s.header.dim = get_le<std::uint32_t>(bytes, 8);
  if (s.header.dim < 1 || s.header.dim > 3) throw FormatError(fmt::format("snapshot dim {} out of range", s.header.dim));
  std::size_t n = 1;
  for (std::size_t a = 0; a < 3; ++a) {
    s.header.cells[a] = get_le<std::uint32_t>(bytes, 12 + 4 * a);
    if (s.header.cells[a] == 0) throw FormatError("snapshot has a zero cell count");
    n *= s.header.cells[a];
  }
  s.header.time = get_le<double>(bytes, 24);
  const auto species = species_from_tag(bytes[32]);
  if (!species) throw FormatError(fmt::format("unknown species tag '{}'", bytes[32]));
  s.header.species = *species;
  const std::size_t expected = kSnapshotHeaderBytes + 8 * n;
  if (bytes.size() != expected)
    throw FormatError(fmt::format("snapshot payload is {} bytes, expected {}", bytes.size() - kSnapshotHeaderBytes,
                                  8 * n));
  s.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) s.values[k] = get_le<double>(bytes, kSnapshotHeaderBytes + 8 * k);
  return s;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write '{}'", tmp.string()));
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(fmt::format("short write to '{}'", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_snapshot(const std::filesystem::path& path, const Field& field, double time, Species species) {
  write_file_atomic(path, encode_snapshot(field, time, species));
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  try {
    return decode_snapshot(read_file(path));
  } catch (const FormatError& e) {
    if (dynamic_cast<const UnsupportedVersionError*>(&e)) throw UnsupportedVersionError(fmt::format("{}: {}", path.string(), e.what()));
    throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace upasim::io
