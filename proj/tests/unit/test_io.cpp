#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <string>

#include "helpers.hpp"
#include "upasim/errors.hpp"
#include "upasim/io/config.hpp"
#include "upasim/io/run_directory.hpp"
#include "upasim/io/series.hpp"
#include "upasim/io/snapshot.hpp"
#include "upasim/run.hpp"

using namespace upasim;
using namespace upasim::io;
using namespace upasim::test;

namespace {

const std::string kMinimal = R"(
[grid]
dim = 1
extents = 2
cells = 10

[time]
t_end = 0.1
dt = 0.01
)";

int config_error_line(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("upasim_unit_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("minimal config takes defaults") {
  const RunConfig c = parse_config(kMinimal);
  CHECK(c.grid.dim == 1);
  CHECK(c.grid.extents[0] == 2.0);
  CHECK(c.grid.cells[0] == 10);
  CHECK(c.dt == 0.01);
  CHECK(c.scheme.taxis == TaxisScheme::central);
  CHECK(c.regime == Regime::strict);
  CHECK(c.monitors.negativity == MonitorMode::hard);
  CHECK(c.output.snapshot_every == 0);
  CHECK(c.params.diffusion_of(Species::C).value() == 1.0);
}

TEST_CASE("config errors carry line numbers") {
  CHECK(config_error_line(kMinimal + "[taxis]\nchii_11 = 1\n") == 11);
  CHECK(config_error_line(kMinimal + "[taxis]\nchi_11 = 1\nchi_11 = 2\n") == 12);
  CHECK(config_error_line(kMinimal + "[bogus]\nx = 1\n") == 11);
  CHECK(config_error_line(kMinimal + "[scheme]\ntaxis = sideways\n") == 11);
  CHECK(config_error_line(kMinimal + "[time]\nt_end = 1\n") == 10);
  CHECK_THROWS_AS(parse_config("[time]\nt_end = 1\ndt = 0.1\n"), ConfigError);
  CHECK(config_error_line("[grid]\ndim = 4\nextents = 1\ncells = 3\n[time]\nt_end = 1\ndt = 0.1\n") == 2);
}

TEST_CASE("serialized config parses back to the same value") {
  RunConfig c = load_config(std::filesystem::path(UPASIM_CONFIG_DIR) / "reference_strict.ini");
  RunConfig back = parse_config(serialize_config(c));
  back.certificates = c.certificates;
  CHECK(back == c);
}

TEST_CASE("load_config runs the model validation") {
  const auto dir = scratch_dir("validation");
  std::filesystem::create_directories(dir);
  const auto path = dir / "bad.ini";
  {
    // d_C = d_N = 0.01 with chi_11 + chi_21 = 1 breaks the strict taxis condition.
    std::string text = kMinimal +
                       "[diffusion.C]\nvalue = 0.01\n[diffusion.N]\nvalue = 0.01\n"
                       "[taxis]\nchi_11 = 0.5\nchi_21 = 0.5\n"
                       "[reaction]\nalpha_21 = 1\nmu_C = 1\n"
                       "[initial.C]\nvalue = 0.5\n[initial.N]\nvalue = 0.5\n";
    write_file_atomic(path, text);
  }
  CHECK_THROWS_AS(load_config(path), ValidationError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("snapshot encoding") {
  const Grid g = grid2(3, 4);
  const Field f = sample(g, [](const Point& x) { return x[0] + 10 * x[1]; });
  const std::string bytes = encode_snapshot(f, 0.25, Species::V);
  CHECK(bytes.size() == kSnapshotHeaderBytes + 12 * sizeof(double));
  CHECK(bytes.substr(0, 4) == "UPAS");
  const Snapshot s = decode_snapshot(bytes);
  CHECK(s.header.species == Species::V);
  CHECK(s.header.time == 0.25);
  CHECK(s.header.cells == std::array<std::uint32_t, 3>{3, 4, 1});
  CHECK(s.to_field(g).values == f.values);
  CHECK_THROWS_AS(s.to_field(grid2(4, 3)), ShapeError);

  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_snapshot(bad), FormatError);
  bad = bytes;
  const std::uint32_t next = kSnapshotVersion + 1;
  std::memcpy(bad.data() + 4, &next, sizeof next);
  CHECK_THROWS_AS(decode_snapshot(bad), UnsupportedVersionError);
  CHECK_THROWS_AS(decode_snapshot(bytes.substr(0, bytes.size() - 3)), FormatError);
  CHECK_THROWS_AS(decode_snapshot(bytes + "x"), FormatError);
  CHECK_THROWS_AS(decode_snapshot(bytes.substr(0, 20)), FormatError);
}

TEST_CASE("random fields survive the file round trip bit for bit") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> value(-1e3, 1e3);
  const auto dir = scratch_dir("snapshots");
  std::filesystem::create_directories(dir);
  for (int trial = 0; trial < 20; ++trial) {
    const Grid g = grid3(3 + trial % 4);
    Field f(g);
    for (double& v : f.values) v = value(rng);
    f.values[0] = std::numeric_limits<double>::denorm_min();
    f.values[1] = -0.0;
    write_snapshot(dir / "f.upas", f, 0.125 * trial, Species::N);
    const Snapshot s = read_snapshot(dir / "f.upas");
    REQUIRE(s.values.size() == f.values.size());
    CHECK(std::memcmp(s.values.data(), f.values.data(), f.values.size() * sizeof(double)) == 0);
    CHECK(s.header.time == 0.125 * trial);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("run directory round trip") {
  const auto dir = scratch_dir("rundir");
  RunConfig c = parse_config(kMinimal + "[reaction]\nalpha_21 = 1\nmu_C = 1\n"
                                        "[initial.C]\nprofile = linear\nvalue = 0.2\namplitude = 0.3\n"
                                        "[initial.N]\nvalue = 0.5\n[output]\nsnapshot_every = 4\n");
  const InitialFields init = make_initial_fields(c);
  c.certificates = validate(c.params, init, c.regime);
  RunDirectorySink sink(dir, c);
  OutputSink* sinks[] = {&sink};
  RunOptions options;
  options.scheme = c.scheme;
  options.monitors = c.monitors;
  const RunResult r = run(StateFields(init, 0.0), c.params, c.certificates, TimeWindow(c.t_end, c.dt), options, sinks);
  CHECK(r.steps_completed == 10);

  const RunMetadata meta = read_metadata(dir);
  REQUIRE(meta.snapshots.size() == 4);  // steps 0, 4, 8 and the final 10
  CHECK(meta.snapshots.back().step == 10);
  CHECK(meta.grid == c.grid);

  const FieldHistory h = load_history(dir, {Species::C, Species::N});
  CHECK(h.samples() == 4);
  const auto last = h.values(Species::C, 3);
  for (std::size_t k = 0; k < last.size(); ++k) CHECK(last[k] == r.final_state[Species::C][k]);
  CHECK(load_history(dir, {Species::C}, 2).samples() == 2);

  const std::string series = read_file(dir / "series.csv");
  CHECK(series.rfind("t,", 0) == 0);
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "violations.csv"));

  std::filesystem::remove(dir / "metadata.json");
  CHECK_THROWS_AS(read_metadata(dir), FormatError);
  std::filesystem::remove_all(dir);
}
