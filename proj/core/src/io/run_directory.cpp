#include "upasim/io/run_directory.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include "upasim/errors.hpp"
#include "upasim/io/series.hpp"
#include "upasim/io/snapshot.hpp"
#include "upasim/parallel.hpp"
#include "upasim/version.hpp"

namespace upasim::io {
namespace {

using json = nlohmann::ordered_json;

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json certificates_json(const BoundCertificates& c) {
  return json{{"M_A", optional_number(c.max_uA)},
              {"M_V", optional_number(c.max_uV)},
              {"h4_margin", c.h4_margin},
              {"chi_margin", c.chi_margin},
              {"chi_enforced", c.chi_enforced},
              {"warnings", c.warnings}};
}

json violation_json(const Violation& v) {
  return json{{"monitor", v.monitor},     {"step", v.step},           {"species", std::string(name_of(v.species))},
              {"cell", v.cell},           {"magnitude", v.magnitude}, {"tolerance", v.tolerance},
              {"mode", to_string(v.mode)}, {"count", v.count}};
}

}  // namespace

RunDirectorySink::RunDirectorySink(std::filesystem::path directory, RunConfig config)
    : dir_(std::move(directory)), config_(std::move(config)) {}

void RunDirectorySink::write_state(long step, const StateFields& state, const std::string& prefix) {
  SnapshotEntry e{step, state.t, {}};
  for (Species s : kAllSpecies) {
    const std::string name = fmt::format("{}_{:06}_{}.upas", prefix, step, name_of(s));
    write_snapshot(dir_ / name, state[s], state.t, s);
    e.files[index_of(s)] = name;
  }
  if (prefix == "snap") snapshots_.push_back(std::move(e));
}

void RunDirectorySink::write_metadata() const {
  const TimeWindow window(config_.t_end, config_.dt);
  json snaps = json::array();
  for (const SnapshotEntry& e : snapshots_) {
    json files = json::object();
    for (Species s : kAllSpecies) files[std::string(name_of(s))] = e.files[index_of(s)];
    snaps.push_back(json{{"step", e.step}, {"t", e.t}, {"files", files}});
  }
  std::vector<double> extents, cells;
  for (int a = 0; a < config_.grid.dim; ++a) {
    extents.push_back(config_.grid.extents[static_cast<std::size_t>(a)]);
    cells.push_back(config_.grid.cells[static_cast<std::size_t>(a)]);
  }
  json meta{
      {"format", "upasim-run"},
      {"code_version", kVersion},
      {"grid", {{"dim", config_.grid.dim}, {"extents", extents}, {"cells", cells}}},
      {"time", {{"t_end", config_.t_end}, {"dt", config_.dt}, {"steps", window.steps()}}},
      {"scheme",
       {{"taxis", to_string(config_.scheme.taxis)},
        {"picard_max", config_.scheme.picard_max},
        {"picard_tol", config_.scheme.picard_tol},
        {"linear_tol", config_.scheme.linear_tol},
        {"clip_negative", config_.scheme.clip_negative},
        {"positivity_enforced", config_.scheme.clip_negative},
        {"regime", to_string(config_.regime)}}},
      {"threads", thread_count()},
      {"certificates", certificates_json(config_.certificates)},
      {"snapshot_every", config_.output.snapshot_every},
      {"snapshots", snaps},
      {"failures", failure_notes_},
      {"config", serialize_config(config_)},
  };
  write_file_atomic(dir_ / "metadata.json", meta.dump(2) + "\n");
}

void RunDirectorySink::begin(const StateFields& initial) {
  std::filesystem::create_directories(dir_);
  snapshots_.clear();
  failure_notes_.clear();
  write_state(0, initial, "snap");
  write_metadata();
}

void RunDirectorySink::on_step(long step, const StateFields& state, const StepReport& /*report*/) {
  const long every = config_.output.snapshot_every;
  if (every > 0 && step % every == 0) write_state(step, state, "snap");
}

std::string RunDirectorySink::on_failure(long step, const StateFields& state, const std::string& reason) {
  write_state(step, state, "fail");
  failure_notes_.push_back(fmt::format("step {}: {}", step, reason));
  write_metadata();
  return (dir_ / fmt::format("fail_{:06}", step)).string();
}

void RunDirectorySink::finish(const RunResult& result) {
  if (snapshots_.empty() || snapshots_.back().step != result.steps_completed)
    write_state(result.steps_completed, result.final_state, "snap");
  write_metadata();
  write_file_atomic(dir_ / "series.csv", series_csv(result.series));
  write_file_atomic(dir_ / "steps.csv", steps_csv(result.reports));
  write_file_atomic(dir_ / "violations.csv", violations_csv(result.violations));

  double max_stability = 0.0;
  bool all_converged = true;
  for (const StepReport& r : result.reports) {
    max_stability = std::max(max_stability, r.stability_number);
    all_converged = all_converged && (r.converged || config_.scheme.picard_max == 1);
  }
  json violations = json::array();
  for (const Violation& v : result.violations) violations.push_back(violation_json(v));
  json report{{"steps_completed", result.steps_completed},
              {"halted", result.halted},
              {"dump_path", result.dump_path},
              {"max_stability_number", max_stability},
              {"picard_all_converged", all_converged},
              {"violations", violations}};
  write_file_atomic(dir_ / "report.json", report.dump(2) + "\n");
}

RunMetadata read_metadata(const std::filesystem::path& directory) {
  const auto path = directory / "metadata.json";
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const std::exception& e) {
    throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
  }
  try {
    RunMetadata m;
    m.grid.dim = j.at("grid").at("dim").get<int>();
    const auto extents = j.at("grid").at("extents").get<std::vector<double>>();
    const auto cells = j.at("grid").at("cells").get<std::vector<int>>();
    if (extents.size() != static_cast<std::size_t>(m.grid.dim) || cells.size() != extents.size())
      throw FormatError("grid entries do not match dim");
    for (std::size_t a = 0; a < extents.size(); ++a) {
      m.grid.extents[a] = extents[a];
      m.grid.cells[a] = cells[a];
    }
    m.t_end = j.at("time").at("t_end").get<double>();
    m.dt = j.at("time").at("dt").get<double>();
    m.snapshot_every = j.at("snapshot_every").get<long>();
    m.config_text = j.at("config").get<std::string>();
    for (const auto& s : j.at("snapshots")) {
      SnapshotEntry e;
      e.step = s.at("step").get<long>();
      e.t = s.at("t").get<double>();
      for (Species sp : kAllSpecies) e.files[index_of(sp)] = s.at("files").at(std::string(name_of(sp))).get<std::string>();
      m.snapshots.push_back(std::move(e));
    }
    return m;
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(fmt::format("{}: malformed metadata: {}", path.string(), e.what()));
  }
}

FieldHistory load_history(const std::filesystem::path& directory, std::vector<Species> species, std::size_t stride) {
  if (stride == 0) throw DiagnosticError("history stride must be positive");
  const RunMetadata meta = read_metadata(directory);
  const Grid grid = make_grid(meta.grid);
  FieldHistory h(grid, species);
  for (std::size_t i = 0; i < meta.snapshots.size(); i += stride) {
    const SnapshotEntry& e = meta.snapshots[i];
    std::vector<Field> fields;
    for (Species s : species) {
      const Snapshot snap = read_snapshot(directory / e.files[index_of(s)]);
      if (snap.header.species != s)
        throw FormatError(fmt::format("{} holds species {}, expected {}", e.files[index_of(s)],
                                      name_of(snap.header.species), name_of(s)));
      fields.push_back(snap.to_field(grid));
    }
    h.append(e.t, fields);
  }
  return h;
}

}  // namespace upasim::io
