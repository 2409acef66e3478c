#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "upasim/functionals.hpp"
#include "upasim/io/config.hpp"
#include "upasim/run.hpp"

namespace upasim::io {

struct SnapshotEntry {
  long step = 0;
  double t = 0.0;
  std::array<std::string, 6> files;  // storage order, relative to the run directory
};

/// Writes a run directory:
///   metadata.json   resolved config (text), grid, window, certificates, scheme flags, version, snapshot index
///   snap_<step>_<X>.upas   snapshots on the configured cadence plus the first and last state
///   series.csv, steps.csv, violations.csv, report.json   written at the end of the run
/// Failure dumps go to fail_<step>_<X>.upas.
class RunDirectorySink : public OutputSink {
 public:
  RunDirectorySink(std::filesystem::path directory, RunConfig config);

  void begin(const StateFields& initial) override;
  void on_step(long step, const StateFields& state, const StepReport& report) override;
  std::string on_failure(long step, const StateFields& state, const std::string& reason) override;
  void finish(const RunResult& result) override;

  const std::filesystem::path& directory() const noexcept { return dir_; }

 private:
  void write_state(long step, const StateFields& state, const std::string& prefix);
  void write_metadata() const;

  std::filesystem::path dir_;
  RunConfig config_;
  std::vector<SnapshotEntry> snapshots_;
  std::vector<std::string> failure_notes_;
};

struct RunMetadata {
  GridSpec grid;
  double t_end = 0.0;
  double dt = 0.0;
  long snapshot_every = 0;
  std::string config_text;
  std::vector<SnapshotEntry> snapshots;
};

/// FormatError when metadata.json is missing or malformed.
RunMetadata read_metadata(const std::filesystem::path& directory);

/// Every `stride`-th indexed snapshot of the requested species, as a history.
FieldHistory load_history(const std::filesystem::path& directory,
                          std::vector<Species> species = {kAllSpecies.begin(), kAllSpecies.end()},
                          std::size_t stride = 1);

}  // namespace upasim::io
