#pragma once

#include <span>
#include <string>
#include <vector>

#include "upasim/functionals.hpp"
#include "upasim/monitors.hpp"
#include "upasim/stepper.hpp"

namespace upasim {

struct RunOptions {
  SchemeOptions scheme{};
  MonitorConfig monitors{};
  /// Sinks see every step in on_step; this is only advisory for sinks that thin output.
  long output_every = 1;
};

struct RunResult {
  FunctionalSeries series;
  std::vector<Violation> violations;
  std::vector<StepReport> reports;
  long steps_completed = 0;
  StateFields final_state;
  bool halted = false;         // a hard monitor violation stopped the run
  std::string dump_path;       // diagnostic snapshot written on halt, if any sink wrote one
};

/// Receives the run as it happens. Every hook defaults to doing nothing.
class OutputSink {
 public:
  virtual ~OutputSink() = default;
  virtual void begin(const StateFields& /*initial*/) {}
  virtual void on_step(long /*step*/, const StateFields& /*state*/, const StepReport& /*report*/) {}
  /// Called with the state to preserve when the run stops early; returns where it went.
  virtual std::string on_failure(long /*step*/, const StateFields& /*state*/, const std::string& /*reason*/) {
    return {};
  }
  virtual void finish(const RunResult& /*result*/) {}
};

/// A step failed; carries the failing step index and where the last good state was dumped.
class RunFailure : public Error {
 public:
  RunFailure(const std::string& what, long step, std::string dump_path, StepReport report)
      : Error(what), step_(step), dump_path_(std::move(dump_path)), report_(std::move(report)) {}
  long step() const noexcept { return step_; }
  const std::string& dump_path() const noexcept { return dump_path_; }
  const StepReport& report() const noexcept { return report_; }

 private:
  long step_;
  std::string dump_path_;
  StepReport report_;
};

/// Advances `initial` to window.t_end(). Monitors run after every committed step;
/// a hard violation (including one on the initial state) stops the run with
/// halted = true after the sinks have been asked for a diagnostic dump.
/// The series has one record per committed state, initial state included.
RunResult run(const StateFields& initial, const ModelParams& params, const BoundCertificates& certs,
              const TimeWindow& window, const RunOptions& options, std::span<OutputSink* const> sinks = {},
              SourceFunction sources = {});

}  // namespace upasim
