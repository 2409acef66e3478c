#include "upasim/run.hpp"

#include <fmt/format.h>

namespace upasim {
namespace {

std::string dump(std::span<OutputSink* const> sinks, long step, const StateFields& s, const std::string& why) {
  std::string path;
  for (OutputSink* sink : sinks) {
    std::string p = sink->on_failure(step, s, why);
    if (path.empty()) path = std::move(p);
  }
  return path;
}

}  // namespace

RunResult run(const StateFields& initial, const ModelParams& params, const BoundCertificates& certs,
              const TimeWindow& window, const RunOptions& options, std::span<OutputSink* const> sinks,
              SourceFunction sources) {
  RunResult result;
  result.series = FunctionalSeries(certs);
  const MonitorSet monitors(options.monitors, certs, params);
  Stepper stepper(initial.grid(), params, options.scheme, std::move(sources));

  StateFields state = initial;
  state.t = window.time_at(0);
  for (OutputSink* s : sinks) s->begin(state);
  result.series.record(state);

  result.violations = monitors.initial(state);
  if (has_hard(result.violations)) {
    result.halted = true;
    result.dump_path = dump(sinks, 0, state, "hard monitor violation on the initial state");
    result.final_state = std::move(state);
    for (OutputSink* s : sinks) s->finish(result);
    return result;
  }

  for (long n = 0; n < window.steps(); ++n) {
    const double dt = window.step_length(n);
    std::pair<StateFields, StepReport> out;
    try {
      out = stepper.step(state, dt);
    } catch (const StepFailure& e) {
      const std::string path = dump(sinks, n, state, e.what());
      throw RunFailure(fmt::format("step {} failed: {}", n + 1, e.what()), n + 1, path, e.report());
    }
    out.first.t = window.time_at(n + 1);
    auto found = monitors.after_step(state, out.first, dt, n + 1);

    state = std::move(out.first);
    result.steps_completed = n + 1;
    result.series.record(state);
    for (OutputSink* s : sinks) s->on_step(n + 1, state, out.second);
    result.reports.push_back(std::move(out.second));

    const bool hard = has_hard(found);
    result.violations.insert(result.violations.end(), found.begin(), found.end());
    if (hard) {
      result.halted = true;
      result.dump_path = dump(sinks, n + 1, state, "hard monitor violation");
      break;
    }
  }
  result.final_state = std::move(state);
  for (OutputSink* s : sinks) s->finish(result);
  return result;
}

}  // namespace upasim
