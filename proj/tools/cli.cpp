#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "upasim/errors.hpp"
#include "upasim/functionals.hpp"
#include "upasim/io/config.hpp"
#include "upasim/io/run_directory.hpp"
#include "upasim/io/series.hpp"
#include "upasim/io/snapshot.hpp"
#include "upasim/run.hpp"
#include "upasim/verification.hpp"
#include "upasim/version.hpp"

namespace upasim::cli {
namespace {

namespace fs = std::filesystem;

std::string opt(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string("none"); }

std::vector<Species> parse_species(const std::string& list) {
  std::vector<Species> out;
  for (char c : list) {
    if (c == ',' || c == ' ') continue;
    const auto s = species_from_tag(c);
    if (!s) throw CLI::ValidationError("--species", fmt::format("unknown species '{}'", c));
    out.push_back(*s);
  }
  if (out.empty()) throw CLI::ValidationError("--species", "no species given");
  return out;
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& config_path) {
  const io::RunConfig c = io::load_config(config_path);
  const BoundCertificates& b = c.certificates;
  fmt::print("M_A {}\nM_V {}\nh4_margin {}\nchi_margin {}\nchi_enforced {}\nregime {}\n", opt(b.max_uA),
             opt(b.max_uV), b.h4_margin, b.chi_margin, b.chi_enforced ? "true" : "false", io::to_string(c.regime));
  for (const std::string& w : b.warnings) fmt::print(stderr, "warning: {}\n", w);
  return kOk;
}

int cmd_run(const std::string& config_path, const std::string& output_override) {
  io::RunConfig c = io::load_config(config_path);
  for (const std::string& w : c.certificates.warnings) fmt::print(stderr, "warning: {}\n", w);
  const fs::path dir = output_override.empty() ? fs::path(c.output.directory) : fs::path(output_override);
  c.output.directory = dir.string();

  const InitialFields init = io::make_initial_fields(c);
  const StateFields initial(init, 0.0);
  const TimeWindow window(c.t_end, c.dt);
  RunOptions options;
  options.scheme = c.scheme;
  options.monitors = c.monitors;

  io::RunDirectorySink sink(dir, c);
  OutputSink* sinks[] = {&sink};
  RunResult result;
  try {
    result = run(initial, c.params, c.certificates, window, options, sinks);
  } catch (const RunFailure& e) {
    fmt::print(stderr, "error: step {} failed: {}\n", e.step(), e.what());
    if (!e.dump_path().empty()) fmt::print(stderr, "last good state dumped to {}_*.upas\n", e.dump_path());
    return kMonitorFailure;
  }

  double max_stability = 0.0;
  for (const StepReport& r : result.reports) max_stability = std::max(max_stability, r.stability_number);
  fmt::print(stderr, "{} of {} steps, {} violation record(s), max stability number {}\n", result.steps_completed,
             window.steps(), result.violations.size(), max_stability);
  // First record per monitor and species; the full list is in violations.csv.
  std::map<std::pair<std::string, Species>, std::pair<const Violation*, long>> seen;
  for (const Violation& v : result.violations) {
    auto& [first, steps] = seen[{v.monitor, v.species}];
    if (!first) first = &v;
    ++steps;
  }
  for (const auto& [key, entry] : seen) {
    const Violation& v = *entry.first;
    fmt::print(stderr, "{}: {} species {} first at step {} cell {} magnitude {} (tolerance {}), {} step(s) flagged\n",
               to_string(v.mode), v.monitor, name_of(v.species), v.step, v.cell, v.magnitude, v.tolerance,
               entry.second);
  }
  fmt::print("{}\n", dir.string());
  if (result.halted) {
    fmt::print(stderr, "error: hard monitor violation; state dumped to {}_*.upas\n", result.dump_path);
    return kMonitorFailure;
  }
  return kOk;
}

int cmd_mms(const std::string& name, const std::string& ladder_text, const MmsOptions& options,
            const std::string& csv_path) {
  std::vector<int> ladder;
  std::size_t pos = 0;
  while (pos <= ladder_text.size()) {
    const std::size_t next = std::min(ladder_text.find(',', pos), ladder_text.size());
    const std::string item = ladder_text.substr(pos, next - pos);
    try {
      std::size_t used = 0;
      const int n = std::stoi(item, &used);
      if (used != item.size() || n < 3) throw std::invalid_argument(item);
      ladder.push_back(n);
    } catch (const std::exception&) {
      throw CLI::ValidationError("ladder", fmt::format("'{}' is not a cell count >= 3", item));
    }
    pos = next + 1;
  }
  if (ladder.size() < 2) throw CLI::ValidationError("ladder", "needs at least two grids");

  const ManufacturedCase mc = ManufacturedCase::by_name(name);
  const ConvergenceTable table = mms_run(mc, ladder, options);
  const std::string csv = table.to_csv();
  if (!csv_path.empty()) io::write_file_atomic(csv_path, csv);
  fmt::print("{}", csv);
  fmt::print(stderr, "minimum observed order {}\n", table.min_order());
  return kOk;
}

struct NormsOptions {
  std::string dir;
  double mu = -1.0;  // negative: dim + 2
  double alpha = 0.5;
  std::vector<double> radii{2.0, 4.0, 8.0};
  std::size_t time_stride = 1;
  std::string species = "CNVAIP";
};

int cmd_norms(const NormsOptions& o) {
  const std::vector<Species> species = parse_species(o.species);
  const FieldHistory h = io::load_history(o.dir, species, o.time_stride);
  const Grid& g = h.grid();
  const double mu = o.mu < 0.0 ? g.dim() + 2.0 : o.mu;

  std::string per_time = "t";
  for (Species s : species) per_time += fmt::format(",L1_{0},L2_{0},Linf_{0}", name_of(s));
  per_time += "\n";
  for (std::size_t m = 0; m < h.samples(); ++m) {
    per_time += fmt::format("{}", h.times()[m]);
    for (Species s : species) {
      const auto v = h.values(s, m);
      const Field f(g, std::vector<double>(v.begin(), v.end()));
      per_time += fmt::format(",{},{},{}", lp_norm(f, 1), lp_norm(f, 2), lp_norm(f, kInfinityNorm));
    }
    per_time += "\n";
  }
  io::write_file_atomic(fs::path(o.dir) / "norms.csv", per_time);

  std::vector<double> radii;
  for (double r : o.radii) radii.push_back(r * g.min_spacing());
  bool failed = false;
  std::string summary = "species,V2,campanato,holder,mu,alpha,samples\n";
  for (Species s : species) {
    auto attempt = [&](auto&& f) -> std::string {
      try {
        return fmt::format("{}", f());
      } catch (const DiagnosticError& e) {
        fmt::print(stderr, "error: species {}: {}\n", name_of(s), e.what());
        failed = true;
        return {};
      }
    };
    const std::string v2 = attempt([&] { return v2_norm(h, s); });
    const std::string cam = attempt([&] { return campanato_seminorm(h, s, mu, radii); });
    const std::string hol = attempt([&] { return holder_seminorm(h, s, o.alpha); });
    summary += fmt::format("{},{},{},{},{},{},{}\n", name_of(s), v2, cam, hol, mu, o.alpha, h.samples());
  }
  io::write_file_atomic(fs::path(o.dir) / "norms_summary.csv", summary);
  fmt::print("{}", summary);
  return failed ? kValidation : kOk;
}

int cmd_weak_residual(const std::string& dir, const std::string& config_path, int kmax) {
  const io::RunConfig c = io::load_config(config_path);
  const FieldHistory h = io::load_history(dir);
  if (!(h.grid() == io::make_grid(c.grid)))
    throw ConfigError(fmt::format("history in '{}' is not on the grid of '{}'", dir, config_path));
  const std::vector<TestFunction> bank = default_test_bank(h.grid(), kmax);
  const auto residuals = weak_residual(h, c.params, bank, c.scheme.taxis);
  io::write_file_atomic(fs::path(dir) / "weak_residual.csv", io::weak_residual_csv(bank, residuals));
  fmt::print("species,max_abs_residual\n");
  for (Species s : kAllSpecies) {
    double m = 0.0;
    for (const auto& r : residuals) m = std::max(m, std::abs(r[index_of(s)]));
    fmt::print("{},{}\n", name_of(s), m);
  }
  return kOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"uPA invasion reaction-diffusion-taxis simulator", "upasim"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path, output_dir;
  auto* run_cmd = app.add_subcommand("run", "simulate a config and write a run directory");
  run_cmd->add_option("config", config_path, "config file")->required();
  run_cmd->add_option("-o,--output", output_dir, "run directory (overrides [output] directory)");

  auto* validate_cmd = app.add_subcommand("validate", "check the hypotheses and print the certificates");
  validate_cmd->add_option("config", config_path, "config file")->required();

  std::string mms_case, ladder, mms_csv, mms_taxis = "central";
  MmsOptions mms_options;
  auto* mms_cmd = app.add_subcommand("mms", "manufactured-solution convergence study");
  mms_cmd->add_option("case", mms_case, "constant, diffusion or coupled")
      ->required()
      ->check(CLI::IsMember({"constant", "diffusion", "coupled"}));
  mms_cmd->add_option("ladder", ladder, "cells per axis, comma separated (e.g. 32,64,128)")->required();
  mms_cmd->add_option("--dim", mms_options.dim, "spatial dimension")->check(CLI::Range(1, 3));
  mms_cmd->add_option("--t-end", mms_options.t_end, "final time")->check(CLI::PositiveNumber);
  mms_cmd->add_option("--dt-factor", mms_options.dt_factor, "dt = factor * h^2")->check(CLI::PositiveNumber);
  mms_cmd->add_option("--taxis", mms_taxis, "central or upwind")->check(CLI::IsMember({"central", "upwind"}));
  mms_cmd->add_option("--csv", mms_csv, "also write the table to this file");

  NormsOptions norms;
  auto* norms_cmd = app.add_subcommand("norms", "Lp series, V2, Campanato and Hoelder numbers of a run directory");
  norms_cmd->add_option("history", norms.dir, "run directory")->required()->check(CLI::ExistingDirectory);
  norms_cmd->add_option("--mu", norms.mu, "Campanato exponent (default dim + 2)");
  norms_cmd->add_option("--alpha", norms.alpha, "Hoelder exponent")->check(CLI::Range(0.0, 1.0));
  norms_cmd->add_option("--radii", norms.radii, "cylinder radii in multiples of the smallest cell width")
      ->delimiter(',');
  norms_cmd->add_option("--time-stride", norms.time_stride, "use every n-th stored snapshot")
      ->check(CLI::PositiveNumber);
  norms_cmd->add_option("--species", norms.species, "species tags, e.g. CN");

  std::string wr_dir;
  int kmax = 3;
  auto* wr_cmd = app.add_subcommand("weak-residual", "weak-form defect of a stored run over a test bank");
  wr_cmd->add_option("history", wr_dir, "run directory")->required()->check(CLI::ExistingDirectory);
  wr_cmd->add_option("config", config_path, "config the run was made with")->required();
  wr_cmd->add_option("--kmax", kmax, "largest cosine wavenumber in the bank")->check(CLI::Range(0, 16));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(config_path, output_dir);
    if (*validate_cmd) return cmd_validate(config_path);
    if (*mms_cmd) {
      mms_options.scheme.taxis = mms_taxis == "upwind" ? TaxisScheme::upwind : TaxisScheme::central;
      return cmd_mms(mms_case, ladder, mms_options, mms_csv);
    }
    if (*norms_cmd) return cmd_norms(norms);
    if (*wr_cmd) return cmd_weak_residual(wr_dir, config_path, kmax);
  } catch (const CLI::ValidationError& e) {
    fmt::print(stderr, "usage error: {}\n", e.what());
    return kUsage;
  } catch (const ValidationError& e) {
    fmt::print(stderr, "validation failed: {} ({} margin {})\n", e.what(), e.quantity(), e.margin());
    return kValidation;
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kValidation;
  } catch (const InitializationError& e) {
    fmt::print(stderr, "initial data error: {}\n", e.what());
    return kValidation;
  } catch (const FormatError& e) {
    fmt::print(stderr, "format error: {}\n", e.what());
    return kValidation;
  } catch (const DiagnosticError& e) {
    fmt::print(stderr, "diagnostic error: {}\n", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return kInternal;
  }
  return kUsage;
}

}  // namespace upasim::cli
