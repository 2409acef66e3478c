#include "upasim/io/series.hpp"

#include <cmath>

#include <fmt/format.h>

namespace upasim::io {
namespace {

std::string num(double v) { return std::isnan(v) ? std::string() : fmt::format("{}", v); }

}  // namespace

std::string series_csv(const FunctionalSeries& series) {
  std::string out = "t";
  for (Species s : kAllSpecies)
    out += fmt::format(",L1_{0},L2_{0},Linf_{0},min_{0}", name_of(s));
  for (Species s : kAllSpecies) out += fmt::format(",supL2_{0},gradL2sq_{0}", name_of(s));
  out += ",margin_A,margin_V\n";
  for (const SeriesRecord& r : series.records()) {
    out += num(r.t);
    for (std::size_t i = 0; i < 6; ++i)
      out += fmt::format(",{},{},{},{}", num(r.l1[i]), num(r.l2[i]), num(r.linf[i]), num(r.min[i]));
    for (std::size_t i = 0; i < 6; ++i) out += fmt::format(",{},{}", num(r.sup_l2[i]), num(r.grad_l2sq[i]));
    out += fmt::format(",{},{}\n", num(r.margin_A), num(r.margin_V));
  }
  return out;
}

std::string steps_csv(std::span<const StepReport> reports, double t0) {
  std::string out =
      "step,t,dt,picard_iterations,picard_residual,converged,non_contraction,stability_number,"
      "cg_C,cg_N,cg_A,cg_I,cg_P,clipped\n";
  double t = t0;
  long step = 0;
  for (const StepReport& r : reports) {
    t += r.dt_used;
    ++step;
    const auto& cg = r.linear_iterations;
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", step, t, r.dt_used, r.picard_iterations,
                       r.picard_residuals.empty() ? std::string() : num(r.picard_residuals.back()),
                       r.converged ? 1 : 0, r.non_contraction ? 1 : 0, r.stability_number, cg[0], cg[1], cg[2],
                       cg[3], cg[4], r.clipped ? 1 : 0);
  }
  return out;
}

std::string violations_csv(std::span<const Violation> violations) {
  std::string out = "monitor,step,species,cell,magnitude,tolerance,mode,count\n";
  for (const Violation& v : violations)
    out += fmt::format("{},{},{},{},{},{},{},{}\n", v.monitor, v.step, name_of(v.species), v.cell, v.magnitude,
                       v.tolerance, to_string(v.mode), v.count);
  return out;
}

std::string weak_residual_csv(std::span<const TestFunction> bank, std::span<const std::array<double, 6>> residuals) {
  std::string out = "test_function,kx,ky,kz,time_power,R_C,R_N,R_V,R_A,R_I,R_P\n";
  for (std::size_t b = 0; b < bank.size() && b < residuals.size(); ++b) {
    const auto& k = bank[b].wavenumber;
    const auto& r = residuals[b];
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", b, k[0], k[1], k[2], bank[b].time_power, r[0], r[1],
                       r[2], r[3], r[4], r[5]);
  }
  return out;
}

}  // namespace upasim::io
