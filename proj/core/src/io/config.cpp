#include "upasim/io/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "upasim/errors.hpp"
#include "upasim/io/snapshot.hpp"

namespace upasim::io {

Grid make_grid(const GridSpec& spec) {
  const auto n = static_cast<std::size_t>(std::clamp(spec.dim, 0, 3));
  return Grid::make(spec.dim, std::span(spec.extents).first(n), std::span(spec.cells).first(n));
}

std::string_view to_string(TaxisScheme s) noexcept { return s == TaxisScheme::upwind ? "upwind" : "central"; }
std::string_view to_string(Regime r) noexcept { return r == Regime::exploratory ? "exploratory" : "strict"; }

namespace {

using Profile = InitialSpec::Profile;

constexpr std::array<std::pair<Profile, std::string_view>, 6> kProfiles{{{Profile::constant, "constant"},
                                                                        {Profile::gaussian, "gaussian"},
                                                                        {Profile::cosine, "cosine"},
                                                                        {Profile::bump, "bump"},
                                                                        {Profile::linear, "linear"},
                                                                        {Profile::file, "file"}}};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view v, int line, std::string_view key) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x))
    throw ConfigError(fmt::format("'{}' expects a finite number, got '{}'", key, v), line);
  return x;
}

long to_long(std::string_view v, int line, std::string_view key) {
  long x = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(fmt::format("'{}' expects an integer, got '{}'", key, v), line);
  return x;
}

bool to_bool(std::string_view v, int line, std::string_view key) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(fmt::format("'{}' expects true or false, got '{}'", key, v), line);
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = v.find(',', start);
    out.push_back(trim(v.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T, class Conv>
std::array<T, 3> to_triple(std::string_view v, int line, std::string_view key, T fill, Conv conv,
                           std::size_t* count) {
  const auto parts = split_list(v);
  if (parts.empty() || parts.size() > 3)
    throw ConfigError(fmt::format("'{}' expects 1 to 3 comma-separated values", key), line);
  std::array<T, 3> out{fill, fill, fill};
  for (std::size_t i = 0; i < parts.size(); ++i) out[i] = static_cast<T>(conv(parts[i], line, key));
  *count = parts.size();
  return out;
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

// One parsed "key = value" line.
struct Entry {
  std::string value;
  int line;
};

// Section name -> key -> entry.
using Document = std::map<std::string, std::map<std::string, Entry>>;

Document tokenize(std::string_view text) {
  Document doc;
  std::map<std::string, int> section_lines;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("section header must end with ']'", line_no);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ConfigError("empty section name", line_no);
      if (section_lines.contains(section))
        throw ConfigError(fmt::format("section [{}] appears twice (first at line {})", section,
                                      section_lines[section]),
                          line_no);
      section_lines[section] = line_no;
      doc[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(fmt::format("expected 'key = value', got '{}'", line), line_no);
    if (section.empty()) throw ConfigError("key outside of any section", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("empty key", line_no);
    if (value.empty()) throw ConfigError(fmt::format("key '{}' has no value", key), line_no);
    auto& keys = doc[section];
    if (keys.contains(key))
      throw ConfigError(fmt::format("key '{}' repeated in [{}] (first at line {})", key, section, keys[key].line),
                        line_no);
    keys[key] = {value, line_no};
  }
  return doc;
}

// Consumes the keys of one section through registered handlers; leftovers are errors.
class SectionReader {
 public:
  SectionReader(std::string name, std::map<std::string, Entry> entries)
      : name_(std::move(name)), entries_(std::move(entries)) {}

  const Entry* take(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    taken_[key] = it->second;
    entries_.erase(it);
    return &taken_[key];
  }
  const Entry& require(const std::string& key, int section_line) {
    if (const Entry* e = take(key)) return *e;
    throw ConfigError(fmt::format("[{}] is missing required key '{}'", name_, key), section_line);
  }
  void number(const std::string& key, double& out) {
    if (const Entry* e = take(key)) out = to_double(e->value, e->line, key);
  }
  void finish() const {
    if (entries_.empty()) return;
    const auto& [key, e] = *entries_.begin();
    throw ConfigError(fmt::format("unknown key '{}' in [{}]", key, name_), e.line);
  }
  int first_line() const {
    int l = 0;
    for (const auto& [k, e] : entries_) l = l == 0 ? e.line : std::min(l, e.line);
    return l;
  }

 private:
  std::string name_;
  std::map<std::string, Entry> entries_;
  std::map<std::string, Entry> taken_;
};

void read_diffusion(SectionReader& r, DiffusionCoefficient& out, int line) {
  std::string kind = "constant";
  int kind_line = line;
  if (const Entry* e = r.take("kind")) {
    kind = e->value;
    kind_line = e->line;
  }
  if (kind == "constant") {
    double value = out.kind() == DiffusionCoefficient::Kind::constant ? out.value() : 1.0;
    r.number("value", value);
    out = DiffusionCoefficient::constant(value);
  } else if (kind == "separable") {
    SeparableProfile p;
    r.number("base", p.base);
    r.number("amp_x", p.amp_x);
    r.number("wavenumber", p.wavenumber);
    r.number("amp_t", p.amp_t);
    r.number("omega", p.omega);
    std::optional<double> lower, upper;
    if (const Entry* e = r.take("lower")) lower = to_double(e->value, e->line, "lower");
    if (const Entry* e = r.take("upper")) upper = to_double(e->value, e->line, "upper");
    out = DiffusionCoefficient::separable(p, lower, upper);
  } else {
    throw ConfigError(fmt::format("diffusion kind must be constant or separable, got '{}'", kind), kind_line);
  }
}

void read_initial(SectionReader& r, InitialSpec& s, const std::filesystem::path& base_dir) {
  if (const Entry* e = r.take("profile")) {
    bool found = false;
    for (const auto& [p, name] : kProfiles)
      if (e->value == name) {
        s.profile = p;
        found = true;
      }
    if (!found) throw ConfigError(fmt::format("unknown initial profile '{}'", e->value), e->line);
  }
  r.number("value", s.value);
  r.number("amplitude", s.amplitude);
  r.number("width", s.width);
  r.number("wavenumber", s.wavenumber);
  if (const Entry* e = r.take("center")) {
    std::size_t n = 0;
    s.center = to_triple<double>(e->value, e->line, "center", 0.5, to_double, &n);
  }
  if (const Entry* e = r.take("path")) {
    std::filesystem::path p(e->value);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    s.path = p.lexically_normal().string();
  }
  if (s.profile == Profile::file && s.path.empty())
    throw ConfigError("profile = file needs a 'path'", r.first_line());
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  Document doc = tokenize(text);
  RunConfig c;
  std::map<std::string, int> first_line;
  for (const auto& [name, keys] : doc) {
    int l = 0;
    for (const auto& [k, e] : keys) l = l == 0 ? e.line : std::min(l, e.line);
    first_line[name] = l;
  }
  auto reader = [&](const std::string& name) {
    auto it = doc.find(name);
    SectionReader r(name, it == doc.end() ? std::map<std::string, Entry>{} : it->second);
    if (it != doc.end()) doc.erase(it);
    return r;
  };

  {
    if (!doc.contains("grid")) throw ConfigError("missing required section [grid]");
    SectionReader r = reader("grid");
    const int l = first_line["grid"];
    const Entry& dim = r.require("dim", l);
    c.grid.dim = static_cast<int>(to_long(dim.value, dim.line, "dim"));
    if (c.grid.dim < 1 || c.grid.dim > 3) throw ConfigError("dim must be 1, 2 or 3", dim.line);
    std::size_t n = 0;
    const Entry& ext = r.require("extents", l);
    c.grid.extents = to_triple<double>(ext.value, ext.line, "extents", 1.0, to_double, &n);
    if (n != static_cast<std::size_t>(c.grid.dim))
      throw ConfigError(fmt::format("extents has {} entries, dim is {}", n, c.grid.dim), ext.line);
    const Entry& cells = r.require("cells", l);
    c.grid.cells = to_triple<int>(cells.value, cells.line, "cells", 1, to_long, &n);
    if (n != static_cast<std::size_t>(c.grid.dim))
      throw ConfigError(fmt::format("cells has {} entries, dim is {}", n, c.grid.dim), cells.line);
    for (std::size_t a = n; a < 3; ++a) c.grid.cells[a] = 3;
    r.finish();
    try {
      (void)make_grid(c.grid);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), l);
    }
  }
  {
    if (!doc.contains("time")) throw ConfigError("missing required section [time]");
    SectionReader r = reader("time");
    const int l = first_line["time"];
    const Entry& te = r.require("t_end", l);
    c.t_end = to_double(te.value, te.line, "t_end");
    const Entry& dt = r.require("dt", l);
    c.dt = to_double(dt.value, dt.line, "dt");
    r.finish();
    try {
      (void)TimeWindow(c.t_end, c.dt);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), dt.line);
    }
  }
  for (Species s : kParabolicSpecies) {
    const std::string name = fmt::format("diffusion.{}", name_of(s));
    if (!doc.contains(name)) continue;
    SectionReader r = reader(name);
    read_diffusion(r, c.params.diffusion_of(s), first_line[name]);
    r.finish();
  }
  if (doc.contains("taxis")) {
    SectionReader r = reader("taxis");
    for (int row = 1; row <= 2; ++row)
      for (int col = 1; col <= 4; ++col)
        r.number(fmt::format("chi_{}{}", row, col),
                 c.params.chi[static_cast<std::size_t>(row - 1)][static_cast<std::size_t>(col - 1)]);
    r.finish();
  }
  if (doc.contains("reaction")) {
    SectionReader r = reader("reaction");
    auto& a = c.params.alpha;
    r.number("alpha_11", a.a11);
    r.number("alpha_21", a.a21);
    r.number("alpha_31", a.a31);
    r.number("alpha_32", a.a32);
    r.number("alpha_33", a.a33);
    r.number("alpha_41", a.a41);
    r.number("alpha_42", a.a42);
    r.number("alpha_51", a.a51);
    r.number("alpha_52", a.a52);
    r.number("alpha_61", a.a61);
    r.number("alpha_62", a.a62);
    r.number("mu_C", c.params.mu.C);
    r.number("mu_N", c.params.mu.N);
    r.number("mu_V", c.params.mu.V);
    r.number("mu_A", c.params.mu.A);
    r.number("mu_I", c.params.mu.I);
    r.number("K_C", c.params.K.C);
    r.number("K_N", c.params.K.N);
    r.number("K_V", c.params.K.V);
    r.number("delta_C", c.params.delta.C);
    r.number("delta_N", c.params.delta.N);
    r.number("delta_P", c.params.delta.P);
    r.number("epsilon", c.params.epsilon_reg);
    r.finish();
  }
  for (Species s : kAllSpecies) {
    const std::string name = fmt::format("initial.{}", name_of(s));
    if (!doc.contains(name)) continue;
    SectionReader r = reader(name);
    read_initial(r, c.initial[index_of(s)], base_dir);
    r.finish();
  }
  if (doc.contains("scheme")) {
    SectionReader r = reader("scheme");
    if (const Entry* e = r.take("taxis")) {
      if (e->value == "central") c.scheme.taxis = TaxisScheme::central;
      else if (e->value == "upwind") c.scheme.taxis = TaxisScheme::upwind;
      else throw ConfigError(fmt::format("taxis must be central or upwind, got '{}'", e->value), e->line);
    }
    if (const Entry* e = r.take("picard_max")) {
      c.scheme.picard_max = static_cast<int>(to_long(e->value, e->line, "picard_max"));
      if (c.scheme.picard_max < 1) throw ConfigError("picard_max must be >= 1", e->line);
    }
    if (const Entry* e = r.take("picard_tol")) {
      c.scheme.picard_tol = to_double(e->value, e->line, "picard_tol");
      if (!(c.scheme.picard_tol > 0.0)) throw ConfigError("picard_tol must be positive", e->line);
    }
    if (const Entry* e = r.take("linear_tol")) {
      c.scheme.linear_tol = to_double(e->value, e->line, "linear_tol");
      if (!(c.scheme.linear_tol > 0.0)) throw ConfigError("linear_tol must be positive", e->line);
    }
    if (const Entry* e = r.take("clip_negative")) c.scheme.clip_negative = to_bool(e->value, e->line, "clip_negative");
    if (const Entry* e = r.take("regime")) {
      if (e->value == "strict") c.regime = Regime::strict;
      else if (e->value == "exploratory") c.regime = Regime::exploratory;
      else throw ConfigError(fmt::format("regime must be strict or exploratory, got '{}'", e->value), e->line);
    }
    r.finish();
  }
  if (doc.contains("monitors")) {
    SectionReader r = reader("monitors");
    auto positive = [&](const std::string& key, double& out) {
      if (const Entry* e = r.take(key)) {
        out = to_double(e->value, e->line, key);
        if (!(out > 0.0)) throw ConfigError(fmt::format("'{}' must be positive", key), e->line);
      }
    };
    positive("negativity_tolerance", c.monitors.negativity_tolerance);
    positive("ceiling_tolerance", c.monitors.ceiling_tolerance);
    positive("boundary_tolerance", c.monitors.boundary_tolerance);
    positive("l1_identity_factor", c.monitors.l1_identity_factor);
    auto mode = [&](const std::string& key, MonitorMode& out) {
      if (const Entry* e = r.take(key)) {
        const auto m = monitor_mode_from_string(e->value);
        if (!m) throw ConfigError(fmt::format("'{}' must be hard, warn or off, got '{}'", key, e->value), e->line);
        out = *m;
      }
    };
    mode("negativity", c.monitors.negativity);
    mode("ceilings", c.monitors.ceilings);
    mode("uv_boundary", c.monitors.uv_boundary);
    mode("l1_identity", c.monitors.l1_identity);
    r.finish();
  }
  if (doc.contains("output")) {
    SectionReader r = reader("output");
    if (const Entry* e = r.take("directory")) c.output.directory = e->value;
    if (const Entry* e = r.take("snapshot_every")) {
      c.output.snapshot_every = to_long(e->value, e->line, "snapshot_every");
      if (c.output.snapshot_every < 0) throw ConfigError("snapshot_every must be >= 0", e->line);
    }
    r.finish();
  }
  if (doc.contains("random")) {
    SectionReader r = reader("random");
    if (const Entry* e = r.take("seed")) {
      const long v = to_long(e->value, e->line, "seed");
      if (v < 0) throw ConfigError("seed must be >= 0", e->line);
      c.seed = static_cast<std::uint64_t>(v);
    }
    r.finish();
  }
  if (!doc.empty()) {
    const auto& [name, keys] = *doc.begin();
    throw ConfigError(fmt::format("unknown section [{}]", name), first_line[name]);
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  RunConfig c = parse_config(ss.str(), std::filesystem::absolute(path).parent_path());
  c.certificates = validate(c.params, make_initial_fields(c), c.regime);
  return c;
}

std::string serialize_config(const RunConfig& c) {
  std::string out;
  auto line = [&](std::string_view key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
  auto list = [&](auto const& arr) {
    std::string s;
    for (int a = 0; a < c.grid.dim; ++a) s += (a ? ", " : "") + fmt::format("{}", arr[static_cast<std::size_t>(a)]);
    return s;
  };

  out += "[grid]\n";
  line("dim", fmt::format("{}", c.grid.dim));
  line("extents", list(c.grid.extents));
  line("cells", list(c.grid.cells));

  out += "\n[time]\n";
  line("t_end", fmt_double(c.t_end));
  line("dt", fmt_double(c.dt));

  for (Species s : kParabolicSpecies) {
    const DiffusionCoefficient& d = c.params.diffusion_of(s);
    out += fmt::format("\n[diffusion.{}]\n", name_of(s));
    switch (d.kind()) {
      case DiffusionCoefficient::Kind::constant:
        line("kind", "constant");
        line("value", fmt_double(d.value()));
        break;
      case DiffusionCoefficient::Kind::separable:
        line("kind", "separable");
        line("base", fmt_double(d.profile().base));
        line("amp_x", fmt_double(d.profile().amp_x));
        line("wavenumber", fmt_double(d.profile().wavenumber));
        line("amp_t", fmt_double(d.profile().amp_t));
        line("omega", fmt_double(d.profile().omega));
        line("lower", fmt_double(d.lower()));
        line("upper", fmt_double(d.upper()));
        break;
      case DiffusionCoefficient::Kind::custom:
        throw ConfigError(fmt::format("diffusion of u_{} is a custom function and cannot be serialized", name_of(s)));
    }
  }

  out += "\n[taxis]\n";
  for (int row = 1; row <= 2; ++row)
    for (int col = 1; col <= 4; ++col) line(fmt::format("chi_{}{}", row, col), fmt_double(c.params.chi_at(row, col)));

  const auto& a = c.params.alpha;
  out += "\n[reaction]\n";
  line("alpha_11", fmt_double(a.a11));
  line("alpha_21", fmt_double(a.a21));
  line("alpha_31", fmt_double(a.a31));
  line("alpha_32", fmt_double(a.a32));
  line("alpha_33", fmt_double(a.a33));
  line("alpha_41", fmt_double(a.a41));
  line("alpha_42", fmt_double(a.a42));
  line("alpha_51", fmt_double(a.a51));
  line("alpha_52", fmt_double(a.a52));
  line("alpha_61", fmt_double(a.a61));
  line("alpha_62", fmt_double(a.a62));
  line("mu_C", fmt_double(c.params.mu.C));
  line("mu_N", fmt_double(c.params.mu.N));
  line("mu_V", fmt_double(c.params.mu.V));
  line("mu_A", fmt_double(c.params.mu.A));
  line("mu_I", fmt_double(c.params.mu.I));
  line("K_C", fmt_double(c.params.K.C));
  line("K_N", fmt_double(c.params.K.N));
  line("K_V", fmt_double(c.params.K.V));
  line("delta_C", fmt_double(c.params.delta.C));
  line("delta_N", fmt_double(c.params.delta.N));
  line("delta_P", fmt_double(c.params.delta.P));
  line("epsilon", fmt_double(c.params.epsilon_reg));

  for (Species s : kAllSpecies) {
    const InitialSpec& ic = c.initial[index_of(s)];
    out += fmt::format("\n[initial.{}]\n", name_of(s));
    for (const auto& [p, name] : kProfiles)
      if (p == ic.profile) line("profile", std::string(name));
    if (ic.profile == Profile::file) {
      line("path", ic.path);
      continue;
    }
    line("value", fmt_double(ic.value));
    line("amplitude", fmt_double(ic.amplitude));
    line("center", fmt::format("{}, {}, {}", ic.center[0], ic.center[1], ic.center[2]));
    line("width", fmt_double(ic.width));
    line("wavenumber", fmt_double(ic.wavenumber));
  }

  out += "\n[scheme]\n";
  line("taxis", std::string(to_string(c.scheme.taxis)));
  line("picard_max", fmt::format("{}", c.scheme.picard_max));
  line("picard_tol", fmt_double(c.scheme.picard_tol));
  line("linear_tol", fmt_double(c.scheme.linear_tol));
  line("clip_negative", c.scheme.clip_negative ? "true" : "false");
  line("regime", std::string(to_string(c.regime)));

  const auto& m = c.monitors;
  out += "\n[monitors]\n";
  line("negativity_tolerance", fmt_double(m.negativity_tolerance));
  line("ceiling_tolerance", fmt_double(m.ceiling_tolerance));
  line("boundary_tolerance", fmt_double(m.boundary_tolerance));
  line("l1_identity_factor", fmt_double(m.l1_identity_factor));
  line("negativity", std::string(to_string(m.negativity)));
  line("ceilings", std::string(to_string(m.ceilings)));
  line("uv_boundary", std::string(to_string(m.uv_boundary)));
  line("l1_identity", std::string(to_string(m.l1_identity)));

  out += "\n[output]\n";
  line("directory", c.output.directory);
  line("snapshot_every", fmt::format("{}", c.output.snapshot_every));

  out += "\n[random]\n";
  line("seed", fmt::format("{}", c.seed));
  return out;
}

InitialFields make_initial_fields(const RunConfig& c) {
  const Grid g = make_grid(c.grid);
  InitialFields out;
  for (Species s : kAllSpecies) {
    const InitialSpec& ic = c.initial[index_of(s)];
    const auto dim = static_cast<std::size_t>(g.dim());
    auto radius2 = [&](const Point& x) {
      double r2 = 0.0;
      for (std::size_t a = 0; a < dim; ++a) r2 += (x[a] - ic.center[a]) * (x[a] - ic.center[a]);
      return r2;
    };
    std::function<double(const Point&)> f;
    switch (ic.profile) {
      case Profile::constant: f = [&](const Point&) { return ic.value; }; break;
      case Profile::gaussian:
        f = [&](const Point& x) {
          return ic.value + ic.amplitude * std::exp(-radius2(x) / (2.0 * ic.width * ic.width));
        };
        break;
      case Profile::cosine:
        f = [&](const Point& x) {
          const Point xi = g.normalized(x);
          double p = 1.0;
          for (std::size_t a = 0; a < dim; ++a) p *= std::cos(ic.wavenumber * std::numbers::pi * xi[a]);
          return ic.value + ic.amplitude * p;
        };
        break;
      case Profile::bump:
        f = [&](const Point& x) {
          const double q = radius2(x) / (ic.width * ic.width);
          return q < 1.0 ? ic.value + ic.amplitude * std::exp(1.0 - 1.0 / (1.0 - q)) : ic.value;
        };
        break;
      case Profile::linear: f = [&](const Point& x) { return ic.value + ic.amplitude * g.normalized(x)[0]; }; break;
      case Profile::file: {
        out[index_of(s)] = read_snapshot(ic.path).to_field(g);
        continue;
      }
    }
    out[index_of(s)] = sample(g, f);
  }
  return out;
}

}  // namespace upasim::io
