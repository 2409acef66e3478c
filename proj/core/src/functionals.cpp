#include "upasim/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <fmt/format.h>

#include "upasim/errors.hpp"
#include "upasim/operators.hpp"
#include "upasim/parallel.hpp"
#include "upasim/summation.hpp"

namespace upasim {

double lp_norm(const Field& u, double p) {
  if (p == kInfinityNorm) {
    double m = 0.0;
    for (double v : u.values) m = std::max(m, std::abs(v));
    return m;
  }
  CompensatedSum s;
  if (p == 1.0) {
    for (double v : u.values) s.add(std::abs(v));
    return s.value() * u.grid.cell_volume();
  }
  if (p == 2.0) {
    for (double v : u.values) s.add(v * v);
    return std::sqrt(s.value() * u.grid.cell_volume());
  }
  if (p == 3.0) {
    for (double v : u.values) s.add(std::abs(v) * v * v);
    return std::cbrt(s.value() * u.grid.cell_volume());
  }
  throw DiagnosticError(fmt::format("lp_norm supports p in {{1, 2, 3, inf}}, got {}", p));
}

double gradient_l2_squared(const Field& u) {
  const FaceGradient g = face_gradient(u);
  CompensatedSum s;
  for (int a = 0; a < u.grid.dim(); ++a)
    for (double v : g.axis[static_cast<std::size_t>(a)]) s.add(v * v);
  return s.value() * u.grid.cell_volume();
}

// ---------------------------------------------------------------------------

FieldHistory::FieldHistory(Grid grid, std::vector<Species> tracked) : grid_(std::move(grid)), order_(std::move(tracked)) {
  for (Species s : order_) {
    if (tracked_[index_of(s)]) throw DiagnosticError(fmt::format("species {} tracked twice", name_of(s)));
    tracked_[index_of(s)] = true;
  }
}

void FieldHistory::append(const StateFields& state) {
  std::vector<Field> fields;
  fields.reserve(order_.size());
  for (Species s : order_) fields.push_back(state[s]);
  append(state.t, fields);
}

void FieldHistory::append(double t, std::span<const Field> fields) {
  if (fields.size() != order_.size())
    throw DiagnosticError(fmt::format("history tracks {} species, got {} fields", order_.size(), fields.size()));
  if (!times_.empty() && !(t > times_.back()))
    throw DiagnosticError(fmt::format("history times must increase strictly ({} after {})", t, times_.back()));
  for (const Field& f : fields)
    if (!(f.grid == grid_)) throw ShapeError("history sample lives on a different grid");
  times_.push_back(t);
  for (std::size_t i = 0; i < order_.size(); ++i) data_[index_of(order_[i])].push_back(fields[i].values);
}

std::span<const double> FieldHistory::values(Species s, std::size_t m) const {
  if (!tracked_[index_of(s)]) throw DiagnosticError(fmt::format("species {} is not in the history", name_of(s)));
  return data_[index_of(s)].at(m);
}

double FieldHistory::uniform_step() const {
  if (times_.size() < 2) throw DiagnosticError("history needs at least two samples");
  const double dt = (times_.back() - times_.front()) / static_cast<double>(times_.size() - 1);
  for (std::size_t m = 1; m < times_.size(); ++m)
    if (std::abs(times_[m] - times_[m - 1] - dt) > 1e-9 * dt)
      throw DiagnosticError(fmt::format("sample spacing is not uniform near t={}", times_[m]));
  return dt;
}

FieldHistory FieldHistory::thinned(std::size_t stride) const {
  if (stride == 0) throw DiagnosticError("thinning stride must be positive");
  FieldHistory out(grid_, order_);
  for (std::size_t m = 0; m < times_.size(); m += stride) {
    out.times_.push_back(times_[m]);
    for (Species s : order_) out.data_[index_of(s)].push_back(data_[index_of(s)][m]);
  }
  return out;
}

// ---------------------------------------------------------------------------

double v2_norm(const FieldHistory& h, Species s) {
  if (h.samples() < 2) throw DiagnosticError("v2_norm needs at least two samples");
  double sup = 0.0;
  CompensatedSum integral;
  double prev_g = 0.0;
  for (std::size_t m = 0; m < h.samples(); ++m) {
    const auto v = h.values(s, m);
    const Field u(h.grid(), std::vector<double>(v.begin(), v.end()));
    sup = std::max(sup, lp_norm(u, 2.0));
    const double g = gradient_l2_squared(u);
    if (m > 0) integral.add(0.5 * (h.times()[m] - h.times()[m - 1]) * (prev_g + g));
    prev_g = g;
  }
  return sup + std::sqrt(integral.value());
}

double space_time_l2_squared(const FieldHistory& h, Species s) {
  const double w = h.grid().cell_volume() * h.uniform_step();
  CompensatedSum sum;
  for (std::size_t m = 0; m < h.samples(); ++m)
    for (double v : h.values(s, m)) sum.add(v * v);
  return sum.value() * w;
}

namespace {

double squared_distance(const Point& a, const Point& b, int dim) noexcept {
  double d2 = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double d = a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)];
    d2 += d * d;
  }
  return d2;
}

// Deterministic parallel max: each chunk reduces locally, chunks are merged in order.
template <class F>
double parallel_max(std::size_t n, F&& body) {
  std::vector<std::pair<std::size_t, double>> partial;
  std::mutex lock;
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    double m = -1.0;
    for (std::size_t i = begin; i < end; ++i) m = std::max(m, body(i));
    std::scoped_lock guard(lock);
    partial.emplace_back(begin, m);
  });
  double m = -1.0;
  for (const auto& p : partial) m = std::max(m, p.second);
  return m;
}

}  // namespace

double campanato_seminorm(const FieldHistory& h, Species s, double mu, std::span<const double> radii) {
  if (!(mu >= 0.0)) throw DiagnosticError("Campanato exponent mu must be >= 0");
  if (radii.empty()) throw DiagnosticError("Campanato seminorm needs at least one radius");
  for (double r : radii)
    if (!(r > 0.0)) throw DiagnosticError(fmt::format("Campanato radius must be positive, got {}", r));
  const double dt_store = h.samples() > 1 ? h.uniform_step() : 1.0;
  if (h.samples() == 0) throw DiagnosticError("empty history");

  const Grid& g = h.grid();
  const int dim = g.dim();
  const std::size_t cells = g.size();
  const double weight = g.cell_volume() * dt_store;
  const auto& times = h.times();

  std::vector<Point> centers(cells);
  for (std::size_t k = 0; k < cells; ++k) centers[k] = g.center(k);

  double best = -1.0;
  for (double r : radii) {
    const double r2 = r * r;
    const double scale = std::pow(r, -mu);
    Index3 reach{0, 0, 0};
    for (int a = 0; a < dim; ++a)
      reach[static_cast<std::size_t>(a)] =
          static_cast<int>(std::ceil(r / g.spacing()[static_cast<std::size_t>(a)]));

    const double value = parallel_max(cells * times.size(), [&](std::size_t idx) {
      const std::size_t k0 = idx % cells;
      const std::size_t m0 = idx / cells;
      const Index3 c = g.coords(k0);
      Index3 lo{0, 0, 0}, hi{0, 0, 0};
      for (std::size_t a = 0; a < static_cast<std::size_t>(dim); ++a) {
        lo[a] = std::max(0, c[a] - reach[a]);
        hi[a] = std::min(g.cells()[a] - 1, c[a] + reach[a]);
      }
      std::vector<std::size_t> ball;
      for (int i2 = lo[2]; i2 <= hi[2]; ++i2)
        for (int i1 = lo[1]; i1 <= hi[1]; ++i1)
          for (int i0 = lo[0]; i0 <= hi[0]; ++i0) {
            const std::size_t k = g.index({i0, i1, i2});
            if (squared_distance(centers[k], centers[k0], dim) < r2) ball.push_back(k);
          }
      const double t0 = times[m0];
      std::size_t m_first = m0;
      while (m_first > 0 && times[m_first - 1] > t0 - r2) --m_first;
      const std::size_t count = ball.size() * (m0 - m_first + 1);
      if (count < 2) return -1.0;
      // Values are shifted by the cylinder's first point, so a constant cylinder gives 0 exactly.
      const double ref = h.values(s, m_first)[ball.front()];
      double sum = 0.0;
      for (std::size_t m = m_first; m <= m0; ++m) {
        const auto u = h.values(s, m);
        for (std::size_t k : ball) sum += u[k] - ref;
      }
      const double mean = sum / static_cast<double>(count);
      double dev = 0.0;
      for (std::size_t m = m_first; m <= m0; ++m) {
        const auto u = h.values(s, m);
        for (std::size_t k : ball) {
          const double e = (u[k] - ref) - mean;
          dev += e * e;
        }
      }
      return scale * (dev * weight);
    });
    best = std::max(best, value);
  }
  if (best < 0.0) throw DiagnosticError("every Campanato cylinder holds a single point; increase the radii");
  return best;
}

double holder_seminorm(const FieldHistory& h, Species s, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DiagnosticError("Hoelder exponent must lie in (0, 1)");
  const Grid& g = h.grid();
  const std::size_t cells = g.size();
  const std::size_t n = cells * h.samples();
  if (n < 2) throw DiagnosticError("Hoelder seminorm needs at least two space-time samples");
  const int dim = g.dim();
  std::vector<Point> centers(cells);
  for (std::size_t k = 0; k < cells; ++k) centers[k] = g.center(k);
  const auto& times = h.times();

  const double best = parallel_max(n, [&](std::size_t i) {
    const std::size_t k1 = i % cells, m1 = i / cells;
    const double u1 = h.values(s, m1)[k1];
    double m = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t k2 = j % cells, m2 = j / cells;
      const double dist = std::sqrt(squared_distance(centers[k1], centers[k2], dim));
      const double denom = std::pow(dist, alpha) + std::pow(std::abs(times[m1] - times[m2]), 0.5 * alpha);
      m = std::max(m, std::abs(u1 - h.values(s, m2)[k2]) / denom);
    }
    return m;
  });
  return std::max(best, 0.0);
}

// ---------------------------------------------------------------------------

void FunctionalSeries::record(const StateFields& state) {
  SeriesRecord r;
  r.t = state.t;
  for (std::size_t i = 0; i < 6; ++i) {
    const Field& u = state.fields[i];
    r.l1[i] = lp_norm(u, 1.0);
    r.l2[i] = lp_norm(u, 2.0);
    r.linf[i] = lp_norm(u, kInfinityNorm);
    r.min[i] = *std::min_element(u.values.begin(), u.values.end());
    const double g = gradient_l2_squared(u);
    if (records_.empty()) {
      r.sup_l2[i] = r.l2[i];
      r.grad_l2sq[i] = 0.0;
    } else {
      const SeriesRecord& p = records_.back();
      r.sup_l2[i] = std::max(p.sup_l2[i], r.l2[i]);
      r.grad_l2sq[i] = p.grad_l2sq[i] + 0.5 * (r.t - p.t) * (last_grad_[i] + g);
    }
    last_grad_[i] = g;
  }
  auto max_of = [&](Species s) {
    const auto& v = state[s].values;
    return *std::max_element(v.begin(), v.end());
  };
  if (max_uA_) r.margin_A = *max_uA_ - max_of(Species::A);
  if (max_uV_) r.margin_V = *max_uV_ - max_of(Species::V);
  records_.push_back(r);
}

}  // namespace upasim
