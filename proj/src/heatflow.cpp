#include "frbl/heatflow.hpp"

#include "frbl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace frbl {

namespace {

constexpr std::size_t kMaxGridNodes = 50'000'000;
constexpr std::size_t kMaxReportedNodes = 20;
constexpr double kInsideSlack = 1e-9;  // in units of the grid spacing

double trapezoid_factor(int idx, int n) { return (idx == 0 || idx == n - 1) ? 0.5 : 1.0; }

bool is_diagonal(const SymMatrix& a) {
  for (Index i = 0; i < a.dim(); ++i) {
    for (Index j = 0; j < a.dim(); ++j) {
      if (i != j && a(i, j) != 0.0) return false;
    }
  }
  return true;
}

void require_time(double t) {
  if (!std::isfinite(t) || t <= 0.0) throw InvalidInput("heat_step: t must be finite and > 0");
}

void require_weight(const GridFunction& f, const SymMatrix& weight) {
  if (weight.dim() != f.dim()) throw InvalidInput("heat weight dimension does not match the grid dimension");
  if (min_eigenvalue(weight) <= 0.0) throw NotPositiveDefinite("heat weight must be positive definite");
}

// One pass of a 1-D convolution along `axis` of a row-major array.
std::vector<double> convolve_axis(const UniformGrid& grid, const std::vector<double>& in, int axis,
                                  const std::vector<double>& kernel) {
  const int n = grid.n()[axis];
  std::size_t stride = 1;
  for (int a = grid.dim() - 1; a > axis; --a) stride *= static_cast<std::size_t>(grid.n()[a]);
  const std::size_t outer = grid.size() / (stride * n);
  const int reach = static_cast<int>(kernel.size()) - 1;

  std::vector<double> out(in.size(), 0.0);
  std::vector<double> line(n);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t s = 0; s < stride; ++s) {
      const std::size_t base = o * stride * n + s;
      bool any = false;
      for (int i = 0; i < n; ++i) {
        line[i] = in[base + i * stride] * trapezoid_factor(i, n);
        any = any || line[i] != 0.0;
      }
      if (!any) continue;
      for (int y = 0; y < n; ++y) {
        const double v = line[y];
        if (v == 0.0) continue;
        const int x_lo = std::max(0, y - reach);
        const int x_hi = std::min(n - 1, y + reach);
        for (int x = x_lo; x <= x_hi; ++x) out[base + x * stride] += v * kernel[std::abs(x - y)];
      }
    }
  }
  return out;
}

// Full 2-D kernel table for a non-diagonal weight.
std::vector<double> convolve_2d(const UniformGrid& grid, const std::vector<double>& in, double t,
                                const SymMatrix& weight, double r_cut) {
  const int n0 = grid.n()[0];
  const int n1 = grid.n()[1];
  const double h0 = grid.spacing(0);
  const double h1 = grid.spacing(1);
  const int r0 = std::min(n0 - 1, static_cast<int>(std::ceil(r_cut / h0)));
  const int r1 = std::min(n1 - 1, static_cast<int>(std::ceil(r_cut / h1)));
  const Matrix a_inv = inverse_pd(weight).matrix();
  const double norm = h0 * h1 / (4.0 * std::numbers::pi * t * std::sqrt(weight.matrix().determinant()));

  const int w0 = 2 * r0 + 1;
  const int w1 = 2 * r1 + 1;
  std::vector<double> table(static_cast<std::size_t>(w0) * w1, 0.0);
  for (int di = -r0; di <= r0; ++di) {
    for (int dj = -r1; dj <= r1; ++dj) {
      const double u = di * h0;
      const double v = dj * h1;
      if (u * u + v * v > r_cut * r_cut) continue;
      const double q = a_inv(0, 0) * u * u + 2.0 * a_inv(0, 1) * u * v + a_inv(1, 1) * v * v;
      table[static_cast<std::size_t>(di + r0) * w1 + (dj + r1)] = norm * std::exp(-q / (4.0 * t));
    }
  }

  std::vector<double> out(in.size(), 0.0);
  for (int yi = 0; yi < n0; ++yi) {
    for (int yj = 0; yj < n1; ++yj) {
      const double v = in[static_cast<std::size_t>(yi) * n1 + yj] * trapezoid_factor(yi, n0) *
                       trapezoid_factor(yj, n1);
      if (v == 0.0) continue;
      const int xi_lo = std::max(0, yi - r0);
      const int xi_hi = std::min(n0 - 1, yi + r0);
      const int xj_lo = std::max(0, yj - r1);
      const int xj_hi = std::min(n1 - 1, yj + r1);
      for (int xi = xi_lo; xi <= xi_hi; ++xi) {
        const double* row = &table[static_cast<std::size_t>(xi - yi + r0) * w1];
        double* dst = &out[static_cast<std::size_t>(xi) * n1];
        for (int xj = xj_lo; xj <= xj_hi; ++xj) dst[xj] += v * row[xj - yj + r1];
      }
    }
  }
  return out;
}

std::string format_point(const Vector& x) {
  std::ostringstream os;
  os.precision(6);
  os << '(';
  for (Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << ')';
  return os.str();
}

SymMatrix weight_or_identity(const std::vector<SymMatrix>& weights, std::size_t idx, int dim) {
  if (weights.empty()) return SymMatrix::identity(dim);
  return weights.at(idx);
}

struct Scan {
  DefectSample sample;
  std::vector<std::string> violations;
  std::size_t violation_count = 0;
};

// Evaluates the defect at every node of the E_0 product grid.
Scan scan_defect(const FrblDatum& datum, const UniformGrid& e0, std::span<const GridFunction> f,
                 std::span<const GridFunction> g, double tol, bool keep_field, bool collect_violations) {
  const auto& layout = datum.layout();
  const int k = layout.k();
  const int m = layout.m();
  Scan scan;
  DefectSample& s = scan.sample;
  s.min_defect = std::numeric_limits<double>::infinity();
  if (keep_field) s.field.assign(e0.size(), std::numeric_limits<double>::quiet_NaN());

  std::vector<Vector> y_parts(m);
  for (int j = 0; j < m; ++j) y_parts[j].resize(layout.out_dim(j));

  std::vector<double> defects;
  defects.reserve(collect_violations ? e0.size() : 0);
  double max_g = 0.0;
  for (std::size_t flat = 0; flat < e0.size(); ++flat) {
    const std::vector<int> idx = e0.unravel(flat);
    const Vector x = e0.node(flat);

    double f_side = 1.0;
    for (int i = 0; i < k; ++i) {
      const auto& fg = f[i].grid();
      std::size_t fi = 0;
      for (int a = 0; a < layout.in_dim(i); ++a) fi = fi * fg.n()[a] + idx[layout.in_offset(i) + a];
      f_side *= std::pow(f[i].values()[fi], datum.c()[i]);
    }

    const Vector y = datum.q() * x;
    double g_side = 1.0;
    bool inside = true;
    for (int j = 0; j < m && inside; ++j) {
      y_parts[j] = y.segment(layout.out_offset(j), layout.out_dim(j));
      const auto v = g[j].interpolate(y_parts[j]);
      if (!v) {
        inside = false;
        break;
      }
      g_side *= std::pow(std::max(*v, 0.0), datum.d()[j]);
    }
    if (!inside) {
      ++s.skipped;
      if (collect_violations) defects.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    ++s.evaluated;
    max_g = std::max(max_g, g_side);
    const double defect = g_side - f_side;
    if (keep_field) s.field[flat] = defect;
    if (collect_violations) defects.push_back(defect);
    if (defect < s.min_defect) {
      s.min_defect = defect;
      s.argmin = x;
    }
  }
  s.max_g_side = max_g;
  if (s.evaluated == 0) {
    s.min_defect = 0.0;
    s.argmin = Vector::Zero(e0.dim());
  }
  const double threshold = -tol * (1.0 + max_g);
  s.holds = s.min_defect >= threshold;

  if (collect_violations && !s.holds) {
    for (std::size_t flat = 0; flat < defects.size(); ++flat) {
      if (!(defects[flat] < threshold)) continue;
      ++scan.violation_count;
      if (scan.violations.size() < kMaxReportedNodes) {
        std::ostringstream os;
        os << "node " << flat << " x = " << format_point(e0.node(flat)) << " defect = " << defects[flat];
        scan.violations.push_back(os.str());
      }
    }
  }
  return scan;
}

UniformGrid product_grid(std::span<const GridFunction> f) {
  std::vector<double> lo, hi;
  std::vector<int> n;
  for (const auto& fi : f) {
    const auto& g = fi.grid();
    lo.insert(lo.end(), g.lo().begin(), g.lo().end());
    hi.insert(hi.end(), g.hi().begin(), g.hi().end());
    n.insert(n.end(), g.n().begin(), g.n().end());
  }
  return UniformGrid(std::move(lo), std::move(hi), std::move(n));
}

void require_grids(const FrblDatum& datum, std::span<const GridFunction> f, std::span<const GridFunction> g) {
  const auto& layout = datum.layout();
  if (static_cast<int>(f.size()) != layout.k()) throw InvalidInput("number of f grids does not match k");
  if (static_cast<int>(g.size()) != layout.m()) throw InvalidInput("number of g grids does not match m");
  for (int i = 0; i < layout.k(); ++i) {
    if (f[i].dim() != layout.in_dim(i)) throw InvalidInput("f grid " + std::to_string(i) + " has the wrong dimension");
  }
  for (int j = 0; j < layout.m(); ++j) {
    if (g[j].dim() != layout.out_dim(j)) throw InvalidInput("g grid " + std::to_string(j) + " has the wrong dimension");
  }
}

void require_times(std::span<const double> times) {
  for (double t : times) {
    if (!std::isfinite(t) || t < 0.0) throw InvalidInput("times must be finite and >= 0");
  }
}

}  // namespace

UniformGrid::UniformGrid(std::vector<double> lo, std::vector<double> hi, std::vector<int> n)
    : lo_(std::move(lo)), hi_(std::move(hi)), n_(std::move(n)) {
  if (n_.empty() || n_.size() > 3) throw InvalidInput("grid dimension must be 1, 2 or 3");
  if (lo_.size() != n_.size() || hi_.size() != n_.size()) throw InvalidInput("grid lo/hi/n lengths differ");
  size_ = 1;
  for (std::size_t a = 0; a < n_.size(); ++a) {
    if (!std::isfinite(lo_[a]) || !std::isfinite(hi_[a]) || !(hi_[a] > lo_[a])) {
      throw InvalidInput("grid bounds must be finite with hi > lo");
    }
    if (n_[a] < 2) throw InvalidInput("grid needs at least 2 nodes per axis");
    size_ *= static_cast<std::size_t>(n_[a]);
    if (size_ > kMaxGridNodes) throw InvalidInput("grid has too many nodes");
  }
}

std::vector<int> UniformGrid::unravel(std::size_t flat) const {
  std::vector<int> idx(n_.size());
  for (int a = dim() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % n_[a]);
    flat /= n_[a];
  }
  return idx;
}

Vector UniformGrid::node(std::size_t flat) const {
  const auto idx = unravel(flat);
  Vector x(dim());
  for (int a = 0; a < dim(); ++a) x(a) = coordinate(a, idx[a]);
  return x;
}

double UniformGrid::weight(std::size_t flat) const {
  const auto idx = unravel(flat);
  double w = 1.0;
  for (int a = 0; a < dim(); ++a) w *= spacing(a) * trapezoid_factor(idx[a], n_[a]);
  return w;
}

double UniformGrid::max_extent() const {
  double e = 0.0;
  for (int a = 0; a < dim(); ++a) e = std::max(e, hi_[a] - lo_[a]);
  return e;
}

bool UniformGrid::contains(const Vector& x) const {
  if (x.size() != dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    const double slack = kInsideSlack * spacing(a);
    if (!(x(a) >= lo_[a] - slack && x(a) <= hi_[a] + slack)) return false;
  }
  return true;
}

GridFunction::GridFunction(UniformGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (grid_.dim() > 2) throw InvalidInput("grid functions live on spaces of dimension 1 or 2");
  if (values_.size() != grid_.size()) throw InvalidInput("grid values length does not match the node count");
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw InvalidInput("grid values must be finite and non-negative");
  }
}

GridFunction GridFunction::sample(const UniformGrid& grid, const std::function<double(const Vector&)>& f) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = f(grid.node(i));
  return GridFunction(grid, std::move(values));
}

std::optional<double> GridFunction::interpolate(const Vector& x) const {
  if (!grid_.contains(x)) return std::nullopt;
  const int d = dim();
  int base[2] = {0, 0};
  double frac[2] = {0.0, 0.0};
  for (int a = 0; a < d; ++a) {
    const int n = grid_.n()[a];
    const double s = std::clamp((x(a) - grid_.lo()[a]) / grid_.spacing(a), 0.0, static_cast<double>(n - 1));
    base[a] = std::min(static_cast<int>(std::floor(s)), n - 2);
    frac[a] = s - base[a];
  }
  if (d == 1) return (1.0 - frac[0]) * values_[base[0]] + frac[0] * values_[base[0] + 1];
  const std::size_t n1 = grid_.n()[1];
  const std::size_t r0 = static_cast<std::size_t>(base[0]) * n1 + base[1];
  const std::size_t r1 = r0 + n1;
  const double lower = (1.0 - frac[1]) * values_[r0] + frac[1] * values_[r0 + 1];
  const double upper = (1.0 - frac[1]) * values_[r1] + frac[1] * values_[r1 + 1];
  return (1.0 - frac[0]) * lower + frac[0] * upper;
}

double GridFunction::value_or_zero(const Vector& x) const { return interpolate(x).value_or(0.0); }

double GridFunction::integral() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] != 0.0) sum += grid_.weight(i) * values_[i];
  }
  return sum;
}

double GridFunction::sup() const { return *std::max_element(values_.begin(), values_.end()); }

GridFunction GridFunction::plus_constant(double delta) const {
  std::vector<double> v = values_;
  for (double& x : v) x += delta;
  return GridFunction(grid_, std::move(v));
}

GridFunction heat_step(const GridFunction& f, double t, const SymMatrix& weight) {
  require_time(t);
  require_weight(f, weight);
  const auto& grid = f.grid();
  const double r_cut = 8.0 * std::sqrt(2.0 * t * max_eigenvalue(weight));
  if (r_cut > 10.0 * grid.max_extent()) {
    throw AccuracyError("heat kernel truncation radius " + std::to_string(r_cut) +
                        " exceeds ten times the grid extent; enlarge the grid or reduce t");
  }

  if (f.dim() == 1 || is_diagonal(weight)) {
    std::vector<double> values = f.values();
    for (int a = 0; a < grid.dim(); ++a) {
      const double h = grid.spacing(a);
      const double w = weight(a, a);
      const int reach = std::min(grid.n()[a] - 1, static_cast<int>(std::floor(r_cut / h)));
      std::vector<double> kernel(reach + 1);
      const double norm = h / std::sqrt(4.0 * std::numbers::pi * t * w);
      for (int dlt = 0; dlt <= reach; ++dlt) {
        const double u = dlt * h;
        kernel[dlt] = norm * std::exp(-u * u / (4.0 * t * w));
      }
      values = convolve_axis(grid, values, a, kernel);
    }
    return GridFunction(grid, std::move(values));
  }
  return GridFunction(grid, convolve_2d(grid, f.values(), t, weight, r_cut));
}

GridFunction heat_step(const GridFunction& f, double t) { return heat_step(f, t, SymMatrix::identity(f.dim())); }

double log_heat_value_at(const GridFunction& f, double t, const SymMatrix& weight, const Vector& x) {
  require_time(t);
  require_weight(f, weight);
  if (x.size() != f.dim()) throw InvalidInput("evaluation point has the wrong dimension");
  const Matrix a_inv = inverse_pd(weight).matrix();
  const auto& grid = f.grid();

  std::vector<double> terms;
  terms.reserve(grid.size());
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = f.values()[i];
    if (v == 0.0) continue;
    const Vector r = x - grid.node(i);
    const double term = std::log(v) + std::log(grid.weight(i)) - r.dot(a_inv * r) / (4.0 * t);
    terms.push_back(term);
    peak = std::max(peak, term);
  }
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (double term : terms) sum += std::exp(term - peak);
  const double n = f.dim();
  return peak + std::log(sum) - 0.5 * n * std::log(4.0 * std::numbers::pi * t) - 0.5 * log_det_pd(weight);
}

DefectField verify_preservation(const FrblDatum& datum, std::span<const GridFunction> f_grids,
                                std::span<const GridFunction> g_grids, std::span<const double> times,
                                const PreservationOptions& options) {
  require_grids(datum, f_grids, g_grids);
  require_times(times);
  const auto& layout = datum.layout();
  if (layout.total_in() > 3) throw InvalidInput("defect scan supports dim(E_0) <= 3");
  if (!(options.tol >= 0.0)) throw InvalidInput("tolerance must be >= 0");
  if (!(options.delta >= 0.0) || !std::isfinite(options.delta)) throw InvalidInput("delta must be finite and >= 0");
  if (!options.weights_in.empty() && static_cast<int>(options.weights_in.size()) != layout.k()) {
    throw InvalidInput("need one input heat weight per E_i");
  }
  if (!options.weights_out.empty() && static_cast<int>(options.weights_out.size()) != layout.m()) {
    throw InvalidInput("need one output heat weight per E^j");
  }

  std::vector<GridFunction> g0;
  for (const auto& g : g_grids) g0.push_back(options.delta == 0.0 ? g : g.plus_constant(options.delta));

  DefectField out{.samples = {}, .holds = true, .tol = options.tol, .e0_grid = product_grid(f_grids)};
  const auto& e0 = out.e0_grid;

  Scan initial = scan_defect(datum, e0, f_grids, g0, options.tol, false, true);
  if (!initial.sample.holds) {
    std::vector<std::string> details = std::move(initial.violations);
    if (initial.violation_count > details.size()) {
      details.push_back("... " + std::to_string(initial.violation_count - details.size()) + " more");
    }
    throw PreconditionViolated("relation violated at t = 0 on " + std::to_string(initial.violation_count) +
                                   " node(s)",
                               std::move(details));
  }

  for (double t : times) {
    DefectSample s;
    if (t == 0.0) {
      s = scan_defect(datum, e0, f_grids, g0, options.tol, options.keep_field, false).sample;
    } else {
      std::vector<GridFunction> ft, gt;
      for (int i = 0; i < layout.k(); ++i) {
        ft.push_back(heat_step(f_grids[i], t, weight_or_identity(options.weights_in, i, layout.in_dim(i))));
      }
      for (int j = 0; j < layout.m(); ++j) {
        gt.push_back(heat_step(g0[j], t, weight_or_identity(options.weights_out, j, layout.out_dim(j))));
      }
      s = scan_defect(datum, e0, ft, gt, options.tol, options.keep_field, false).sample;
    }
    s.t = t;
    out.holds = out.holds && s.holds;
    out.samples.push_back(std::move(s));
  }
  return out;
}

std::vector<MonotoneSample> monotone_functional(const FrblDatum& datum, std::span<const GridFunction> g_grids,
                                                std::span<const double> times, const UniformGrid& e0_grid) {
  const auto& layout = datum.layout();
  if (layout.k() != 1 || std::abs(datum.c()[0] - 1.0) > kScalingTol) {
    throw InvalidInput("monotone functional needs k = 1 and c = (1)");
  }
  if (static_cast<int>(g_grids.size()) != layout.m()) throw InvalidInput("number of g grids does not match m");
  for (int j = 0; j < layout.m(); ++j) {
    if (g_grids[j].dim() != layout.out_dim(j)) throw InvalidInput("g grid " + std::to_string(j) + " has the wrong dimension");
  }
  if (e0_grid.dim() != layout.total_in()) throw InvalidInput("E_0 grid has the wrong dimension");
  require_times(times);

  // Q x and the trapezoid weight at each E_0 node do not depend on t.
  std::vector<Vector> images(e0_grid.size());
  std::vector<double> weights(e0_grid.size());
  for (std::size_t n = 0; n < e0_grid.size(); ++n) {
    images[n] = datum.q() * e0_grid.node(n);
    weights[n] = e0_grid.weight(n);
  }

  std::vector<MonotoneSample> out;
  for (double t : times) {
    std::vector<GridFunction> gt;
    for (const auto& g : g_grids) gt.push_back(t == 0.0 ? g : heat_step(g, t));
    double sum = 0.0;
    for (std::size_t n = 0; n < e0_grid.size(); ++n) {
      double prod = 1.0;
      for (int j = 0; j < layout.m() && prod != 0.0; ++j) {
        const Vector y = images[n].segment(layout.out_offset(j), layout.out_dim(j));
        prod *= std::pow(std::max(gt[j].value_or_zero(y), 0.0), datum.d()[j]);
      }
      sum += weights[n] * prod;
    }
    out.push_back({t, sum});
  }
  return out;
}

ConstantEstimate extract_constant(const FrblDatum& datum, std::span<const GridFunction> f_grids,
                                  std::span<const GridFunction> g_grids, double t_large, bool check_relation,
                                  double tol) {
  require_grids(datum, f_grids, g_grids);
  require_time(t_large);
  if (check_relation) {
    const double none = 0.0;
    PreservationOptions opts;
    opts.tol = tol;
    verify_preservation(datum, f_grids, g_grids, std::span<const double>(&none, 0), opts);
  }
  const auto& layout = datum.layout();
  const double log_4pit = std::log(4.0 * std::numbers::pi * t_large);

  auto rescaled = [&](const GridFunction& h, const char* side, int idx) {
    const int n = h.dim();
    const double v = log_heat_value_at(h, t_large, SymMatrix::identity(n), Vector::Zero(n));
    if (!std::isfinite(v)) {
      throw AccuracyError(std::string("evolved ") + side + std::to_string(idx) + " vanishes at the origin");
    }
    return 0.5 * n * log_4pit + v;
  };

  double log_ratio = 0.0;
  for (int i = 0; i < layout.k(); ++i) log_ratio += datum.c()[i] * rescaled(f_grids[i], "f", i);
  for (int j = 0; j < layout.m(); ++j) log_ratio -= datum.d()[j] * rescaled(g_grids[j], "g", j);
  return {t_large, log_ratio, std::exp(log_ratio)};
}

}  // namespace frbl
