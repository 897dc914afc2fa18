#include <algorithm>
#include <cmath>
#include <vector>

#include "kscluster/criteria.hpp"
#include "kscluster/errors.hpp"

namespace kscluster::criteria {

namespace {

class Counted {
 public:
  explicit Counted(const std::function<double(double)>& f) : f_(f) {}
  double operator()(double p) {
    ++count;
    double v = f_(p);
    if (!std::isfinite(v)) throw NumericError("objective is not finite", p);
    return v;
  }
  // Beyond the bracketed range an overflowing objective only loses the grid point.
  double lenient(double p) {
    ++count;
    double v = f_(p);
    return std::isfinite(v) ? v : -INFINITY;
  }
  int count = 0;

 private:
  const std::function<double(double)>& f_;
};

struct Golden {
  double arg;
  double value;
};

Golden golden_section(Counted& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    // Stop once the interior points coincide in floating point.
    if (!(c < d)) break;
  }
  double mid = 0.5 * (a + b);
  Golden best{mid, f(mid)};
  if (fc > best.value) best = {c, fc};
  if (fd > best.value) best = {d, fd};
  return best;
}

}  // namespace

ScalarMaximum optimize_scalar(const std::function<double(double)>& objective, const OptimizerOptions& opts) {
  if (!(opts.tol > 0) || !(opts.start > 0) || !(opts.ceiling > opts.start))
    throw ContractError("optimizer needs tol > 0 and 0 < start < ceiling");
  Counted f(objective);
  std::vector<double> ps, vs;
  int decreases = 0;
  for (double p = opts.start;; p *= 2.0) {
    if (p > opts.ceiling) p = opts.ceiling;
    double v = f(p);
    if (!vs.empty() && v < vs.back()) {
      ++decreases;
    } else {
      decreases = 0;
    }
    ps.push_back(p);
    vs.push_back(v);
    if (decreases >= 3 || p >= opts.ceiling) break;
  }
  ScalarMaximum out{};
  out.diagnostics.tolerance = opts.tol;
  std::size_t best = static_cast<std::size_t>(std::max_element(vs.begin(), vs.end()) - vs.begin());
  bool expanding = decreases < 3;
  out.diagnostics.hit_ceiling = expanding;
  if (expanding && vs.back() >= vs[best]) {
    // Still non-decreasing at the ceiling: the supremum sits at infinity.
    out.attained = false;
    out.argmax = ps.back();
    out.max = std::max(vs.back(), opts.limit_at_infinity);
    out.diagnostics.bracket_lo = ps.size() > 1 ? ps[ps.size() - 2] : ps.back();
    out.diagnostics.bracket_hi = ps.back();
    out.diagnostics.evaluations = f.count;
    return out;
  }
  double lo = best == 0 ? ps[0] * 0.5 : ps[best - 1];
  double hi = best + 1 < ps.size() ? ps[best + 1] : ps[best];
  Golden g = golden_section(f, lo, hi, opts.tol);
  out.diagnostics.bracket_lo = lo;
  out.diagnostics.bracket_hi = hi;

  // Log-spaced scan over the whole admissible range guards against a second, higher bump.
  double top = opts.ceiling;
  double ratio = std::log(top / opts.start);
  int n = std::max(opts.grid_points, 2);
  double grid_best = -INFINITY;
  int grid_idx = 0;
  std::vector<double> grid(static_cast<std::size_t>(n));
  double explored = ps.back();
  for (int i = 0; i < n; ++i) {
    grid[static_cast<std::size_t>(i)] = opts.start * std::exp(ratio * i / (n - 1));
    double v = grid[static_cast<std::size_t>(i)] <= explored ? f(grid[static_cast<std::size_t>(i)])
                                                             : f.lenient(grid[static_cast<std::size_t>(i)]);
    if (v > grid_best) {
      grid_best = v;
      grid_idx = i;
    }
  }
  if (grid_best > g.value + 10.0 * opts.tol) {
    double glo = grid[static_cast<std::size_t>(std::max(grid_idx - 1, 0))];
    double ghi = grid[static_cast<std::size_t>(std::min(grid_idx + 1, n - 1))];
    Golden g2 = golden_section(f, glo, ghi, opts.tol);
    out.diagnostics.reseeded = true;
    out.diagnostics.bracket_lo = glo;
    out.diagnostics.bracket_hi = ghi;
    if (g2.value > g.value) g = g2;
  }
  out.attained = true;
  out.argmax = g.arg;
  out.max = g.value;
  out.diagnostics.evaluations = f.count;
  return out;
}

}  // namespace kscluster::criteria
