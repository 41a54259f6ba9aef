#pragma once

// The iterated sieve integrals
//
//   I_s(t, v) = int_0^1 (1-x)^(s-1)/(s-1)! [f(u x t; -s, m) P^(s)(x t)]^2 dx,   0 < v <= 1
//   I_s(t, v) = I_s(t, 1) - s int_1^v I_s((1 - 1/x) t, x - 1) (1 - 1/x)^s dx/x,  v > 1
//
// with P(x) = x^m, so P^(s)(y) = m!/(m-s)! y^(m-s). The argument u of f is a
// fixed kernel parameter; v only drives the recursion.

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "dde.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"

namespace gpysmooth {

struct SieveKernel {
  int s = 1;
  int m = 2;
  double u = 1.0;
  std::shared_ptr<const PanelSolution> f;
  /// When set, every I value is stored and returned as I * exp(-log_scale_L).
  bool log_scale = false;
  double log_scale_L = 0.0;
  /// max over x of (s-1) log(1-x) + 2(m-s) log x, folded into log_scale_L.
  double log_peak = 0.0;
  /// (m!/(m-s)!)^2/(s-1)!, or 1 when log-scaled.
  double coefficient = 1.0;

  double integrand(double x, double t) const {
    const double y = x * t;
    if (y <= 0.0) return 0.0;
    const double fv = (*f)(std::min(u * y, f->U));
    if (log_scale) {
      const double lg = (s - 1) * std::log1p(-x) + 2.0 * (m - s) * std::log(y) - log_peak;
      return std::exp(lg) * fv * fv;
    }
    const double py = std::pow(y, m - s) * fv;
    return coefficient * std::pow(1.0 - x, s - 1) * py * py;
  }

  /// Interior t-values j/u at which the base integrand changes regularity.
  std::vector<double> t_knots() const {
    std::vector<double> out;
    for (int j = 1; j < u; ++j) {
      const double t = j / u;
      if (t > 1e-9 && t < 1.0 - 1e-9) out.push_back(t);
    }
    return out;
  }
};

/// Kernel for I_s with f(.; -s, m) solved on (0, max(1, u)].
inline SieveKernel make_kernel(int s, int m, double u, bool log_scale = false, double f_tol = 1e-10) {
  if (s < 1) throw ParameterError("kernel needs s >= 1");
  if (m <= s) throw ParameterError("kernel needs m > s");
  if (!(u > 0.0)) throw ParameterError("kernel needs u > 0");
  SieveKernel kernel;
  kernel.s = s;
  kernel.m = m;
  kernel.u = u;
  kernel.f = std::make_shared<const PanelSolution>(solve_f(-s, m, std::max(1.0, u), f_tol));
  kernel.log_scale = log_scale;
  if (log_scale) {
    const double a = s - 1.0, b = 2.0 * (m - s);
    const double peak = b / (a + b);
    kernel.log_peak = (a > 0.0 ? a * std::log1p(-peak) : 0.0) + b * std::log(peak);
    kernel.log_scale_L = 2.0 * (std::lgamma(m + 1.0) - std::lgamma(m - s + 1.0)) -
                         std::lgamma(static_cast<double>(s)) + kernel.log_peak;
    kernel.coefficient = 1.0;
  } else {
    long double falling = 1.0L, fact = 1.0L;
    for (int j = 0; j < s; ++j) falling *= static_cast<long double>(m - j);
    for (int j = 2; j < s; ++j) fact *= j;
    kernel.coefficient = static_cast<double>(falling * falling / fact);
  }
  return kernel;
}

struct BaseOptions {
  double rel_tol = 1e-13;
  int order = 20;
};

/// I_s(t, 1). Quadrature pieces are cut where u x t crosses an integer and
/// around the peak of (1-x)^(s-1) x^(2(m-s)), which is narrow for large s.
inline double i_base(const SieveKernel& kernel, double t, BaseOptions options = {}) {
  if (!(t >= 0.0 && t <= 1.0)) throw RangeError("i_base needs t in [0, 1]");
  if (t == 0.0) return 0.0;
  std::vector<double> breaks;
  for (int j = 1; j < kernel.u * t; ++j) breaks.push_back(j / (kernel.u * t));
  const double a = kernel.s - 1.0, b = 2.0 * (kernel.m - kernel.s);
  const double peak = b / (a + b);
  if (a > 0.0 && peak > 0.0 && peak < 1.0) {
    const double curvature = a / ((1 - peak) * (1 - peak)) + b / (peak * peak);
    const double width = 1.0 / std::sqrt(curvature);
    for (double j : {-40.0, -20.0, -10.0, -6.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 6.0, 10.0, 20.0, 40.0}) {
      const double c = peak + j * width;
      if (c > 0.0 && c < 1.0) breaks.push_back(c);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  auto g = [&](double x) { return kernel.integrand(x, t); };
  // pieces far from the peak only need accuracy relative to the whole
  const double rough = std::abs(integrate_pieces(g, 0.0, 1.0, breaks, options.order));
  const double abs_tol = options.rel_tol * rough;
  double sum = 0.0, lo = 0.0;
  breaks.push_back(1.0);
  for (double c : breaks) {
    if (c <= lo) continue;
    sum += integrate_adaptive(g, lo, std::min(c, 1.0), abs_tol, options.rel_tol, options.order, 1);
    lo = c;
  }
  return sum;
}

struct TableOptions {
  /// Chebyshev-Lobatto points per t-panel.
  int n_t = 17;
  /// Chebyshev-Lobatto points per unit v-panel.
  int n_v = 17;
  /// Gauss-Legendre nodes per recursion quadrature piece.
  int quad_nodes = 16;
  unsigned threads = 1;
  /// Estimate the error against a half-resolution table and enforce tol.
  bool check = true;
};

/// Tabulation of I_s(t, v) for t in [0, 1], v in (0, ceil(v_max)].
///
/// t is split into panels at the knots j/u; each panel and each unit v-panel
/// (r, r+1] carries Chebyshev-Lobatto points, interpolated barycentrically.
class ITable {
 public:
  SieveKernel kernel;
  double v_max = 1.0;
  TableOptions options;
  std::vector<double> t_edges;
  std::vector<std::vector<double>> t_nodes;
  std::vector<std::vector<double>> base;
  /// v_nodes[r-1] spans [r, r+1].
  std::vector<std::vector<double>> v_nodes;
  /// values[r-1][tp][i * n_v + j] = I(t_nodes[tp][i], v_nodes[r-1][j]).
  std::vector<std::vector<std::vector<double>>> values;
  /// max_t |I(t, 1)|, the scale tolerances refer to.
  double scale = 0.0;
  /// Half-resolution comparison, relative to scale (0 when unchecked).
  double error_estimate = 0.0;

  std::size_t t_panel_of(double t) const {
    const auto it = std::upper_bound(t_edges.begin() + 1, t_edges.end() - 1, t);
    return static_cast<std::size_t>(it - t_edges.begin()) - 1;
  }

  /// Interpolated I(t, v); v <= 1 reads the tabulated base.
  double operator()(double t, double v) const {
    t = std::clamp(t, 0.0, 1.0);
    const std::size_t tp = t_panel_of(t);
    if (v <= 1.0) return barycentric_lobatto(t_nodes[tp], base[tp], t);
    const std::size_t r = std::min(static_cast<std::size_t>(std::ceil(v)) - 1, values.size());
    if (r == 0) return barycentric_lobatto(t_nodes[tp], base[tp], t);
    const std::vector<double>& vn = v_nodes[r - 1];
    const std::size_t nv = vn.size();
    double wv[64];
    barycentric_weights(vn, v, std::span<double>(wv, nv));
    const std::vector<double>& block = values[r - 1][tp];
    const std::size_t nt = t_nodes[tp].size();
    double row[64];
    for (std::size_t i = 0; i < nt; ++i) {
      double acc = 0.0;
      const double* vals = block.data() + i * nv;
      for (std::size_t j = 0; j < nv; ++j) acc += wv[j] * vals[j];
      row[i] = acc;
    }
    return barycentric_lobatto(t_nodes[tp], std::span<const double>(row, nt), t);
  }
};

namespace detail {

inline ITable build_table_unchecked(const SieveKernel& kernel, double v_max, TableOptions options) {
  if (options.n_t < 2 || options.n_t > 64 || options.n_v < 2 || options.n_v > 64) {
    throw ParameterError("table grid sizes must lie in [2, 64]");
  }
  ITable table;
  table.kernel = kernel;
  table.v_max = v_max;
  table.options = options;
  table.t_edges.push_back(0.0);
  for (double t : kernel.t_knots()) table.t_edges.push_back(t);
  table.t_edges.push_back(1.0);
  const std::size_t t_panels = table.t_edges.size() - 1;
  for (std::size_t tp = 0; tp < t_panels; ++tp) {
    table.t_nodes.push_back(lobatto_points(options.n_t - 1, table.t_edges[tp], table.t_edges[tp + 1]));
  }

  // flat list of (panel, node) work items for the parallel loops
  std::vector<std::pair<std::size_t, std::size_t>> items;
  for (std::size_t tp = 0; tp < t_panels; ++tp) {
    for (std::size_t i = 0; i < table.t_nodes[tp].size(); ++i) items.emplace_back(tp, i);
  }

  table.base.assign(t_panels, std::vector<double>(options.n_t));
  parallel_for(items.size(), options.threads, [&](std::size_t w) {
    const auto [tp, i] = items[w];
    table.base[tp][i] = i_base(kernel, table.t_nodes[tp][i]);
  });
  for (const auto& b : table.base) {
    for (double v : b) table.scale = std::max(table.scale, std::abs(v));
  }

  const std::size_t v_panels = v_max > 1.0 ? static_cast<std::size_t>(std::ceil(v_max - 1e-12)) - 1 : 0;
  const std::vector<double>& inner_knots = table.t_edges;
  const GaussLegendre& rule = gauss_legendre(options.quad_nodes);
  const int s = kernel.s;
  std::vector<std::vector<double>> cumulative(t_panels);
  for (std::size_t tp = 0; tp < t_panels; ++tp) cumulative[tp].assign(options.n_t, 0.0);

  for (std::size_t r = 1; r <= v_panels; ++r) {
    table.v_nodes.push_back(lobatto_points(options.n_v - 1, static_cast<double>(r), static_cast<double>(r + 1)));
    std::vector<std::vector<double>> block(t_panels, std::vector<double>(options.n_t * options.n_v));
    const std::vector<double>& vn = table.v_nodes.back();
    parallel_for(items.size(), options.threads, [&](std::size_t w) {
      const auto [tp, i] = items[w];
      const double t = table.t_nodes[tp][i];
      const double b = table.base[tp][i];
      auto g = [&](double x) {
        const double shrink = 1.0 - 1.0 / x;
        return table(shrink * t, x - 1.0) * std::pow(shrink, s) / x;
      };
      // x where (1 - 1/x) t meets a t-knot of the inner table
      std::vector<double> kinks;
      for (std::size_t l = 1; l + 1 < inner_knots.size(); ++l) {
        if (inner_knots[l] < t) kinks.push_back(1.0 / (1.0 - inner_knots[l] / t));
      }
      std::sort(kinks.begin(), kinks.end());
      double cum = cumulative[tp][i];
      double* out = block[tp].data() + i * options.n_v;
      out[0] = b - s * cum;
      for (int j = 1; j < options.n_v; ++j) {
        double lo = vn[j - 1];
        const double hi = vn[j];
        for (double c : kinks) {
          if (c <= lo || c >= hi) continue;
          cum += rule.integrate(g, lo, c);
          lo = c;
        }
        cum += rule.integrate(g, lo, hi);
        out[j] = b - s * cum;
      }
      cumulative[tp][i] = cum;
    });
    table.values.push_back(std::move(block));
  }
  return table;
}

}  // namespace detail

/// Builds the table by marching v one unit panel at a time. With
/// options.check, a half-resolution table is built as well and the largest
/// disagreement on a probe grid, relative to the table scale, must stay
/// below tol. Without v-panels every i_eval is a direct base integral and
/// there is nothing to check.
inline ITable build_table(const SieveKernel& kernel, double v_max, double tol, TableOptions options = {}) {
  if (!(v_max >= 1.0)) throw ParameterError("build_table needs v_max >= 1");
  ITable table = detail::build_table_unchecked(kernel, v_max, options);
  if (!options.check || table.values.empty()) return table;

  TableOptions coarse_options = options;
  coarse_options.n_t = std::max(3, (options.n_t + 1) / 2);
  coarse_options.n_v = std::max(3, (options.n_v + 1) / 2);
  const ITable coarse = detail::build_table_unchecked(kernel, v_max, coarse_options);
  double worst = 0.0;
  const double v_top = std::ceil(v_max - 1e-12);
  for (int a = 0; a <= 20; ++a) {
    const double t = a / 20.0;
    for (double v = 1.0; v <= v_top + 1e-12; v += 0.125) {
      worst = std::max(worst, std::abs(table(t, v) - coarse(t, v)));
    }
  }
  const double scale = table.scale > 0.0 ? table.scale : 1.0;
  table.error_estimate = worst / scale;
  if (!(table.error_estimate <= tol)) {
    throw ToleranceError("I_s table does not meet tolerance", table.error_estimate);
  }
  return table;
}

/// I_s(t, v): the direct base integral for v <= 1, the table otherwise.
inline double i_eval(const ITable& table, double t, double v) {
  if (!(t >= 0.0 && t <= 1.0)) throw RangeError("i_eval needs t in [0, 1]");
  if (!(v > 0.0) || v > table.v_max * (1.0 + 1e-12)) throw RangeError("i_eval needs v in (0, v_max]");
  if (v <= 1.0) return i_base(table.kernel, t);
  return table(t, v);
}

}  // namespace gpysmooth
