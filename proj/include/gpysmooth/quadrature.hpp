#pragma once

// Gauss-Legendre rules, Chebyshev series on an interval, and barycentric
// interpolation at Chebyshev-Lobatto points.

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "errors.hpp"

namespace gpysmooth {

/// n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) : nodes(n), weights(n) {
    if (n < 1) throw ParameterError("Gauss-Legendre order must be positive");
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p1 = 1.0, p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
        }
        dp = n * (z * p1 - p2) / (z * z - 1.0);
        const double step = p1 / dp;
        z -= step;
        if (std::abs(step) < 1e-16) break;
      }
      // recompute the derivative at the converged root for the weight
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double w = 2.0 / ((1.0 - z * z) * dp * dp);
      nodes[i] = -z;
      nodes[n - 1 - i] = z;
      weights[i] = w;
      weights[n - 1 - i] = w;
    }
  }

  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + half * nodes[i]);
    return sum * half;
  }
};

/// Shared, lazily built rule of order n.
inline const GaussLegendre& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendre>(n);
  return *slot;
}

/// Composite Gauss-Legendre over the pieces of [a, b] cut at `breaks`
/// (breaks outside (a, b) are ignored; must be increasing).
template <class F>
double integrate_pieces(F&& f, double a, double b, std::span<const double> breaks, int order) {
  const GaussLegendre& rule = gauss_legendre(order);
  double sum = 0.0, lo = a;
  for (double c : breaks) {
    if (c <= lo || c >= b) continue;
    sum += rule.integrate(f, lo, c);
    lo = c;
  }
  return sum + rule.integrate(f, lo, b);
}

namespace detail {

template <class F>
double adaptive_step(F& f, const GaussLegendre& rule, double a, double b, double whole,
                     double abs_tol, double rel_tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = rule.integrate(f, a, mid);
  const double right = rule.integrate(f, mid, b);
  const double both = left + right;
  if (depth <= 0 || std::abs(both - whole) <= std::max(abs_tol, rel_tol * std::abs(both))) {
    return both;
  }
  return adaptive_step(f, rule, a, mid, left, 0.5 * abs_tol, rel_tol, depth - 1) +
         adaptive_step(f, rule, mid, b, right, 0.5 * abs_tol, rel_tol, depth - 1);
}

}  // namespace detail

/// Bisection-adaptive Gauss-Legendre. The interval is first cut into
/// `initial` equal pieces so narrow peaks are not straddled by the first rule.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol,
                          int order = 20, int initial = 4, int max_depth = 30) {
  const GaussLegendre& rule = gauss_legendre(order);
  double sum = 0.0;
  const double h = (b - a) / initial;
  for (int i = 0; i < initial; ++i) {
    const double lo = a + i * h, hi = (i + 1 == initial) ? b : a + (i + 1) * h;
    const double whole = rule.integrate(f, lo, hi);
    sum += detail::adaptive_step(f, rule, lo, hi, whole, abs_tol / initial, rel_tol, max_depth);
  }
  return sum;
}

/// Chebyshev-Lobatto points of degree n on [a, b], increasing.
inline std::vector<double> lobatto_points(int n, double a, double b) {
  std::vector<double> x(n + 1);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int j = 0; j <= n; ++j) x[j] = mid - half * std::cos(std::numbers::pi * j / n);
  x[0] = a;
  x[n] = b;
  return x;
}

/// Barycentric interpolation through values sampled at lobatto_points(n, a, b).
inline double barycentric_lobatto(std::span<const double> nodes, std::span<const double> values,
                                  double x) {
  const std::size_t n = nodes.size() - 1;
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    const double d = x - nodes[j];
    if (d == 0.0) return values[j];
    double w = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == n) w *= 0.5;
    w /= d;
    num += w * values[j];
    den += w;
  }
  return num / den;
}

/// Barycentric weights for evaluation at x (normalised to sum to one), so a
/// single x can be applied to many value vectors sharing the same nodes.
inline void barycentric_weights(std::span<const double> nodes, double x, std::span<double> out) {
  const std::size_t n = nodes.size() - 1;
  for (std::size_t j = 0; j <= n; ++j) {
    if (x == nodes[j]) {
      for (std::size_t i = 0; i <= n; ++i) out[i] = (i == j) ? 1.0 : 0.0;
      return;
    }
  }
  double den = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    double w = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == n) w *= 0.5;
    w /= (x - nodes[j]);
    out[j] = w;
    den += w;
  }
  for (std::size_t j = 0; j <= n; ++j) out[j] /= den;
}

/// Truncated Chebyshev series sum_k c_k T_k(y) on [a, b], y the affine image.
struct ChebyshevSeries {
  double a = -1.0;
  double b = 1.0;
  std::vector<double> coeffs;

  /// Interpolant through values at lobatto_points(n, a, b).
  static ChebyshevSeries from_lobatto(std::span<const double> values, double a, double b) {
    const int n = static_cast<int>(values.size()) - 1;
    ChebyshevSeries s{a, b, std::vector<double>(n + 1, 0.0)};
    if (n == 0) {
      s.coeffs[0] = values[0];
      return s;
    }
    // lobatto_points are increasing, i.e. y_j = -cos(pi j / n) = cos(pi (n-j) / n)
    for (int k = 0; k <= n; ++k) {
      double sum = 0.0;
      for (int j = 0; j <= n; ++j) {
        double term = values[n - j] * std::cos(std::numbers::pi * j * k / n);
        if (j == 0 || j == n) term *= 0.5;
        sum += term;
      }
      sum *= 2.0 / n;
      if (k == 0 || k == n) sum *= 0.5;
      s.coeffs[k] = sum;
    }
    return s;
  }

  double operator()(double x) const {
    const double y = (2.0 * x - a - b) / (b - a);
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 1;) {
      const double t = 2.0 * y * b1 - b2 + coeffs[k];
      b2 = b1;
      b1 = t;
    }
    return y * b1 - b2 + coeffs[0];
  }

  /// Antiderivative vanishing at a.
  ChebyshevSeries integral() const {
    const std::size_t n = coeffs.size();
    ChebyshevSeries F{a, b, std::vector<double>(n + 1, 0.0)};
    auto c = [&](std::size_t k) { return k < n ? coeffs[k] : 0.0; };
    const double half = 0.5 * (b - a);
    if (n >= 1) F.coeffs[1] = half * (c(0) - 0.5 * c(2));
    for (std::size_t k = 2; k <= n; ++k) F.coeffs[k] = half * (c(k - 1) - c(k + 1)) / (2.0 * k);
    double at_a = 0.0;
    for (std::size_t k = 1; k <= n; ++k) at_a += (k % 2 == 0 ? 1.0 : -1.0) * F.coeffs[k];
    F.coeffs[0] = -at_a;
    return F;
  }

  ChebyshevSeries derivative() const {
    const std::size_t n = coeffs.size();
    ChebyshevSeries d{a, b, std::vector<double>(n > 1 ? n - 1 : 1, 0.0)};
    if (n <= 1) return d;
    std::vector<double> c(n + 1, 0.0);
    for (std::size_t k = n - 1; k-- > 0;) c[k] = c[k + 2] + 2.0 * (k + 1) * coeffs[k + 1];
    c[0] *= 0.5;
    const double scale = 2.0 / (b - a);
    for (std::size_t k = 0; k + 1 < n; ++k) d.coeffs[k] = c[k] * scale;
    return d;
  }
};

}  // namespace gpysmooth
