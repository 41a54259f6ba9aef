#pragma once

// Empirical checks of exact sums against their asymptotic main terms, the
// Buchstab-type identity for smooth sums, and the weighted-sum limit.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dde.hpp"
#include "errors.hpp"
#include "multfun.hpp"
#include "parallel.hpp"
#include "primes.hpp"

namespace gpysmooth {

struct ConvergenceRow {
  double x = 0.0;
  double exact = 0.0;
  double predicted = 0.0;
  double ratio = 0.0;
  /// |ratio - 1|
  double residual = 0.0;
};

struct ConvergenceReport {
  std::string kind;
  std::string spec;
  int k = 0;
  int m = 0;
  u64 q = 1;
  std::optional<double> u;
  std::vector<ConvergenceRow> rows;
  /// Number of steps along the x ladder where the residual grew.
  int non_monotone_steps = 0;
  /// Residuals decrease, with at most one flagged exception.
  bool passed = false;
  /// Least-squares slope of log residual against log log x.
  double slope = 0.0;
};

inline std::vector<double> default_x_ladder(bool extended = false) {
  std::vector<double> xs{1e4, 1e5, 1e6, 1e7};
  if (extended) xs.push_back(1e8);
  return xs;
}

struct VerifyOptions {
  unsigned threads = 1;
  /// Tolerance for the singular series.
  double series_tol = 1e-8;
};

namespace detail {

inline void finish_report(ConvergenceReport& report) {
  report.non_monotone_steps = 0;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    if (report.rows[i].residual > report.rows[i - 1].residual) ++report.non_monotone_steps;
  }
  bool finite = true;
  for (const auto& row : report.rows) finite = finite && std::isfinite(row.ratio);
  report.passed = finite && report.non_monotone_steps <= 1;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& row : report.rows) {
    if (!(row.residual > 0.0) || row.x <= std::exp(1.0)) continue;
    const double lx = std::log(std::log(row.x)), ly = std::log(row.residual);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  const double den = n * sxx - sx * sx;
  report.slope = (n >= 2 && den != 0.0) ? (n * sxy - sx * sy) / den : 0.0;
}

inline void check_ladder(const std::vector<double>& xs) {
  if (xs.empty()) throw ParameterError("x ladder is empty");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] >= 2.0)) throw ParameterError("x ladder entries must be >= 2");
    if (i && !(xs[i] > xs[i - 1])) throw ParameterError("x ladder must be increasing");
  }
}

inline double main_term(double series, int k, int m, double x) {
  // S(q) m!/(k+m)! (log x)^(k+m)
  const double n = k + m;
  return series * std::exp(std::lgamma(m + 1.0) - std::lgamma(n + 1.0) + n * std::log(std::log(x)));
}

}  // namespace detail

/// Rows of M_g(x, m, q) against S(q) m!/(k+m)! (log x)^(k+m).
inline ConvergenceReport check_theorem1(const MultFuncSpec& spec, int m, u64 q, const std::vector<double>& xs,
                                        VerifyOptions options = {}) {
  if (m < 0 || m < -spec.dimension_k) throw ParameterError("theorem 1 needs m >= max(0, -k)");
  detail::check_ladder(xs);
  const double series = singular_series(spec, q, options.series_tol).value;
  const PrimeTable table = generate_primes(integer_bound(xs.back()));

  ConvergenceReport report;
  report.kind = "theorem1";
  report.spec = spec.name;
  report.k = spec.dimension_k;
  report.m = m;
  report.q = q;
  report.rows.resize(xs.size());
  parallel_for(xs.size(), options.threads, [&](std::size_t i) {
    ConvergenceRow& row = report.rows[i];
    row.x = xs[i];
    row.exact = m_sum(spec, xs[i], m, q, table).value;
    row.predicted = detail::main_term(series, spec.dimension_k, m, xs[i]);
    row.ratio = row.exact / row.predicted;
    row.residual = std::abs(row.ratio - 1.0);
  });
  detail::finish_report(report);
  return report;
}

/// Rows of M_g(x, m, q, x^(1/u)) against f(u; k, m) times the theorem 1 term.
inline ConvergenceReport check_theorem2(const MultFuncSpec& spec, int m, u64 q, double u,
                                        const std::vector<double>& xs, VerifyOptions options = {}) {
  if (m < 0 || m < -spec.dimension_k) throw ParameterError("theorem 2 needs m >= max(0, -k)");
  if (!(u > 0.0)) throw ParameterError("u must be positive");
  detail::check_ladder(xs);
  double fu = 1.0;
  if (u > 1.0) fu = solve_f(spec.dimension_k, m, u, 1e-10)(u);
  const double series = singular_series(spec, q, options.series_tol).value;
  const PrimeTable table = generate_primes(integer_bound(xs.back()));

  ConvergenceReport report;
  report.kind = "theorem2";
  report.spec = spec.name;
  report.k = spec.dimension_k;
  report.m = m;
  report.q = q;
  report.u = u;
  report.rows.resize(xs.size());
  parallel_for(xs.size(), options.threads, [&](std::size_t i) {
    ConvergenceRow& row = report.rows[i];
    row.x = xs[i];
    const double z = std::pow(xs[i], 1.0 / u);
    row.exact = m_sum_smooth(spec, xs[i], m, q, z, table).value;
    row.predicted = fu * detail::main_term(series, spec.dimension_k, m, xs[i]);
    row.ratio = row.exact / row.predicted;
    row.residual = std::abs(row.ratio - 1.0);
  });
  detail::finish_report(report);
  return report;
}

struct BuchstabResult {
  double smooth = 0.0;
  double full = 0.0;
  double correction = 0.0;
  /// |S(x,q,z) - S(x,q,x) + correction| / (1 + |S(x,q,x)|)
  double residual = 0.0;
};

/// S(x,q,z) = S(x,q,x) - sum_{z <= p < x, p !| q} g(p) S(x/p, q, p),
/// S(x,q,z) the z-smooth sum with weight (log x/n)^m. Every term is an
/// exact enumeration.
inline BuchstabResult check_buchstab(const MultFuncSpec& spec, double x, u64 q, double z, int m) {
  if (!(z >= 2.0 && z <= x)) throw ParameterError("buchstab check needs 2 <= z <= x");
  const PrimeTable table = generate_primes(integer_bound(x));
  BuchstabResult r;
  r.smooth = m_sum_smooth(spec, x, m, q, z, table).value;
  r.full = m_sum_smooth(spec, x, m, q, x, table).value;
  const std::vector<u64> qf = distinct_prime_factors(q);
  CompensatedSum corr;
  for (u64 p : table.primes) {
    const double pd = static_cast<double>(p);
    if (pd < z) continue;
    if (pd >= x) break;
    if (std::binary_search(qf.begin(), qf.end(), p)) continue;
    corr.add(spec(p) * m_sum_smooth(spec, x / pd, m, q, pd, table).value);
  }
  r.correction = corr.value();
  r.residual = std::abs(r.smooth - r.full + r.correction) / (1.0 + std::abs(r.full));
  return r;
}

/// sum_{n<=x} g(n) G(log(x/n)/log x) against
/// S(1) (log x)^k/(k-1)! int_0^1 (1-t)^(k-1) G(t) dt,
/// G given by its coefficients in powers of t.
inline ConvergenceReport check_weight_lemma(const MultFuncSpec& spec, const std::vector<double>& G,
                                            const std::vector<double>& xs, VerifyOptions options = {}) {
  const int k = spec.dimension_k;
  if (k < 1) throw ParameterError("weight lemma needs k >= 1");
  if (G.empty()) throw ParameterError("G needs at least one coefficient");
  detail::check_ladder(xs);
  const double series = singular_series(spec, 1, options.series_tol).value;
  // int_0^1 (1-t)^(k-1) t^j dt = j! (k-1)! / (k+j)!
  double integral = 0.0;
  for (std::size_t j = 0; j < G.size(); ++j) {
    integral += G[j] * std::exp(std::lgamma(j + 1.0) + std::lgamma(k * 1.0) - std::lgamma(k + j + 1.0));
  }
  const PrimeTable table = generate_primes(integer_bound(xs.back()));

  ConvergenceReport report;
  report.kind = "weight";
  report.spec = spec.name;
  report.k = k;
  report.m = static_cast<int>(G.size()) - 1;
  report.q = 1;
  report.rows.resize(xs.size());
  parallel_for(xs.size(), options.threads, [&](std::size_t i) {
    ConvergenceRow& row = report.rows[i];
    const double x = xs[i], L = std::log(x);
    row.x = x;
    CompensatedSum acc;
    for (std::size_t j = 0; j < G.size(); ++j) {
      if (G[j] == 0.0) continue;
      acc.add(G[j] * m_sum(spec, x, static_cast<int>(j), 1, table).value / std::pow(L, static_cast<double>(j)));
    }
    row.exact = acc.value();
    row.predicted = series * std::pow(L, k) / std::exp(std::lgamma(k * 1.0)) * integral;
    row.ratio = row.exact / row.predicted;
    row.residual = std::abs(row.ratio - 1.0);
  });
  detail::finish_report(report);
  return report;
}

}  // namespace gpysmooth
