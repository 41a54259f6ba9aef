#pragma once

// Sieve parameters, the asymptotic coefficient
//     C = (k theta / 2) I_{k-1}(1, u) - I_k(1, u),   u = theta / (2 delta),
// of the smoothed GPY sieve with P(x) = x^m, and a scanner over (k, m).

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "iterints.hpp"
#include "multfun.hpp"
#include "parallel.hpp"
#include "tuple.hpp"

namespace gpysmooth {

struct SieveParams {
  int k = 2;
  int m = 3;
  double theta = 0.5;
  double delta = 0.25;

  double u() const noexcept { return theta / (2.0 * delta); }

  void validate() const {
    if (k < 2) throw ParameterError("sieve needs k >= 2");
    if (m <= k) throw ParameterError("sieve needs m > k");
    if (!(theta > 0.0 && theta <= 1.0)) throw ParameterError("theta must lie in (0, 1]");
    if (!(delta > 0.0)) throw ParameterError("delta must be positive");
  }
};

/// prod_p (1 - nu_p/p)(1 - 1/p)^(-k); zero for an inadmissible tuple.
inline SeriesResult tuple_singular_series(const TupleSpec& tuple, double tol) {
  if (!is_admissible(tuple)) return SeriesResult{0.0, 0.0, 0, true};
  SeriesOptions options;
  options.variant = SeriesVariant::a_normalization;
  return singular_series(specs::nu_over_p(tuple), 1, tol, options);
}

/// (l+1)(2l+k+1) / (k(2l+1)): the theta at which the unsmoothed coefficient
/// changes sign, l = m - k.
inline double gpy_threshold_closed_form(int k, int ell) {
  const double l = ell;
  return (l + 1.0) * (2.0 * l + k + 1.0) / (k * (2.0 * l + 1.0));
}

struct CoefficientOptions {
  /// Store I values as I * exp(-L); needed once (m!)^2 overflows.
  bool log_scale = false;
  unsigned threads = 1;
  TableOptions table;
};

struct CoefficientReport {
  SieveParams params;
  double u = 0.0;
  /// All of I_k, I_{k-1}, T1, T2 and C are reported times exp(-log_scale).
  double log_scale = 0.0;
  double I_k = 0.0;
  double I_km1 = 0.0;
  /// k theta / 2 * I_{k-1}(1, u)
  double T1 = 0.0;
  /// I_k(1, u)
  double T2 = 0.0;
  double coefficient = 0.0;
  /// |C| / max(|T1|, |T2|); small values mean C lost digits to cancellation.
  double cancellation = 0.0;
  /// theta - theta0, where theta0 = 2 I_k / (k I_{k-1}) zeroes C at this u.
  double margin = 0.0;
  /// Largest table error estimate of the two I evaluations (0 when u <= 1).
  double error_estimate = 0.0;
  bool experimental = false;
};

namespace detail {

struct IValue {
  double value = 0.0;
  double log_scale = 0.0;
  double error_estimate = 0.0;
  bool scaled = false;
};

inline IValue i_at_one(int s, int m, double u, double tol, const CoefficientOptions& options) {
  const SieveKernel kernel = make_kernel(s, m, u, options.log_scale);
  IValue out;
  out.scaled = kernel.log_scale;
  out.log_scale = kernel.log_scale ? kernel.log_scale_L : 0.0;
  if (u <= 1.0) {
    out.value = i_base(kernel, 1.0);
    return out;
  }
  TableOptions table_options = options.table;
  table_options.threads = options.threads;
  const ITable table = build_table(kernel, u, tol, table_options);
  out.value = table(1.0, u);
  out.error_estimate = table.error_estimate;
  return out;
}

inline CoefficientReport assemble(const SieveParams& params, const IValue& ik, const IValue& ikm1) {
  CoefficientReport r;
  r.params = params;
  r.u = params.u();
  // common scale: that of I_k
  r.log_scale = ik.log_scale;
  r.I_k = ik.value;
  r.I_km1 = ikm1.value * std::exp(ikm1.log_scale - ik.log_scale);
  r.T1 = 0.5 * params.k * params.theta * r.I_km1;
  r.T2 = r.I_k;
  r.coefficient = r.T1 - r.T2;
  const double big = std::max(std::abs(r.T1), std::abs(r.T2));
  r.cancellation = big > 0.0 ? std::abs(r.coefficient) / big : 0.0;
  r.margin = params.theta - 2.0 * r.I_k / (params.k * r.I_km1);
  r.error_estimate = std::max(ik.error_estimate, ikm1.error_estimate);
  r.experimental = ik.scaled;
  return r;
}

}  // namespace detail

/// C for the given parameters. For u <= 1 both I values are base integrals
/// with f = 1; otherwise each comes from a table marched to v = u.
inline CoefficientReport zhang_coefficient(const SieveParams& params, double tol,
                                           CoefficientOptions options = {}) {
  params.validate();
  if (!(tol > 0.0)) throw ParameterError("tol must be positive");
  const double u = params.u();
  const detail::IValue ik = detail::i_at_one(params.k, params.m, u, tol, options);
  const detail::IValue ikm1 = detail::i_at_one(params.k - 1, params.m, u, tol, options);
  return detail::assemble(params, ik, ikm1);
}

/// theta0 = 2 I_k(1,1) / (k I_{k-1}(1,1)) from quadrature, the unsmoothed
/// threshold for the given (k, m).
inline double gpy_threshold(int k, int m, bool log_scale = false) {
  SieveParams p{k, m, 1.0, 1.0};
  p.validate();
  CoefficientOptions options;
  options.log_scale = log_scale;
  const detail::IValue ik = detail::i_at_one(k, m, 0.5, 1.0, options);
  const detail::IValue ikm1 = detail::i_at_one(k - 1, m, 0.5, 1.0, options);
  return 2.0 * ik.value / (k * ikm1.value) * std::exp(ik.log_scale - ikm1.log_scale);
}

struct ScanCell {
  int k = 0;
  int m = 0;
  /// Empty when the cell was evaluated; otherwise why it was skipped.
  std::string rejected;
  CoefficientReport report;
};

struct ScanOptions {
  CoefficientOptions coefficient;
  unsigned threads = 1;
};

/// Evaluates every (k, m) with k in [k_lo, k_hi], m in [m_lo, m_hi], in
/// increasing (k, m) order. Cells violating m > k or k >= 2 are kept as
/// rejected rows. Each I_s(1, u) is computed once and shared by the two
/// cells that need it; the distinct (s, m) evaluations run in parallel.
inline std::vector<ScanCell> scan(std::pair<int, int> k_range, std::pair<int, int> m_range, double theta,
                                  double delta, double tol, ScanOptions options = {}) {
  if (k_range.first > k_range.second || m_range.first > m_range.second) {
    throw ParameterError("scan ranges must be nonempty");
  }
  if (!(tol > 0.0)) throw ParameterError("tol must be positive");
  std::vector<ScanCell> cells;
  std::map<std::pair<int, int>, std::size_t> slot;
  std::vector<std::pair<int, int>> work;
  auto need = [&](int s, int m) {
    if (slot.emplace(std::make_pair(s, m), work.size()).second) work.emplace_back(s, m);
  };
  for (int k = k_range.first; k <= k_range.second; ++k) {
    for (int m = m_range.first; m <= m_range.second; ++m) {
      ScanCell cell;
      cell.k = k;
      cell.m = m;
      SieveParams p{k, m, theta, delta};
      try {
        p.validate();
        need(k, m);
        need(k - 1, m);
      } catch (const ParameterError& e) {
        cell.rejected = e.what();
      }
      cell.report.params = p;
      cell.report.u = p.u();
      cells.push_back(std::move(cell));
    }
  }

  const double u = theta / (2.0 * delta);
  std::vector<detail::IValue> values(work.size());
  CoefficientOptions inner = options.coefficient;
  inner.threads = 1;
  parallel_for(work.size(), options.threads, [&](std::size_t i) {
    values[i] = detail::i_at_one(work[i].first, work[i].second, u, tol, inner);
  });

  for (ScanCell& cell : cells) {
    if (!cell.rejected.empty()) continue;
    cell.report = detail::assemble(cell.report.params, values[slot.at({cell.k, cell.m})],
                                   values[slot.at({cell.k - 1, cell.m})]);
  }
  return cells;
}

}  // namespace gpysmooth
