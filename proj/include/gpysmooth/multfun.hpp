#pragma once

// Multiplicative functions supported on squarefree integers, the weighted
// sums  sum_{n<=x, (n,q)=1 [, p|n => p<z]} g(n) log(x/n)^m  and the Euler
// products normalising their main terms.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "primes.hpp"
#include "tuple.hpp"

namespace gpysmooth {

using Rational = mpq_class;

/// A multiplicative function supported on squarefree n, given by g(p).
///
/// The tail data describe how close g(p) is to k/p:
/// |g(p) - k/p| <= tail_bound * p^(-1-tail_theta) for every prime p > tail_cutoff.
struct MultFuncSpec {
  std::string name;
  std::function<double(u64)> prime_value;
  /// Exact g(p); empty when g is not rational-valued.
  std::function<Rational(u64)> exact_prime_value;
  int dimension_k = 0;
  double tail_theta = 1.0;
  std::optional<double> tail_bound;
  u64 tail_cutoff = 1;

  double operator()(u64 p) const { return prime_value(p); }
  bool has_exact() const noexcept { return static_cast<bool>(exact_prime_value); }
};

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// num/den in canonical form.
template <class N, class D>
Rational make_rational(N num, D den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline const PrimeTable& small_prime_table() {
  static const PrimeTable table = generate_primes(100000);
  return table;
}

/// Checks the declared tail bound against every prime in (tail_cutoff, limit].
inline void verify_tail_bound(const MultFuncSpec& spec, u64 limit = 100000) {
  if (!spec.tail_bound) return;
  const double c = *spec.tail_bound;
  const PrimeTable& table = limit <= 100000 ? small_prime_table() : generate_primes(limit);
  for (u64 p : table.primes) {
    if (p > limit) break;
    if (p <= spec.tail_cutoff) continue;
    const double pd = static_cast<double>(p);
    const double dev = std::abs(spec(p) - spec.dimension_k / pd);
    const double allowed = c * std::pow(pd, -1.0 - spec.tail_theta);
    if (dev > allowed * (1.0 + 1e-9) + 1e-300) {
      throw ParameterError("tail bound of '" + spec.name + "' fails at p=" + std::to_string(p));
    }
  }
}

namespace specs {

inline MultFuncSpec finish(MultFuncSpec s) {
  verify_tail_bound(s);
  return s;
}

/// g(p) = k/p.
inline MultFuncSpec k_over_p(int k) {
  MultFuncSpec s;
  s.name = "k_over_p:" + std::to_string(k);
  s.prime_value = [k](u64 p) { return k / static_cast<double>(p); };
  s.exact_prime_value = [k](u64 p) { return make_rational(k, p); };
  s.dimension_k = k;
  s.tail_bound = 0.0;
  return finish(std::move(s));
}

/// mu^2(n)/n.
inline MultFuncSpec one_over_n() {
  MultFuncSpec s = k_over_p(1);
  s.name = "one_over_n";
  return s;
}

/// mu^2(n)/phi(n): g(p) = 1/(p-1) = 1/p + 1/(p(p-1)).
inline MultFuncSpec one_over_phi() {
  MultFuncSpec s;
  s.name = "one_over_phi";
  s.prime_value = [](u64 p) { return 1.0 / static_cast<double>(p - 1); };
  s.exact_prime_value = [](u64 p) { return make_rational(1, p - 1); };
  s.dimension_k = 1;
  s.tail_bound = 2.0;
  return finish(std::move(s));
}

/// mu^2(n) 2^omega(n)/n.
inline MultFuncSpec two_omega_over_n() {
  MultFuncSpec s = k_over_p(2);
  s.name = "two_omega_over_n";
  return s;
}

/// g(p) = nu_p/p for the roots of prod (n + h_i).
inline MultFuncSpec nu_over_p(const TupleSpec& tuple) {
  MultFuncSpec s;
  s.name = "nu_over_p:" + to_string(tuple);
  s.prime_value = [tuple](u64 p) { return static_cast<double>(nu_p(tuple, p)) / static_cast<double>(p); };
  s.exact_prime_value = [tuple](u64 p) { return make_rational(nu_p(tuple, p), p); };
  s.dimension_k = static_cast<int>(tuple.k());
  s.tail_bound = 0.0;
  s.tail_cutoff = std::max<u64>(1, tuple.span());
  return finish(std::move(s));
}

/// g(p) = (nu_p - 1)/phi(p).
inline MultFuncSpec nu_minus1_over_phi(const TupleSpec& tuple) {
  MultFuncSpec s;
  s.name = "nu_minus1_over_phi:" + to_string(tuple);
  s.prime_value = [tuple](u64 p) {
    return (static_cast<double>(nu_p(tuple, p)) - 1.0) / static_cast<double>(p - 1);
  };
  s.exact_prime_value = [tuple](u64 p) {
    return make_rational(static_cast<long>(nu_p(tuple, p)) - 1, p - 1);
  };
  const int k = static_cast<int>(tuple.k());
  s.dimension_k = k - 1;
  s.tail_bound = 2.0 * (k - 1);
  s.tail_cutoff = std::max<u64>(1, tuple.span());
  return finish(std::move(s));
}

/// mu(n) g(n): p -> -g(p), dimension -k.
inline MultFuncSpec signed_mu_times(const MultFuncSpec& base) {
  MultFuncSpec s;
  s.name = "signed_mu_times:" + base.name;
  auto value = base.prime_value;
  s.prime_value = [value](u64 p) { return -value(p); };
  if (base.has_exact()) {
    auto exact = base.exact_prime_value;
    s.exact_prime_value = [exact](u64 p) { return Rational(-exact(p)); };
  }
  s.dimension_k = -base.dimension_k;
  s.tail_theta = base.tail_theta;
  s.tail_bound = base.tail_bound;
  s.tail_cutoff = base.tail_cutoff;
  return finish(std::move(s));
}

}  // namespace specs

/// Builds a built-in spec from "name" or "name:argument":
///   k_over_p:<k>, one_over_n, one_over_phi, two_omega_over_n,
///   nu_over_p:<h1,h2,...>, nu_minus1_over_phi:<h1,...>,
///   signed_mu_times:<base spec text>
inline MultFuncSpec builtin_spec(std::string_view text) {
  const std::size_t colon = text.find(':');
  const std::string name(text.substr(0, colon));
  const std::string arg = colon == std::string_view::npos ? std::string() : std::string(text.substr(colon + 1));
  auto need_arg = [&] {
    if (arg.empty()) throw ParameterError("spec '" + name + "' needs an argument");
  };
  if (name == "one_over_n") return specs::one_over_n();
  if (name == "one_over_phi") return specs::one_over_phi();
  if (name == "two_omega_over_n") return specs::two_omega_over_n();
  if (name == "k_over_p") {
    need_arg();
    try {
      std::size_t used = 0;
      const int k = std::stoi(arg, &used);
      if (used == arg.size()) return specs::k_over_p(k);
    } catch (const std::logic_error&) {
    }
    throw ParameterError("bad k in '" + std::string(text) + "'");
  }
  if (name == "nu_over_p") {
    need_arg();
    return specs::nu_over_p(parse_tuple(arg));
  }
  if (name == "nu_minus1_over_phi") {
    need_arg();
    return specs::nu_minus1_over_phi(parse_tuple(arg));
  }
  if (name == "signed_mu_times") {
    need_arg();
    return specs::signed_mu_times(builtin_spec(arg));
  }
  throw ParameterError("unknown spec '" + name + "'");
}

struct SumResult {
  double value = 0.0;
  /// Present when requested, m = 0 and the spec is rational-valued.
  std::optional<Rational> exact_value;
  u64 terms = 0;
};

struct SumOptions {
  bool exact = false;
};

namespace detail {

inline Rational pairwise_sum(std::vector<Rational>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return v[lo];
  if (hi == lo) return Rational(0);
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

}  // namespace detail

/// sum over squarefree n <= x, (n,q)=1, p|n => p < z, of g(n) (log x/n)^m.
/// `table` must cover min(x, z).
inline SumResult m_sum_smooth(const MultFuncSpec& spec, double x, int m, u64 q, double z,
                              const PrimeTable& table, SumOptions options = {}) {
  if (m < 0) throw ParameterError("m must be nonnegative");
  const SmoothDomain dom = make_domain(x, z, q, table);
  std::vector<double> gp(dom.primes.size());
  for (std::size_t i = 0; i < gp.size(); ++i) gp[i] = spec(dom.primes[i]);

  SumResult result;
  CompensatedSum acc;
  if (m == 0) {
    fold_squarefree(dom, 1.0, [&](double g, std::size_t i) { return g * gp[i]; },
                    [&](u64, double g) {
                      acc.add(g);
                      ++result.terms;
                    });
  } else {
    fold_squarefree(dom, 1.0, [&](double g, std::size_t i) { return g * gp[i]; },
                    [&](u64 n, double g) {
                      const double l = std::log(x / static_cast<double>(n));
                      double w = l;
                      for (int j = 1; j < m; ++j) w *= l;
                      acc.add(g * w);
                      ++result.terms;
                    });
  }
  result.value = acc.value();

  if (options.exact && m == 0 && spec.has_exact()) {
    std::vector<Rational> ep(dom.primes.size());
    for (std::size_t i = 0; i < ep.size(); ++i) ep[i] = spec.exact_prime_value(dom.primes[i]);
    std::vector<Rational> terms;
    terms.reserve(result.terms);
    fold_squarefree(dom, Rational(1), [&](const Rational& g, std::size_t i) { return Rational(g * ep[i]); },
                    [&](u64, const Rational& g) { terms.push_back(g); });
    result.exact_value = detail::pairwise_sum(terms, 0, terms.size());
  }
  return result;
}

inline SumResult m_sum_smooth(const MultFuncSpec& spec, double x, int m, u64 q, double z,
                              SumOptions options = {}) {
  const u64 pmax = std::min(integer_bound(x), strict_integer_below(z));
  return m_sum_smooth(spec, x, m, q, z, generate_primes(pmax), options);
}

/// sum over squarefree n <= x, (n,q)=1, of g(n) (log x/n)^m.
inline SumResult m_sum(const MultFuncSpec& spec, double x, int m, u64 q, SumOptions options = {}) {
  return m_sum_smooth(spec, x, m, q, std::numeric_limits<double>::infinity(), options);
}

inline SumResult m_sum(const MultFuncSpec& spec, double x, int m, u64 q, const PrimeTable& table,
                       SumOptions options = {}) {
  return m_sum_smooth(spec, x, m, q, std::numeric_limits<double>::infinity(), table, options);
}

enum class SeriesVariant {
  /// prod_{p !| q} (1+g(p))(1-1/p)^k * prod_{p | q} (1-1/p)^k
  standard,
  /// prod_p (1-g(p))(1-1/p)^(-k), over all primes (q is ignored)
  a_normalization,
};

struct SeriesResult {
  double value = 0.0;
  /// Bound on |value - true product| from the truncation tail.
  double error_bound = 0.0;
  /// Largest prime multiplied in explicitly.
  u64 truncation = 0;
  /// False when the spec has no tail bound and the value is only a report.
  bool certified = true;
};

struct SeriesOptions {
  SeriesVariant variant = SeriesVariant::standard;
  /// Accept specs without a tail bound; the result is then uncertified.
  bool allow_uncertified = false;
  u64 max_truncation = u64{1} << 31;
};

/// Euler product with rigorous truncation control.
///
/// For p beyond the cutoff, |log factor(p)| <= c' p^(-1-t) with
/// t = min(theta, 1) and c' = c + (|k|+c)^2 + |k|, valid once |g(p)| <= 1/2.
/// The prime tail sum is bounded through pi(y) < 1.25506 y/log y:
///   sum_{p>P} p^(-1-t) <= 1.25506 (1+t) / (t log P) * P^(-t).
/// The cut point P doubles until that bound and the last change are both
/// below tol/2.
inline SeriesResult singular_series(const MultFuncSpec& spec, u64 q, double tol,
                                    SeriesOptions options = {}) {
  if (!(tol > 0)) throw ParameterError("tol must be positive");
  if (q == 0) throw ParameterError("modulus q must be positive");
  if (!spec.tail_bound && !options.allow_uncertified) {
    throw ParameterError("spec '" + spec.name + "' has no tail bound; product convergence is not certified");
  }
  const bool a_variant = options.variant == SeriesVariant::a_normalization;
  const std::vector<u64> qf = a_variant ? std::vector<u64>{} : distinct_prime_factors(q);
  const double k = spec.dimension_k;
  const double c = spec.tail_bound.value_or(0.0);
  const double theta = std::min(spec.tail_theta, 1.0);
  const double cprime = c + (std::abs(k) + c) * (std::abs(k) + c) + std::abs(k);

  auto factor = [&](u64 p) -> long double {
    const long double g = spec(p);
    const long double inv = 1.0L / static_cast<long double>(p);
    if (a_variant) return (1.0L - g) * std::pow(1.0L - inv, -static_cast<long double>(k));
    const long double local = std::pow(1.0L - inv, static_cast<long double>(k));
    if (std::binary_search(qf.begin(), qf.end(), p)) return local;
    return (1.0L + g) * local;
  };
  auto tail_log_bound = [&](double P) {
    return cprime * 1.25506 * (1.0 + theta) / (theta * std::log(P)) * std::pow(P, -theta);
  };

  u64 P = std::max<u64>({1024, spec.tail_cutoff, static_cast<u64>(std::ceil(2.0 * (std::abs(k) + c)))});
  long double prod = 1.0L;
  bool zero = false;
  for_each_prime_in(2, P, [&](u64 p) {
    const long double f = factor(p);
    if (f == 0.0L) zero = true;
    prod *= f;
  });
  if (zero) return SeriesResult{0.0, 0.0, P, true};

  // primes of q above P: the tail estimate treats them as p !| q; undo that.
  auto with_large_q_primes = [&](long double value, u64 cut) {
    for (u64 p : qf) {
      if (p > cut) value /= (1.0L + static_cast<long double>(spec(p)));
    }
    return value;
  };

  long double previous = with_large_q_primes(prod, P);
  for (;;) {
    const u64 next = P * 2;
    if (next > options.max_truncation) {
      const double T = tail_log_bound(static_cast<double>(P));
      const double err = std::abs(static_cast<double>(previous)) * std::expm1(T);
      throw ToleranceError("singular series truncation limit reached", err);
    }
    for_each_prime_in(P + 1, next, [&](u64 p) { prod *= factor(p); });
    P = next;
    const long double current = with_large_q_primes(prod, P);
    const double change = std::abs(static_cast<double>(current - previous));
    previous = current;
    const double T = spec.tail_bound ? tail_log_bound(static_cast<double>(P)) : 0.0;
    const double err = std::abs(static_cast<double>(current)) * std::expm1(T);
    if (err < tol / 2 && change < tol / 2) {
      return SeriesResult{static_cast<double>(current), err, P, spec.tail_bound.has_value()};
    }
  }
}

}  // namespace gpysmooth
