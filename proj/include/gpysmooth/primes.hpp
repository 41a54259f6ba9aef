#pragma once

// Prime tables, factorisation of moduli, and depth-first enumeration of
// squarefree smooth integers coprime to a modulus.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "errors.hpp"

namespace gpysmooth {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

/// Largest x accepted by the enumerators.
inline constexpr u64 kMaxEnumerationBound = u64{1} << 62;

struct PrimeTable {
  u64 limit = 0;
  std::vector<u64> primes;

  bool covers(u64 n) const noexcept { return n <= limit; }
};

/// Sieve of Eratosthenes over odd numbers.
inline PrimeTable generate_primes(u64 limit) {
  PrimeTable table;
  table.limit = limit;
  if (limit < 2) return table;
  table.primes.push_back(2);
  if (limit < 3) return table;
  // index i represents 2i+1
  const u64 half = (limit - 1) / 2 + 1;
  std::vector<bool> composite(half, false);
  for (u64 i = 1; i < half; ++i) {
    if (composite[i]) continue;
    const u64 p = 2 * i + 1;
    table.primes.push_back(p);
    if (p > limit / p) continue;
    for (u64 j = (p * p) / 2; j < half; j += p) composite[j] = true;
  }
  return table;
}

/// Calls visit(p) for every prime p in [lo, hi], in increasing order.
/// Segmented, so memory is O(sqrt(hi) + segment).
template <class Visit>
void for_each_prime_in(u64 lo, u64 hi, Visit&& visit) {
  if (hi < 2 || lo > hi) return;
  lo = std::max<u64>(lo, 2);
  const u64 root = static_cast<u64>(std::sqrt(static_cast<double>(hi))) + 1;
  const PrimeTable base = generate_primes(root);
  constexpr u64 kSegment = u64{1} << 20;
  std::vector<bool> composite;
  for (u64 seg_lo = lo; seg_lo <= hi;) {
    const u64 seg_hi = (hi - seg_lo < kSegment) ? hi : seg_lo + kSegment - 1;
    composite.assign(seg_hi - seg_lo + 1, false);
    for (u64 p : base.primes) {
      if (p * p > seg_hi) break;
      u64 start = std::max(p * p, (seg_lo + p - 1) / p * p);
      for (u64 j = start; j <= seg_hi; j += p) composite[j - seg_lo] = true;
    }
    for (u64 n = seg_lo; n <= seg_hi; ++n) {
      if (!composite[n - seg_lo]) visit(n);
      if (n == seg_hi) break;
    }
    if (seg_hi == hi) break;
    seg_lo = seg_hi + 1;
  }
}

namespace detail {

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(u128{a} * b % m); }

inline u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

}  // namespace detail

/// Deterministic Miller-Rabin for 64-bit integers.
inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    u64 x = detail::powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int r = 1; r < s; ++r) {
      x = detail::mulmod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

namespace detail {

// Pollard-Brent; n is odd composite.
inline u64 pollard_rho(u64 n) {
  for (u64 c = 1;; ++c) {
    auto f = [&](u64 x) { return (mulmod(x, x, n) + c) % n; };
    u64 x = 2, y = 2, d = 1;
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      d = std::gcd(x > y ? x - y : y - x, n);
    }
    if (d != n) return d;
  }
}

inline void collect_factors(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  u64 d = pollard_rho(n);
  collect_factors(d, out);
  collect_factors(n / d, out);
}

}  // namespace detail

/// Distinct prime divisors of n, increasing. Trial division up to 10^4,
/// Pollard rho for whatever cofactor remains.
inline std::vector<u64> distinct_prime_factors(u64 n) {
  std::vector<u64> out;
  if (n <= 1) return out;
  for (u64 p = 2; p < 10000 && p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) {
    std::vector<u64> big;
    detail::collect_factors(n, big);
    out.insert(out.end(), big.begin(), big.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// A squarefree integer with its increasing list of prime factors.
struct FactoredInt {
  u64 value = 1;
  std::vector<u64> factors;
};

/// Integer bound floor(x) for a real bound x >= 1, range-checked.
inline u64 integer_bound(double x) {
  if (!(x >= 1.0)) throw ParameterError("bound x must be >= 1");
  if (x > static_cast<double>(kMaxEnumerationBound)) {
    throw RangeError("bound x exceeds 2^62");
  }
  return static_cast<u64>(std::floor(x));
}

/// Largest integer strictly below a real z (primes p < z are those <= this).
inline u64 strict_integer_below(double z) {
  if (z > static_cast<double>(kMaxEnumerationBound)) return kMaxEnumerationBound;
  const double f = std::floor(z);
  const u64 r = static_cast<u64>(f);
  return f == z ? r - 1 : r;
}

/// The primes an enumeration may use: p < z, p <= x, p not dividing q.
struct SmoothDomain {
  u64 bound = 1;
  std::vector<u64> primes;
};

/// Filters `table` down to the admissible primes. Throws RangeError when the
/// table does not reach min(z, x).
inline SmoothDomain make_domain(double x, double z, u64 q, const PrimeTable& table) {
  if (q == 0) throw ParameterError("modulus q must be positive");
  SmoothDomain dom;
  dom.bound = integer_bound(x);
  const u64 pmax = std::min(dom.bound, strict_integer_below(z));
  if (!table.covers(pmax)) throw RangeError("prime table does not cover min(z, x)");
  const std::vector<u64> qf = distinct_prime_factors(q);
  for (u64 p : table.primes) {
    if (p > pmax) break;
    if (!std::binary_search(qf.begin(), qf.end(), p)) dom.primes.push_back(p);
  }
  return dom;
}

namespace detail {

template <class State, class Extend, class Visit>
void smooth_dfs(std::span<const u64> primes, std::size_t start, u64 n, u64 bound,
                const State& state, Extend& extend, Visit& visit) {
  const u64 room = bound / n;
  for (std::size_t i = start; i < primes.size(); ++i) {
    const u64 p = primes[i];
    if (p > room) break;
    const State next = extend(state, i);
    visit(n * p, next);
    smooth_dfs(primes, i + 1, n * p, bound, next, extend, visit);
  }
}

}  // namespace detail

/// Folds a per-node state through the depth-first enumeration of squarefree
/// n <= dom.bound built from dom.primes. visit(n, state) is called once per
/// n, starting with n = 1 carrying `root`; extend(state, i) derives the state
/// of n*p from that of n, where p = dom.primes[i].
template <class State, class Extend, class Visit>
void fold_squarefree(const SmoothDomain& dom, const State& root, Extend&& extend, Visit&& visit) {
  visit(u64{1}, root);
  detail::smooth_dfs(std::span<const u64>(dom.primes), 0, 1, dom.bound, root, extend, visit);
}

/// Visits every squarefree n <= x, (n, q) = 1, whose prime factors are all
/// < z, including n = 1. Order is depth-first lexicographic on the
/// factorisation and is identical across runs.
template <class Visit>
void enumerate_squarefree_smooth(double x, double z, u64 q, const PrimeTable& table,
                                 Visit&& visit) {
  const SmoothDomain dom = make_domain(x, z, q, table);
  FactoredInt node;
  node.factors.reserve(16);
  visit(static_cast<const FactoredInt&>(node));
  auto rec = [&](auto&& self, std::size_t start) -> void {
    const u64 room = dom.bound / node.value;
    for (std::size_t i = start; i < dom.primes.size(); ++i) {
      const u64 p = dom.primes[i];
      if (p > room) break;
      node.value *= p;
      node.factors.push_back(p);
      visit(static_cast<const FactoredInt&>(node));
      self(self, i + 1);
      node.factors.pop_back();
      node.value /= p;
    }
  };
  rec(rec, 0);
}

/// Convenience overload that sieves its own table.
template <class Visit>
void enumerate_squarefree_smooth(double x, double z, u64 q, Visit&& visit) {
  const u64 pmax = std::min(integer_bound(x), strict_integer_below(z));
  enumerate_squarefree_smooth(x, z, q, generate_primes(pmax), std::forward<Visit>(visit));
}

}  // namespace gpysmooth
