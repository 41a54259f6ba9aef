#pragma once

// Integer tuples h_1 < ... < h_k, local root counts nu_p, admissibility.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "primes.hpp"

namespace gpysmooth {

struct TupleSpec {
  std::vector<std::int64_t> offsets;

  TupleSpec() = default;
  explicit TupleSpec(std::vector<std::int64_t> h) : offsets(std::move(h)) {
    if (offsets.empty()) throw ParameterError("tuple must have at least one offset");
    for (std::size_t i = 1; i < offsets.size(); ++i) {
      if (offsets[i] <= offsets[i - 1]) throw ParameterError("tuple offsets must be strictly increasing");
    }
  }

  std::size_t k() const noexcept { return offsets.size(); }

  /// h_k - h_1; every prime above it has nu_p = k.
  std::uint64_t span() const noexcept {
    return static_cast<std::uint64_t>(offsets.back() - offsets.front());
  }

  /// Shifted so the first offset is 0.
  TupleSpec normalized() const {
    std::vector<std::int64_t> h(offsets);
    for (auto& v : h) v -= offsets.front();
    return TupleSpec(std::move(h));
  }
};

/// Number of distinct residues -h_i mod p, i.e. roots of prod (n + h_i) mod p.
inline std::uint64_t nu_p(const TupleSpec& tuple, std::uint64_t p) {
  if (p < 2) throw ParameterError("nu_p needs a prime modulus");
  if (p > tuple.span()) return tuple.k();
  std::vector<std::uint64_t> residues;
  residues.reserve(tuple.k());
  const auto ip = static_cast<std::int64_t>(p);
  for (std::int64_t h : tuple.offsets) residues.push_back(static_cast<std::uint64_t>(((-h % ip) + ip) % ip));
  std::sort(residues.begin(), residues.end());
  return static_cast<std::uint64_t>(std::unique(residues.begin(), residues.end()) - residues.begin());
}

/// nu_p < p for all primes p <= k (larger primes cannot be covered).
inline bool is_admissible(const TupleSpec& tuple) {
  for (std::uint64_t p : generate_primes(tuple.k()).primes) {
    if (nu_p(tuple, p) >= p) return false;
  }
  return true;
}

/// The first k primes greater than k, shifted to start at 0.
inline TupleSpec first_k_tuple(std::size_t k) {
  if (k < 1) throw ParameterError("first_k_tuple needs k >= 1");
  std::vector<std::int64_t> h;
  for (std::uint64_t limit = 2 * k + 64; h.size() < k; limit *= 2) {
    h.clear();
    for (std::uint64_t p : generate_primes(limit).primes) {
      if (p <= k) continue;
      h.push_back(static_cast<std::int64_t>(p));
      if (h.size() == k) break;
    }
  }
  return TupleSpec(std::move(h)).normalized();
}

inline std::string to_string(const TupleSpec& tuple) {
  std::string out;
  for (std::size_t i = 0; i < tuple.k(); ++i) {
    if (i) out += ',';
    out += std::to_string(tuple.offsets[i]);
  }
  return out;
}

/// Parses "0,2,6".
inline TupleSpec parse_tuple(const std::string& text) {
  std::vector<std::int64_t> h;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      h.push_back(std::stoll(item, &used));
      if (used != item.size()) throw ParameterError("bad tuple entry '" + item + "'");
    } catch (const std::logic_error&) {
      throw ParameterError("bad tuple entry '" + item + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return TupleSpec(std::move(h));
}

}  // namespace gpysmooth
