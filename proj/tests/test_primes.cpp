#include <gtest/gtest.h>

#include <gpysmooth/primes.hpp>

#include <set>

#include "support/oracles.hpp"

using namespace gpysmooth;

namespace {

std::vector<u64> visited(double x, double z, u64 q) {
  std::vector<u64> out;
  enumerate_squarefree_smooth(x, z, q, [&](const FactoredInt& n) { out.push_back(n.value); });
  return out;
}

std::set<u64> as_set(const std::vector<u64>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(GeneratePrimes, SmallLimits) {
  EXPECT_EQ(generate_primes(10).primes, (std::vector<u64>{2, 3, 5, 7}));
  EXPECT_TRUE(generate_primes(1).primes.empty());
  EXPECT_TRUE(generate_primes(0).primes.empty());
  EXPECT_EQ(generate_primes(2).primes, (std::vector<u64>{2}));
  EXPECT_EQ(generate_primes(3).primes, (std::vector<u64>{2, 3}));
}

TEST(GeneratePrimes, CountUpToMillionMatchesTrialDivision) {
  const PrimeTable t = generate_primes(1000000);
  EXPECT_EQ(t.primes.size(), oracle::prime_count(1000000));
  EXPECT_EQ(t.primes.size(), 78498u);
}

TEST(GeneratePrimes, ExactlyThePrimes) {
  const PrimeTable t = generate_primes(20000);
  std::vector<u64> expect;
  for (u64 n = 0; n <= 20000; ++n) {
    if (oracle::is_prime(n)) expect.push_back(n);
  }
  EXPECT_EQ(t.primes, expect);
  EXPECT_TRUE(std::is_sorted(t.primes.begin(), t.primes.end()));
}

TEST(SegmentedPrimes, MatchesPrimalityTest) {
  std::vector<u64> got;
  for_each_prime_in(999000, 1002000, [&](u64 p) { got.push_back(p); });
  std::vector<u64> expect;
  for (u64 n = 999000; n <= 1002000; ++n) {
    if (oracle::is_prime(n)) expect.push_back(n);
  }
  EXPECT_EQ(got, expect);
}

TEST(MillerRabin, AgreesWithTrialDivision) {
  for (u64 n = 0; n < 50000; ++n) ASSERT_EQ(is_prime(n), oracle::is_prime(n)) << n;
  EXPECT_TRUE(is_prime((u64{1} << 61) - 1));
  EXPECT_FALSE(is_prime(u64{3215031751}));  // strong pseudoprime to bases 2, 3, 5, 7
}

TEST(Factorisation, DistinctPrimes) {
  EXPECT_EQ(distinct_prime_factors(600851475143ULL), (std::vector<u64>{71, 839, 1471, 6857}));
  EXPECT_EQ(distinct_prime_factors(u64{1000000007} * 1000000009ULL), (std::vector<u64>{1000000007, 1000000009}));
  EXPECT_EQ(distinct_prime_factors(360), (std::vector<u64>{2, 3, 5}));
  EXPECT_TRUE(distinct_prime_factors(1).empty());
}

TEST(Enumerate, SpecExamples) {
  EXPECT_EQ(as_set(visited(10, 11, 1)), (std::set<u64>{1, 2, 3, 5, 6, 7, 10}));
  EXPECT_EQ(as_set(visited(10, 3, 1)), (std::set<u64>{1, 2}));
  EXPECT_EQ(as_set(visited(10, 11, 6)), (std::set<u64>{1, 5, 7}));
}

TEST(Enumerate, EachValueOnceStartingWithOne) {
  const auto v = visited(5000, 5001, 1);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v.front(), 1u);
  EXPECT_EQ(as_set(v).size(), v.size());
}

TEST(Enumerate, CountMatchesMobiusOracle) {
  for (u64 x : {1, 2, 3, 4, 10, 17, 100, 101, 997, 1000, 2310, 5000, 9999, 10000}) {
    const auto v = visited(static_cast<double>(x), static_cast<double>(x) + 1, 1);
    EXPECT_EQ(static_cast<long long>(v.size()), oracle::squarefree_count(x)) << x;
  }
}

TEST(Enumerate, FactorisationInvariants) {
  enumerate_squarefree_smooth(3000, 50, 35, [](const FactoredInt& n) {
    u64 prod = 1;
    for (std::size_t i = 0; i < n.factors.size(); ++i) {
      if (i) {
        ASSERT_LT(n.factors[i - 1], n.factors[i]);
      }
      ASSERT_LT(n.factors[i], 50u);
      ASSERT_NE(n.factors[i], 5u);
      ASSERT_NE(n.factors[i], 7u);
      prod *= n.factors[i];
    }
    ASSERT_EQ(prod, n.value);
    ASSERT_LE(n.value, 3000u);
  });
}

TEST(Enumerate, MatchesDirectFilter) {
  for (double z : {2.0, 2.5, 7.0, 30.0, 1e9}) {
    for (u64 q : {1, 6, 35, 97}) {
      std::set<u64> expect;
      for (u64 n = 1; n <= 2000; ++n) {
        bool ok = true;
        const auto f = oracle::squarefree_factors(n, ok);
        if (!ok) continue;
        bool keep = true;
        for (u64 p : f) keep = keep && q % p != 0 && static_cast<double>(p) < z;
        if (keep) expect.insert(n);
      }
      EXPECT_EQ(as_set(visited(2000, z, q)), expect) << z << " " << q;
    }
  }
}

TEST(Enumerate, MonotoneInZAndQ) {
  const auto small = as_set(visited(5000, 20, 1));
  const auto big = as_set(visited(5000, 200, 1));
  EXPECT_TRUE(std::includes(big.begin(), big.end(), small.begin(), small.end()));
  const auto q6 = as_set(visited(5000, 200, 6));
  const auto q30 = as_set(visited(5000, 200, 30));
  EXPECT_TRUE(std::includes(q6.begin(), q6.end(), q30.begin(), q30.end()));
  EXPECT_TRUE(std::includes(big.begin(), big.end(), q6.begin(), q6.end()));
}

TEST(Enumerate, Deterministic) { EXPECT_EQ(visited(20000, 100, 3), visited(20000, 100, 3)); }

TEST(Enumerate, ZAboveXIsVacuous) { EXPECT_EQ(visited(100, 1e6, 1), visited(100, 101, 1)); }

TEST(Enumerate, Errors) {
  EXPECT_THROW(visited(0.5, 3, 1), ParameterError);
  EXPECT_THROW(visited(std::ldexp(1.0, 63), 3, 1), RangeError);
  EXPECT_THROW(visited(10, 3, 0), ParameterError);
  const PrimeTable small = generate_primes(5);
  EXPECT_THROW(enumerate_squarefree_smooth(100, 50, 1, small, [](const FactoredInt&) {}), RangeError);
}

TEST(Enumerate, LargeBoundDoesNotOverflow) {
  // a handful of primes near the top of the range exercises the prune
  const double x = std::ldexp(1.0, 62);
  SmoothDomain dom;
  dom.bound = integer_bound(x);
  dom.primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  u64 count = 0, largest = 0;
  fold_squarefree(dom, 0, [](int, std::size_t) { return 0; }, [&](u64 n, int) {
    ++count;
    largest = std::max(largest, n);
  });
  u64 expect = 0;
  for (u64 mask = 0; mask < (u64{1} << 16); ++mask) {
    u128 prod = 1;
    for (int i = 0; i < 16; ++i) {
      if (mask >> i & 1) prod *= dom.primes[i];
    }
    expect += prod <= dom.bound;
  }
  EXPECT_EQ(count, expect);
  EXPECT_LT(count, u64{1} << 16);
  EXPECT_LE(largest, dom.bound);
}
