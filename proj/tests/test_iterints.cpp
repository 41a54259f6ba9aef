#include <gtest/gtest.h>

#include <gpysmooth/iterints.hpp>

#include <random>

#include "support/oracles.hpp"

using namespace gpysmooth;

TEST(IBase, ZeroAtTZero) {
  EXPECT_EQ(i_base(make_kernel(2, 4, 2.5), 0.0), 0.0);
  const ITable table = build_table(make_kernel(2, 4, 2.5), 2.5, 1e-6);
  EXPECT_EQ(i_eval(table, 0.0, 2.0), 0.0);
}

TEST(IBase, SmallExamples) {
  EXPECT_NEAR(i_base(make_kernel(1, 2, 1.0), 1.0), 4.0 / 3, 1e-14);
  EXPECT_NEAR(i_base(make_kernel(2, 3, 1.0), 1.0), 3.0, 1e-13);
}

TEST(IBase, BetaClosedFormForAllSmallIndices) {
  for (int m = 2; m <= 12; ++m) {
    for (int s = 1; s < m; ++s) {
      const double expect = oracle::i_base_closed(s, m);
      EXPECT_NEAR(i_base(make_kernel(s, m, 1.0), 1.0), expect, 1e-10 * expect) << s << "," << m;
    }
  }
}

TEST(IBase, ScalesAsPowerOfTWhenUnsmoothed) {
  // with f = 1, I_s(t, 1) = t^(2(m-s)) I_s(1, 1)
  const SieveKernel k = make_kernel(2, 5, 1.0);
  const double one = i_base(k, 1.0);
  for (double t : {0.1, 0.37, 0.8}) EXPECT_NEAR(i_base(k, t), std::pow(t, 6) * one, 1e-12 * one);
}

TEST(IBase, MatchesIndependentQuadrature) {
  for (auto [s, m, u] : std::vector<std::tuple<int, int, double>>{{1, 2, 3.0}, {2, 4, 2.5}, {3, 5, 3.0}}) {
    const oracle::NestedI ref(s, m, u);
    const SieveKernel k = make_kernel(s, m, u);
    for (double t : {0.2, 0.5, 0.77, 1.0}) {
      const double expect = ref.base(t);
      EXPECT_NEAR(i_base(k, t), expect, 1e-10 * std::abs(expect)) << s << "," << m << " t=" << t;
    }
  }
}

TEST(ITable, HalfVEqualsBase) {
  const SieveKernel k = make_kernel(2, 4, 2.5);
  const ITable table = build_table(k, 2.5, 1e-6);
  for (double t : {0.1, 0.5, 1.0}) EXPECT_EQ(i_eval(table, t, 0.5), i_base(k, t));
}

TEST(ITable, ContinuousAcrossRegimes) {
  const ITable table = build_table(make_kernel(2, 4, 2.5), 2.5, 1e-6);
  for (double t : {0.0, 0.3, 0.6, 1.0}) {
    EXPECT_NEAR(i_eval(table, t, 1.0 + 1e-9), i_eval(table, t, 1.0), 1e-8 * table.scale) << t;
  }
}

TEST(ITable, AgreesWithNestedQuadrature) {
  std::mt19937_64 rng(7);
  for (auto [s, m, u] : std::vector<std::tuple<int, int, double>>{{2, 4, 2.5}, {3, 5, 3.0}}) {
    const ITable table = build_table(make_kernel(s, m, u), u, 1e-6);
    const oracle::NestedI ref(s, m, u);
    std::uniform_real_distribution<double> tdist(0.0, 1.0), vdist(1.0, u);
    for (int i = 0; i < 20; ++i) {
      const double t = tdist(rng), v = vdist(rng);
      EXPECT_NEAR(i_eval(table, t, v), ref(t, v), 1e-6 * table.scale) << s << "," << m << " t=" << t << " v=" << v;
    }
  }
}

TEST(ITable, SmallestIndexAtTwo) {
  const ITable table = build_table(make_kernel(1, 2, 2.0), 2.0, 1e-6);
  const oracle::NestedI ref(1, 2, 2.0);
  for (double t : {0.25, 0.6, 1.0}) EXPECT_NEAR(i_eval(table, t, 2.0), ref(t, 2.0), 1e-6 * table.scale) << t;
}

TEST(ITable, UnsmoothedMarchAgreesWithOracle) {
  const ITable table = build_table(make_kernel(1, 2, 1.0), 3.0, 1e-6);
  const oracle::NestedI ref(1, 2, 1.0);
  for (double v : {1.5, 2.0, 2.75, 3.0}) {
    EXPECT_NEAR(i_eval(table, 1.0, v), ref(1.0, v), 1e-6 * table.scale) << v;
  }
}

TEST(ITable, NonnegativeOnGrid) {
  const ITable table = build_table(make_kernel(2, 4, 2.5), 2.5, 1e-6);
  for (int a = 0; a <= 40; ++a) {
    for (double v = 0.25; v <= 2.5; v += 0.25) EXPECT_GE(i_eval(table, a / 40.0, v), -1e-12 * table.scale);
  }
}

TEST(ITable, DecreasingInV) {
  const ITable table = build_table(make_kernel(3, 5, 3.0), 3.0, 1e-6);
  for (double t : {0.4, 1.0}) {
    double prev = i_eval(table, t, 1.0);
    for (double v = 1.25; v <= 3.0; v += 0.25) {
      const double cur = i_eval(table, t, v);
      EXPECT_LE(cur, prev + 1e-10 * table.scale);
      prev = cur;
    }
  }
}

TEST(ITable, RefinedGridAgrees) {
  const SieveKernel k = make_kernel(2, 4, 2.5);
  const ITable a = build_table(k, 2.5, 1e-6);
  TableOptions fine;
  fine.n_t = 33;
  fine.n_v = 33;
  fine.quad_nodes = 32;
  fine.check = false;
  const ITable b = build_table(k, 2.5, 1e-6, fine);
  for (double t : {0.15, 0.5, 0.9, 1.0}) {
    for (double v : {1.3, 2.0, 2.5}) EXPECT_NEAR(a(t, v), b(t, v), 1e-9 * a.scale) << t << " " << v;
  }
}

TEST(ITable, BaseOnlyTableIsDirect) {
  const SieveKernel k = make_kernel(1, 12, 1.0);
  const ITable table = build_table(k, 1.0, 1e-12);
  EXPECT_EQ(table.error_estimate, 0.0);
  EXPECT_NEAR(i_eval(table, 1.0, 1.0), oracle::i_base_closed(1, 12), 1e-10 * oracle::i_base_closed(1, 12));
}

TEST(ITable, OutOfRange) {
  const ITable table = build_table(make_kernel(2, 4, 2.5), 2.5, 1e-6);
  EXPECT_THROW(i_eval(table, -0.1, 1.5), RangeError);
  EXPECT_THROW(i_eval(table, 1.1, 1.5), RangeError);
  EXPECT_THROW(i_eval(table, 0.5, 0.0), RangeError);
  EXPECT_THROW(i_eval(table, 0.5, 3.0), RangeError);
  EXPECT_THROW(i_base(make_kernel(1, 2, 1.0), 1.5), RangeError);
}

TEST(ITable, ParameterErrors) {
  EXPECT_THROW(make_kernel(0, 2, 1.0), ParameterError);
  EXPECT_THROW(make_kernel(3, 3, 1.0), ParameterError);
  EXPECT_THROW(make_kernel(1, 2, 0.0), ParameterError);
  EXPECT_THROW(build_table(make_kernel(1, 2, 1.0), 0.5, 1e-6), ParameterError);
  TableOptions bad;
  bad.n_t = 1;
  EXPECT_THROW(build_table(make_kernel(1, 2, 1.0), 2.0, 1e-6, bad), ParameterError);
}

TEST(ITable, ToleranceFailureReportsEstimate) {
  TableOptions coarse;
  coarse.n_t = 5;
  coarse.n_v = 5;
  try {
    build_table(make_kernel(2, 4, 2.5), 2.5, 1e-12, coarse);
    FAIL() << "expected a tolerance failure";
  } catch (const ToleranceError& e) {
    EXPECT_GT(e.achieved(), 1e-12);
  }
}

TEST(ITable, LogScaleConsistent) {
  const SieveKernel plain = make_kernel(3, 6, 2.0);
  const SieveKernel scaled = make_kernel(3, 6, 2.0, true);
  EXPECT_NEAR(i_base(scaled, 1.0) * std::exp(scaled.log_scale_L), i_base(plain, 1.0), 1e-12 * i_base(plain, 1.0));
  const ITable a = build_table(plain, 2.0, 1e-6);
  const ITable b = build_table(scaled, 2.0, 1e-6);
  for (double t : {0.3, 1.0}) {
    EXPECT_NEAR(b(t, 2.0) * std::exp(scaled.log_scale_L), a(t, 2.0), 1e-11 * a.scale);
  }
}

TEST(ITable, LogScaleAvoidsOverflow) {
  const SieveKernel k = make_kernel(200, 260, 1.0, true);
  const double v = i_base(k, 1.0);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GT(v, 0.0);
  const double expect_log =
      2 * std::lgamma(261.0) + std::lgamma(121.0) - 2 * std::lgamma(61.0) - std::lgamma(321.0);
  EXPECT_NEAR(std::log(v) + k.log_scale_L, expect_log, 1e-9 * std::abs(expect_log));
}

TEST(ITable, ThreadCountDoesNotChangeValues) {
  const SieveKernel k = make_kernel(2, 4, 2.5);
  TableOptions one, four;
  four.threads = 4;
  const ITable a = build_table(k, 2.5, 1e-6, one);
  const ITable b = build_table(k, 2.5, 1e-6, four);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.base, b.base);
}
