#include <gtest/gtest.h>

#include <gpysmooth/verify.hpp>

#include <random>

#include "support/oracles.hpp"

using namespace gpysmooth;

TEST(Buchstab, HandPicked) {
  for (const char* name : {"one_over_n", "one_over_phi", "two_omega_over_n", "signed_mu_times:one_over_n"}) {
    const MultFuncSpec s = builtin_spec(name);
    for (int m : {0, 1, 2}) {
      EXPECT_LT(check_buchstab(s, 1000, 1, 10, m).residual, 1e-12) << name;
      EXPECT_LT(check_buchstab(s, 20000, 6, 31.5, m).residual, 1e-12) << name;
      EXPECT_LT(check_buchstab(s, 5000, 35, 2, m).residual, 1e-12) << name;
    }
  }
}

TEST(Buchstab, SmoothPartMatchesBruteForce) {
  const MultFuncSpec s = specs::one_over_phi();
  const BuchstabResult r = check_buchstab(s, 3000, 10, 17, 1);
  const double brute = static_cast<double>(oracle::brute_sum(s.prime_value, 3000, 1, 10, 17));
  EXPECT_NEAR(r.smooth, brute, 1e-12 * brute);
}

TEST(Buchstab, NoCorrectionWhenZEqualsX) {
  const BuchstabResult r = check_buchstab(specs::one_over_n(), 997, 1, 997, 1);
  EXPECT_EQ(r.correction, 0.0);
  EXPECT_EQ(r.residual, 0.0);
}

TEST(Buchstab, RandomisedCases) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> logx(std::log(10.0), std::log(1e5));
  std::uniform_int_distribution<int> qd(1, 210), md(0, 3), sd(0, 3);
  const std::vector<std::string> names{"one_over_n", "one_over_phi", "two_omega_over_n", "signed_mu_times:one_over_n"};
  for (int i = 0; i < 50; ++i) {
    const double x = std::floor(std::exp(logx(rng)));
    std::uniform_real_distribution<double> zd(2.0, x);
    const double z = zd(rng);
    const u64 q = static_cast<u64>(qd(rng));
    const int m = md(rng);
    const std::string name = names[sd(rng)];
    EXPECT_LT(check_buchstab(builtin_spec(name), x, q, z, m).residual, 1e-10)
        << name << " x=" << x << " z=" << z << " q=" << q << " m=" << m;
  }
}

TEST(Buchstab, Errors) {
  EXPECT_THROW(check_buchstab(specs::one_over_n(), 100, 1, 1.5, 0), ParameterError);
  EXPECT_THROW(check_buchstab(specs::one_over_n(), 100, 1, 101, 0), ParameterError);
}

TEST(Theorem2, UnsmoothedEqualsTheorem1) {
  const std::vector<double> xs{1e3, 1e4, 1e5};
  const ConvergenceReport a = check_theorem1(specs::one_over_n(), 1, 1, xs);
  const ConvergenceReport b = check_theorem2(specs::one_over_n(), 1, 1, 1.0, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_DOUBLE_EQ(a.rows[i].exact, b.rows[i].exact);
    EXPECT_DOUBLE_EQ(a.rows[i].predicted, b.rows[i].predicted);
  }
}

TEST(Theorem2, PredictionCarriesDelayFactor) {
  const std::vector<double> xs{1e4, 1e5};
  for (auto [name, k, m] : std::vector<std::tuple<const char*, int, int>>{
           {"one_over_n", 1, 1}, {"two_omega_over_n", 2, 1}, {"signed_mu_times:one_over_n", -1, 2}}) {
    const ConvergenceReport a = check_theorem1(builtin_spec(name), m, 1, xs);
    const ConvergenceReport b = check_theorem2(builtin_spec(name), m, 1, 2.0, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      EXPECT_NEAR(b.rows[i].predicted / a.rows[i].predicted, oracle::f_panel2(k, m, 2.0), 1e-10) << name;
      const double z = std::sqrt(xs[i]);
      const double brute =
          static_cast<double>(oracle::brute_sum(builtin_spec(name).prime_value, xs[i], m, 1, z));
      EXPECT_NEAR(b.rows[i].exact, brute, 1e-11 * (1 + std::abs(brute))) << name;
    }
  }
}

TEST(WeightLemma, ConstantWeightIsTheorem1) {
  const std::vector<double> xs{1e3, 1e4, 1e5};
  const ConvergenceReport a = check_theorem1(specs::two_omega_over_n(), 0, 1, xs);
  const ConvergenceReport b = check_weight_lemma(specs::two_omega_over_n(), {1.0}, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_NEAR(b.rows[i].exact, a.rows[i].exact, 1e-12 * a.rows[i].exact);
    EXPECT_NEAR(b.rows[i].predicted, a.rows[i].predicted, 1e-12 * a.rows[i].predicted);
  }
}

TEST(WeightLemma, LinearWeightIsScaledTheorem1) {
  const std::vector<double> xs{1e4, 1e5};
  const ConvergenceReport a = check_theorem1(specs::one_over_n(), 1, 1, xs);
  const ConvergenceReport b = check_weight_lemma(specs::one_over_n(), {0.0, 1.0}, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double L = std::log(xs[i]);
    EXPECT_NEAR(b.rows[i].exact, a.rows[i].exact / L, 1e-12 * b.rows[i].exact);
    EXPECT_NEAR(b.rows[i].predicted, a.rows[i].predicted / L, 1e-12 * b.rows[i].predicted);
  }
}

TEST(WeightLemma, OneMinusTAgainstDirectSum) {
  const double x = 5000, L = std::log(x);
  const ConvergenceReport r = check_weight_lemma(specs::one_over_n(), {1.0, -1.0}, {x});
  long double direct = 0;
  for (u64 n = 1; n <= 5000; ++n) {
    if (oracle::mobius(n) == 0) continue;
    direct += (1.0L / n) * (1 - std::log(x / n) / L);
  }
  EXPECT_NEAR(r.rows[0].exact, static_cast<double>(direct), 1e-12 * static_cast<double>(direct));
  EXPECT_NEAR(r.rows[0].predicted, 6 / (M_PI * M_PI) * L * 0.5, 1e-7);
}

TEST(Verdict, MonotoneAndSlope) {
  ConvergenceReport r;
  for (double x : {1e3, 1e4, 1e5, 1e6}) {
    ConvergenceRow row;
    row.x = x;
    row.ratio = 1 + 2 / std::log(x);
    row.residual = row.ratio - 1;
    r.rows.push_back(row);
  }
  detail::finish_report(r);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.non_monotone_steps, 0);
  EXPECT_NEAR(r.slope, -1.0, 1e-12);

  r.rows[2].residual = 10;
  detail::finish_report(r);
  EXPECT_EQ(r.non_monotone_steps, 1);
  EXPECT_TRUE(r.passed);

  r.rows[1].residual = 20;
  r.rows[2].residual = 0.1;
  r.rows[3].residual = 30;
  detail::finish_report(r);
  EXPECT_EQ(r.non_monotone_steps, 2);
  EXPECT_FALSE(r.passed);

  r.rows[1].residual = 0.5;
  r.rows[2].residual = 0.4;
  r.rows[3].residual = 0.3;
  r.rows[3].ratio = std::nan("");
  detail::finish_report(r);
  EXPECT_FALSE(r.passed);
}

TEST(ClassicalSums, ConvergeOnSmallLadder) {
  const std::vector<double> xs{1e3, 1e4, 1e5, 1e6};
  for (auto [name, m] : std::vector<std::pair<const char*, int>>{
           {"one_over_n", 0}, {"one_over_n", 1}, {"one_over_phi", 1}, {"two_omega_over_n", 1}}) {
    const ConvergenceReport r = check_theorem1(builtin_spec(name), m, 1, xs);
    EXPECT_TRUE(r.passed) << name;
    EXPECT_EQ(r.non_monotone_steps, 0) << name;
    EXPECT_LT(r.slope, 0.0) << name;
    EXPECT_LT(r.rows.back().residual, r.rows.front().residual) << name;
  }
}

TEST(ClassicalSums, ExactColumnMatchesBruteForce) {
  const ConvergenceReport r = check_theorem1(specs::one_over_phi(), 1, 6, {2000, 4000});
  for (const auto& row : r.rows) {
    const double brute = static_cast<double>(oracle::brute_sum(specs::one_over_phi().prime_value, row.x, 1, 6, 1e18));
    EXPECT_NEAR(row.exact, brute, 1e-12 * brute);
  }
}

TEST(ClassicalSums, LadderErrors) {
  EXPECT_THROW(check_theorem1(specs::one_over_n(), 1, 1, {}), ParameterError);
  EXPECT_THROW(check_theorem1(specs::one_over_n(), 1, 1, {1e4, 1e3}), ParameterError);
  EXPECT_THROW(check_theorem1(specs::signed_mu_times(specs::one_over_n()), 0, 1, {1e3}), ParameterError);
  EXPECT_THROW(check_theorem2(specs::one_over_n(), 1, 1, 0.0, {1e3}), ParameterError);
  EXPECT_THROW(check_weight_lemma(specs::one_over_n(), {}, {1e3}), ParameterError);
}

TEST(ClassicalSums, ThreadCountDoesNotChangeRows) {
  VerifyOptions one, four;
  four.threads = 4;
  const std::vector<double> xs{1e3, 1e4, 1e5};
  const ConvergenceReport a = check_theorem2(specs::two_omega_over_n(), 1, 1, 2.0, xs, one);
  const ConvergenceReport b = check_theorem2(specs::two_omega_over_n(), 1, 1, 2.0, xs, four);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(a.rows[i].exact, b.rows[i].exact);
}
