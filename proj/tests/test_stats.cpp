#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ushift/stats.hpp"

using namespace ushift;

namespace {

std::vector<double> uniforms(std::size_t n, std::uint64_t seed) {
  SeededUniform u(seed, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = u.next();
  return v;
}

std::vector<double> pareto(std::size_t n, double alpha, std::uint64_t seed) {
  auto v = uniforms(n, seed);
  for (auto& x : v) x = std::pow(x, -1.0 / alpha);
  return v;
}

std::vector<ShiftOutcome> fixed_runs(double t, std::size_t n) {
  ConstructionSpec s;
  s.kind = Construction::fixed_time;
  s.fixed_time = t;
  ShiftOptions o;
  o.base_horizon = 2.0;
  o.max_horizon = 2.0;
  o.keep = 1.0;
  std::vector<ShiftOutcome> out;
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(simulate_shift(1e-2, 21, i, s, o));
  return out;
}

}  // namespace

TEST(Ks, CriticalValues) {
  EXPECT_NEAR(ks_critical(0.05), 1.3581, 1e-3);
  EXPECT_NEAR(ks_critical(0.01), 1.6276, 1e-3);
}

TEST(Ks, UniformSample) {
  const auto v = uniforms(2000, 3);
  EXPECT_TRUE(ks_test(v, [](double x) { return std::clamp(x, 0.0, 1.0); }).passed());
  EXPECT_FALSE(ks_test(v, [](double x) { return std::clamp(x - 0.1, 0.0, 1.0); }).passed());
  const std::vector<double> few(v.begin(), v.begin() + 10);
  EXPECT_EQ(ks_test(few, [](double x) { return x; }).verdict, Verdict::inconclusive);
}

TEST(Ks, StatisticOfPointMass) {
  EXPECT_NEAR(ks_statistic({0.5, 0.5, 0.5}, [](double x) { return std::clamp(x, 0.0, 1.0); }), 0.5,
              1e-12);
}

TEST(ChiSquare, FairAndSkewed) {
  EXPECT_TRUE(chi_square_test({510, 490}, {0.5, 0.5}, 0.05).passed());
  const TestReport bad = chi_square_test({600, 400}, {0.5, 0.5}, 0.05);
  EXPECT_FALSE(bad.passed());
  EXPECT_NEAR(bad.threshold, 3.8415, 1e-3);
  EXPECT_NEAR(bad.statistic, 40.0, 1e-9);
}

TEST(Embedding, AtomMixture) {
  const TargetMeasure nu({{-1.0, 0.5}, {2.0, 0.5}});
  const auto u = uniforms(2000, 5);
  std::vector<double> good, bad;
  for (double x : u) {
    good.push_back(x < 0.5 ? -1.0 + 0.01 : 2.0 - 0.01);
    bad.push_back(x < 0.7 ? -1.0 : 2.0);
  }
  EXPECT_TRUE(embedding_test(good, nu, 0.03).passed());
  EXPECT_FALSE(embedding_test(bad, nu, 0.03).passed());
  std::vector<double> off = good;
  for (std::size_t i = 0; i < 200; ++i) off[i] = 0.5;
  EXPECT_FALSE(embedding_test(off, nu, 0.03).passed());
}

TEST(Embedding, DensityPart) {
  const TargetMeasure nu({{0.0, 0.5}}, Density::uniform(1.0, 2.0), 0.5);
  const auto u = uniforms(4000, 6);
  std::vector<double> s;
  for (std::size_t i = 0; i < u.size(); i += 2) s.push_back(u[i] < 0.5 ? 0.0 : 1.0 + u[i + 1]);
  EXPECT_TRUE(embedding_test(s, nu, 0.01).passed());
  for (auto& x : s)
    if (x > 0.5) x = 1.0 + (x - 1.0) * (x - 1.0);
  EXPECT_FALSE(embedding_test(s, nu, 0.01).passed());
}

TEST(Unbiasedness, ZeroShiftPasses) {
  const auto outs = fixed_runs(0.0, 2000);
  const TestReport r = unbiasedness_test(outs, {-1.0, -0.5, 0.5, 1.0});
  EXPECT_TRUE(r.passed()) << nlohmann::json(r).dump();
}

TEST(Unbiasedness, FixedTimeFailsIndependence) {
  const auto outs = fixed_runs(1.0, 2000);
  const TestReport r = unbiasedness_test(outs, {-1.0, -0.5, 0.5, 1.0});
  EXPECT_FALSE(r.passed());
  bool corr_failed = false;
  for (const auto& p : r.parts)
    if (p.name == "correlation") corr_failed = !p.passed();
  EXPECT_TRUE(corr_failed);
}

TEST(Unbiasedness, NeedsProbes) {
  EXPECT_THROW(unbiasedness_test({}, {}), InvalidParameter);
  EXPECT_EQ(unbiasedness_test({}, {1.0}).verdict, Verdict::inconclusive);
}

TEST(Independence, ContingencyDetectsDependence) {
  const auto a = uniforms(3000, 7);
  const auto b = uniforms(3000, 8);
  const auto cuts = detail::quantile_cuts(a, 4);
  EXPECT_EQ(cuts.size(), 3u);
  EXPECT_TRUE(detail::contingency_test(a, b, cuts, {0.25, 0.5, 0.75}, 0.01, "ind").passed());
  EXPECT_FALSE(detail::contingency_test(a, a, cuts, {0.25, 0.5, 0.75}, 0.01, "dep").passed());
}

TEST(TailSlope, ParetoHalf) {
  TailOptions o;
  o.expected = std::make_pair(-0.55, -0.45);
  const TestReport r = tail_slope(pareto(20000, 0.5, 9), {}, o);
  ASSERT_TRUE(r.estimate.has_value());
  EXPECT_NEAR(*r.estimate, -0.5, 0.05);
  EXPECT_TRUE(r.passed());
  ASSERT_TRUE(r.interval.has_value());
  EXPECT_LE(r.interval->first, *r.estimate);
  EXPECT_GE(r.interval->second, *r.estimate);
}

TEST(TailSlope, ParetoQuarter) {
  const TestReport r = tail_slope(pareto(20000, 0.25, 10));
  ASSERT_TRUE(r.estimate.has_value());
  EXPECT_NEAR(*r.estimate, -0.25, 0.03);
  EXPECT_TRUE(r.details["power_law"].get<bool>());
}

TEST(TailSlope, ExponentialIsFlagged) {
  auto v = uniforms(50000, 11);
  for (auto& x : v) x = -std::log(x);
  const TestReport r = tail_slope(v);
  EXPECT_FALSE(r.details["power_law"].get<bool>());
  EXPECT_FALSE(r.passed());
}

TEST(TailSlope, CensoringShiftsWindow) {
  auto v = pareto(5000, 0.5, 12);
  std::vector<bool> c(v.size(), false);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] > 1e3) {
      v[i] = 1e3;
      c[i] = true;
    }
  const TestReport r = tail_slope(v, c);
  const auto w = r.details["window"];
  EXPECT_LT(w[1].get<double>(), 0.99);
  EXPECT_GT(r.details["censored_fraction"].get<double>(), 0.01);
  ASSERT_TRUE(r.estimate.has_value());
  EXPECT_NEAR(*r.estimate, -0.5, 0.07);
}

TEST(TailSlope, SmallSampleInconclusive) {
  EXPECT_EQ(tail_slope(pareto(100, 0.5, 13)).verdict, Verdict::inconclusive);
  TailOptions bad;
  bad.q_lo = 0.2;
  EXPECT_THROW(tail_slope(pareto(2000, 0.5, 13), {}, bad), InvalidParameter);
}

TEST(MomentGrowth, FiniteAndInfiniteMoments) {
  const auto v = pareto(20000, 0.5, 14);
  EXPECT_FALSE(moment_growth(v, 0.125).details["growing"].get<bool>());
  EXPECT_TRUE(moment_growth(v, 0.75).details["growing"].get<bool>());
  MomentOptions o;
  o.expect_growing = true;
  EXPECT_FALSE(moment_growth(v, 0.125, {}, o).passed());
  EXPECT_THROW(moment_growth(v, 0.0), InvalidParameter);
}

TEST(MomentGrowth, CensoredValuesAreImputed) {
  auto v = pareto(20000, 0.5, 15);
  std::vector<bool> c(v.size(), false);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] > 1e3) {
      v[i] = 1e3;
      c[i] = true;
    }
  MomentOptions o;
  EXPECT_FALSE(moment_growth(v, 0.75, c, o).details["growing"].get<bool>());
  o.tail_index = 0.5;
  EXPECT_TRUE(moment_growth(v, 0.75, c, o).details["growing"].get<bool>());
}

TEST(Survival, CurveIsDecreasing) {
  const auto pts = survival_curve(pareto(1000, 0.5, 16), 50);
  ASSERT_FALSE(pts.empty());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    EXPECT_GE(pts[i].first, pts[i - 1].first);
    EXPECT_LE(pts[i].second, pts[i - 1].second);
  }
}

TEST(NormalCdf, Values) {
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-9);
  EXPECT_NEAR(normal_cdf(2.0, 2.0), normal_cdf(1.0), 1e-15);
}
