#pragma once

// Statistical checks on shift outcomes: KS goodness of fit, embedding and
// unbiasedness tests, tail-slope regression and moment-growth diagnostics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <json.hpp>

#include "ushift/errors.hpp"
#include "ushift/measures.hpp"
#include "ushift/philox.hpp"
#include "ushift/shifts.hpp"

namespace ushift {

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct TestReport {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  std::optional<double> estimate;
  std::optional<std::pair<double, double>> interval;
  std::size_t n = 0;
  Verdict verdict = Verdict::inconclusive;
  nlohmann::json details = nlohmann::json::object();
  std::vector<TestReport> parts;

  bool passed() const { return verdict == Verdict::pass; }
};

inline void to_json(nlohmann::json& j, const TestReport& r) {
  j = {{"test", r.name},
       {"statistic", r.statistic},
       {"threshold", r.threshold},
       {"n", r.n},
       {"verdict", to_string(r.verdict)}};
  if (r.estimate) j["estimate"] = *r.estimate;
  if (r.interval) j["interval"] = {r.interval->first, r.interval->second};
  if (!r.details.empty()) j["details"] = r.details;
  if (!r.parts.empty()) j["parts"] = r.parts;
}

inline double normal_cdf(double x, double sd = 1.0) {
  return 0.5 * std::erfc(-x / (sd * std::numbers::sqrt2));
}

/// Asymptotic KS critical constant: c(0.01) = 1.628.
inline double ks_critical(double alpha) { return std::sqrt(-0.5 * std::log(alpha / 2.0)); }

inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw InvalidParameter("empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

inline constexpr std::size_t kMinKsSample = 20;

inline TestReport ks_test(const std::vector<double>& sample,
                          const std::function<double(double)>& cdf, double alpha = 0.01,
                          std::string name = "ks") {
  if (sample.empty()) throw InvalidParameter("empty sample");
  TestReport r;
  r.name = std::move(name);
  r.n = sample.size();
  r.statistic = ks_statistic(sample, cdf);
  r.threshold = ks_critical(alpha) / std::sqrt(static_cast<double>(r.n));
  r.details["alpha"] = alpha;
  if (r.n < kMinKsSample)
    r.verdict = Verdict::inconclusive;
  else
    r.verdict = r.statistic < r.threshold ? Verdict::pass : Verdict::fail;
  return r;
}

/// Pearson chi-square goodness of fit against expected probabilities.
inline TestReport chi_square_test(const std::vector<double>& counts,
                                  const std::vector<double>& probs, double alpha,
                                  std::string name = "chi_square") {
  TestReport r;
  r.name = std::move(name);
  double n = 0.0;
  for (double c : counts) n += c;
  r.n = static_cast<std::size_t>(n);
  int df = -1;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (probs[i] <= 0.0) {
      if (counts[i] > 0.0) r.statistic = std::numeric_limits<double>::infinity();
      continue;
    }
    const double e = n * probs[i];
    r.statistic += (counts[i] - e) * (counts[i] - e) / e;
    ++df;
  }
  r.details["df"] = df;
  r.details["alpha"] = alpha;
  if (df < 1 || n <= 0.0) {
    r.threshold = 0.0;
    r.verdict = std::isfinite(r.statistic) && n > 0.0 ? Verdict::pass : Verdict::inconclusive;
    if (!std::isfinite(r.statistic)) r.verdict = Verdict::fail;
    return r;
  }
  r.threshold = boost::math::quantile(
      boost::math::complement(boost::math::chi_squared(df), alpha));
  r.verdict = r.statistic < r.threshold ? Verdict::pass : Verdict::fail;
  return r;
}

/// Share of samples allowed outside every atom window when the target has
/// no density component.
inline constexpr double kMaxMissFraction = 0.05;

/// Atom frequencies within +-2 eps (chi-square) and KS of the remaining
/// samples against the density part.
inline TestReport embedding_test(const std::vector<double>& samples, const TargetMeasure& nu,
                                 double eps, double alpha = 0.01,
                                 std::size_t censored = 0) {
  TestReport r;
  r.name = "embedding";
  r.n = samples.size();
  r.details["censored"] = censored;
  if (samples.empty()) {
    r.verdict = Verdict::inconclusive;
    return r;
  }
  const auto& atoms = nu.atoms();
  std::vector<double> counts(atoms.size() + 1, 0.0);
  std::vector<double> residual;
  for (double b : samples) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (std::abs(b - atoms[i].location) <= 2.0 * eps &&
          (!best || std::abs(b - atoms[i].location) < std::abs(b - atoms[*best].location)))
        best = i;
    if (best) {
      counts[*best] += 1.0;
    } else {
      counts.back() += 1.0;
      residual.push_back(b);
    }
  }
  const double total = nu.total();
  std::vector<double> probs;
  nlohmann::json freq = nlohmann::json::array();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    probs.push_back(atoms[i].weight / total);
    freq.push_back({{"location", atoms[i].location},
                    {"expected", atoms[i].weight / total},
                    {"observed", counts[i] / static_cast<double>(samples.size())}});
  }
  r.details["atoms"] = freq;
  const double miss = counts.back() / static_cast<double>(samples.size());
  r.details["outside_atoms"] = miss;
  bool ok = true;
  if (nu.density()) {
    probs.push_back(nu.density_weight() / total);
    r.parts.push_back(chi_square_test(counts, probs, alpha / 2.0, "atom_frequencies"));
    if (!residual.empty()) {
      const Density d = *nu.density();
      r.parts.push_back(ks_test(residual, [d](double x) { return d.cdf(x); }, alpha / 2.0,
                                "density_part"));
    }
  } else {
    TestReport m;
    m.name = "outside_atoms";
    m.statistic = miss;
    m.threshold = kMaxMissFraction;
    m.n = samples.size();
    m.verdict = miss <= kMaxMissFraction ? Verdict::pass : Verdict::fail;
    r.parts.push_back(m);
    if (atoms.size() > 1) {
      std::vector<double> c(counts.begin(), counts.end() - 1);
      r.parts.push_back(chi_square_test(c, probs, alpha, "atom_frequencies"));
    }
  }
  bool inconclusive = false;
  for (const auto& p : r.parts) {
    ok = ok && p.verdict != Verdict::fail;
    inconclusive = inconclusive || p.verdict == Verdict::inconclusive;
  }
  r.statistic = miss;
  r.verdict = !ok ? Verdict::fail : (inconclusive ? Verdict::inconclusive : Verdict::pass);
  return r;
}

namespace detail {

inline double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

// Bin index of v among interior cut points.
inline std::size_t bin_of(const std::vector<double>& cuts, double v) {
  return static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
}

// Chi-square test of independence on a contingency table.
inline TestReport contingency_test(const std::vector<double>& a, const std::vector<double>& b,
                                   const std::vector<double>& cuts_a,
                                   const std::vector<double>& cuts_b, double alpha,
                                   std::string name) {
  const std::size_t ra = cuts_a.size() + 1, rb = cuts_b.size() + 1;
  std::vector<double> table(ra * rb, 0.0), row(ra, 0.0), col(rb, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t x = bin_of(cuts_a, a[i]), y = bin_of(cuts_b, b[i]);
    table[x * rb + y] += 1.0;
    row[x] += 1.0;
    col[y] += 1.0;
  }
  const double n = static_cast<double>(a.size());
  TestReport r;
  r.name = std::move(name);
  r.n = a.size();
  std::size_t nr = 0, nc = 0;
  for (double v : row) nr += v > 0.0;
  for (double v : col) nc += v > 0.0;
  for (std::size_t x = 0; x < ra; ++x)
    for (std::size_t y = 0; y < rb; ++y) {
      const double e = row[x] * col[y] / n;
      if (e > 0.0) r.statistic += (table[x * rb + y] - e) * (table[x * rb + y] - e) / e;
    }
  const auto df = static_cast<int>((nr - 1) * (nc - 1));
  r.details["df"] = df;
  if (nr == 0 || nc == 0) {
    r.verdict = Verdict::inconclusive;
    return r;
  }
  if (df < 1) {
    // One occupied row or column: the table factorises exactly.
    r.verdict = Verdict::pass;
    return r;
  }
  r.threshold = boost::math::quantile(
      boost::math::complement(boost::math::chi_squared(df), alpha));
  r.verdict = r.statistic < r.threshold ? Verdict::pass : Verdict::fail;
  return r;
}

// Up to k-1 distinct interior sample quantiles.
inline std::vector<double> quantile_cuts(std::vector<double> v, std::size_t k) {
  std::sort(v.begin(), v.end());
  std::vector<double> cuts;
  for (std::size_t i = 1; i < k; ++i) {
    const double c = v[std::min(v.size() - 1, i * v.size() / k)];
    if (cuts.empty() || c > cuts.back()) cuts.push_back(c);
  }
  if (!cuts.empty() && cuts.front() <= v.front()) cuts.erase(cuts.begin());
  return cuts;
}

inline Verdict combine(const std::vector<TestReport>& parts) {
  bool inconclusive = false;
  for (const auto& p : parts) {
    if (p.verdict == Verdict::fail) return Verdict::fail;
    inconclusive = inconclusive || p.verdict == Verdict::inconclusive;
  }
  return inconclusive ? Verdict::inconclusive : Verdict::pass;
}

}  // namespace detail

/// (a) KS of the shifted path at each probe against N(0,|t|); (b) KS of
/// standardised increments between consecutive probes (0 included) against
/// N(0,1); (c) correlation and binned independence between B_T and each
/// probe value. Bonferroni over the KS parts.
inline TestReport unbiasedness_test(const std::vector<ShiftOutcome>& outcomes,
                                    std::vector<double> probes, double alpha = 0.01) {
  TestReport r;
  r.name = "unbiasedness";
  if (probes.empty()) throw InvalidParameter("need at least one probe time");
  std::sort(probes.begin(), probes.end());
  std::vector<const ShiftOutcome*> ok;
  for (const auto& o : outcomes)
    if (o.matched()) ok.push_back(&o);
  r.n = ok.size();
  if (ok.empty()) {
    r.verdict = Verdict::inconclusive;
    return r;
  }
  const double dt = ok.front()->shifted.dt();
  std::vector<double> grid = probes;
  if (!std::binary_search(grid.begin(), grid.end(), 0.0)) {
    grid.push_back(0.0);
    std::sort(grid.begin(), grid.end());
  }
  const double ks_alpha = alpha / static_cast<double>(probes.size() + 1);
  const double ind_alpha = alpha / static_cast<double>(probes.size());
  auto covered = [&](const ShiftOutcome* o, double t) {
    return o->shifted.contains(std::llround(t / dt));
  };
  auto at = [&](const ShiftOutcome* o, double t) {
    return o->shifted.value(std::llround(t / dt));
  };
  TestReport corr_part;
  corr_part.name = "correlation";
  corr_part.n = ok.size();
  corr_part.threshold = 3.0 / std::sqrt(static_cast<double>(ok.size()));
  corr_part.verdict = Verdict::pass;
  nlohmann::json corrs = nlohmann::json::array();
  std::vector<TestReport> marg, ind;
  for (double t : probes) {
    std::vector<double> bt, xt;
    for (const auto* o : ok)
      if (covered(o, t)) {
        bt.push_back(o->B_T);
        xt.push_back(at(o, t));
      }
    const std::string tag = "t=" + nlohmann::json(t).dump();
    if (bt.size() < kMinKsSample) {
      TestReport miss;
      miss.name = "marginal " + tag;
      miss.n = bt.size();
      miss.verdict = Verdict::inconclusive;
      marg.push_back(miss);
      continue;
    }
    const double sd = std::sqrt(std::abs(t));
    marg.push_back(ks_test(xt, [sd](double x) { return normal_cdf(x, sd); }, ks_alpha,
                           "marginal " + tag));
    const double c = detail::correlation(bt, xt);
    corrs.push_back({{"t", t}, {"corr", c}});
    corr_part.statistic = std::max(corr_part.statistic, std::abs(c));
    if (!(std::abs(c) < 3.0 / std::sqrt(static_cast<double>(bt.size()))))
      corr_part.verdict = Verdict::fail;
    const std::vector<double> qb = {-0.6745 * sd, 0.0, 0.6745 * sd};
    ind.push_back(detail::contingency_test(bt, xt, detail::quantile_cuts(bt, 4), qb, ind_alpha,
                                           "independence " + tag));
  }
  corr_part.details["per_probe"] = corrs;
  std::vector<double> incr;
  std::size_t skipped = 0;
  for (const auto* o : ok) {
    if (!covered(o, grid.front()) || !covered(o, grid.back())) {
      ++skipped;
      continue;
    }
    for (std::size_t i = 1; i < grid.size(); ++i)
      incr.push_back((at(o, grid[i]) - at(o, grid[i - 1])) / std::sqrt(grid[i] - grid[i - 1]));
  }
  TestReport inc;
  if (incr.size() >= kMinKsSample) {
    inc = ks_test(incr, [](double x) { return normal_cdf(x); }, ks_alpha, "increments");
  } else {
    inc.name = "increments";
    inc.verdict = Verdict::inconclusive;
  }
  inc.details["skipped"] = skipped;
  r.parts = marg;
  r.parts.push_back(inc);
  r.parts.push_back(corr_part);
  r.parts.insert(r.parts.end(), ind.begin(), ind.end());
  r.verdict = detail::combine(r.parts);
  r.statistic = corr_part.statistic;
  r.threshold = corr_part.threshold;
  r.details["alpha"] = alpha;
  return r;
}

struct TailOptions {
  double q_lo = 0.8;
  double q_hi = 0.99;
  int bootstrap = 200;
  std::uint64_t seed = 0x7a11;
  std::optional<std::pair<double, double>> expected;  // accepted slope range
};

/// Ratio of upper- to lower-half slopes above which the tail is flagged as
/// not following a power law.
inline constexpr double kCurvatureRatio = 1.5;
inline constexpr std::size_t kMinTailSample = 1000;
inline constexpr std::size_t kMinTailPoints = 20;

namespace detail {

// Least-squares slope of log survival on log x over sorted positions [a, b).
inline double survival_slope(const std::vector<double>& sorted, std::size_t a, std::size_t b) {
  const double n = static_cast<double>(sorted.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (std::size_t k = a; k < b; ++k) {
    if (sorted[k] <= 0.0) continue;
    const double x = std::log(sorted[k]);
    const double y = std::log((n - static_cast<double>(k + 1) + 0.5) / n);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    m += 1.0;
  }
  const double den = m * sxx - sx * sx;
  if (m < 2.0 || den <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / den;
}

}  // namespace detail

/// Log-log regression of the empirical survival function over a quantile
/// window. Censored values enter as lower bounds; when more than 1% of the
/// sample is censored the window moves down by the censored fraction.
inline TestReport tail_slope(const std::vector<double>& samples,
                             const std::vector<bool>& censored = {},
                             const TailOptions& opt = {}) {
  if (!(opt.q_lo >= 0.5 && opt.q_lo < opt.q_hi && opt.q_hi <= 0.999))
    throw InvalidParameter("quantile window must satisfy 0.5 <= q_lo < q_hi <= 0.999");
  TestReport r;
  r.name = "tail_slope";
  r.n = samples.size();
  std::size_t nc = 0;
  for (bool c : censored) nc += c;
  const double cf = samples.empty() ? 0.0 : static_cast<double>(nc) / static_cast<double>(samples.size());
  double q_lo = opt.q_lo, q_hi = opt.q_hi;
  if (cf > 0.01) {
    q_lo = std::max(0.5, q_lo - cf);
    q_hi = std::max(q_lo + 0.01, q_hi - cf);
  }
  r.details["censored_fraction"] = cf;
  r.details["window"] = {q_lo, q_hi};
  if (samples.size() < kMinTailSample) {
    r.verdict = Verdict::inconclusive;
    r.details["reason"] = "too few samples";
    return r;
  }
  const std::size_t n = samples.size();
  const auto a = static_cast<std::size_t>(std::ceil(q_lo * static_cast<double>(n)));
  const auto b = std::min(n, static_cast<std::size_t>(std::floor(q_hi * static_cast<double>(n))));
  if (b <= a || b - a < kMinTailPoints) {
    r.verdict = Verdict::inconclusive;
    r.details["reason"] = "too few tail points";
    return r;
  }
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double slope = detail::survival_slope(sorted, a, b);
  const std::size_t mid = a + (b - a) / 2;
  const double lower = detail::survival_slope(sorted, a, mid);
  const double upper = detail::survival_slope(sorted, mid, b);
  std::vector<double> boot;
  SeededUniform u(opt.seed, 0xb007u);
  std::vector<double> res(n);
  for (int k = 0; k < opt.bootstrap; ++k) {
    for (std::size_t i = 0; i < n; ++i) res[i] = samples[u.index(n)];
    std::sort(res.begin(), res.end());
    const double s = detail::survival_slope(res, a, b);
    if (std::isfinite(s)) boot.push_back(s);
  }
  std::sort(boot.begin(), boot.end());
  if (!boot.empty())
    r.interval = {boot[static_cast<std::size_t>(0.025 * static_cast<double>(boot.size() - 1))],
                  boot[static_cast<std::size_t>(0.975 * static_cast<double>(boot.size() - 1))]};
  r.estimate = slope;
  r.statistic = slope;
  const double ratio = upper / lower;
  const bool power_law = std::isfinite(ratio) && ratio <= kCurvatureRatio;
  r.details["lower_half_slope"] = lower;
  r.details["upper_half_slope"] = upper;
  r.details["curvature_ratio"] = ratio;
  r.details["power_law"] = power_law;
  if (!std::isfinite(slope)) {
    r.verdict = Verdict::inconclusive;
    return r;
  }
  if (opt.expected) {
    r.details["expected"] = {opt.expected->first, opt.expected->second};
    r.threshold = opt.expected->second;
    r.verdict = slope >= opt.expected->first && slope <= opt.expected->second && power_law
                    ? Verdict::pass
                    : Verdict::fail;
  } else {
    r.verdict = power_law ? Verdict::pass : Verdict::fail;
  }
  return r;
}

struct MomentOptions {
  int permutations = 64;
  std::size_t grid_points = 24;
  std::uint64_t seed = 0x3017;
  /// Tail index used to impute censored values as c * U^{-1/alpha}.
  std::optional<double> tail_index;
  std::optional<bool> expect_growing;
};

/// Slope of the log running mean above which the curve counts as growing.
inline constexpr double kGrowthSlope = 0.05;

/// Median (over seeded permutations) running mean of X^beta on a log grid of
/// sample sizes, with the log-log slope over the upper half of the grid.
inline TestReport moment_growth(const std::vector<double>& samples, double beta,
                                const std::vector<bool>& censored = {},
                                const MomentOptions& opt = {}) {
  if (!(beta > 0.0)) throw InvalidParameter("beta must be > 0");
  TestReport r;
  r.name = "moment_growth";
  r.n = samples.size();
  r.details["beta"] = beta;
  if (samples.size() < 100) {
    r.verdict = Verdict::inconclusive;
    return r;
  }
  SeededUniform u(opt.seed, 0x303eu);
  std::vector<double> x(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double v = samples[i];
    if (i < censored.size() && censored[i] && opt.tail_index && *opt.tail_index > 0.0)
      v *= std::pow(u.next(), -1.0 / *opt.tail_index);
    x[i] = std::pow(std::max(v, 0.0), beta);
  }
  const std::size_t n = x.size();
  std::vector<std::size_t> grid;
  const double g0 = std::log(10.0), g1 = std::log(static_cast<double>(n));
  for (std::size_t k = 0; k < opt.grid_points; ++k) {
    const auto m = static_cast<std::size_t>(std::llround(
        std::exp(g0 + (g1 - g0) * static_cast<double>(k) / static_cast<double>(opt.grid_points - 1))));
    if (grid.empty() || m > grid.back()) grid.push_back(std::min(m, n));
  }
  std::vector<std::vector<double>> curves(grid.size());
  std::vector<std::size_t> perm(n);
  for (int p = 0; p < opt.permutations; ++p) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[u.index(i + 1)]);
    double acc = 0.0;
    std::size_t g = 0;
    for (std::size_t i = 0; i < n && g < grid.size(); ++i) {
      acc += x[perm[i]];
      if (i + 1 == grid[g]) curves[g++].push_back(acc / static_cast<double>(i + 1));
    }
  }
  std::vector<double> curve;
  for (auto& c : curves) {
    std::nth_element(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(c.size() / 2), c.end());
    curve.push_back(c[c.size() / 2]);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (std::size_t k = grid.size() / 2; k < grid.size(); ++k) {
    if (curve[k] <= 0.0) continue;
    const double lx = std::log(static_cast<double>(grid[k])), ly = std::log(curve[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    m += 1.0;
  }
  const double den = m * sxx - sx * sx;
  const double slope = (m >= 2.0 && den > 0.0) ? (m * sxy - sx * sy) / den : 0.0;
  const bool growing = slope > kGrowthSlope;
  r.statistic = slope;
  r.estimate = slope;
  r.threshold = kGrowthSlope;
  r.details["growing"] = growing;
  r.details["classification"] = growing ? "growing" : "flattening";
  nlohmann::json pts = nlohmann::json::array();
  for (std::size_t k = 0; k < grid.size(); ++k) pts.push_back({grid[k], curve[k]});
  r.details["curve"] = pts;
  if (opt.expect_growing)
    r.verdict = (*opt.expect_growing == growing) ? Verdict::pass : Verdict::fail;
  else
    r.verdict = Verdict::pass;
  return r;
}

/// Survival curve points (x, P{X > x}) for plotting.
inline std::vector<std::pair<double, double>> survival_curve(std::vector<double> samples,
                                                             std::size_t points = 200) {
  std::sort(samples.begin(), samples.end());
  std::vector<std::pair<double, double>> out;
  const std::size_t n = samples.size();
  if (n == 0) return out;
  const std::size_t step = std::max<std::size_t>(1, n / points);
  for (std::size_t k = 0; k < n; k += step)
    out.emplace_back(samples[k], static_cast<double>(n - k - 1) / static_cast<double>(n));
  return out;
}

}  // namespace ushift
