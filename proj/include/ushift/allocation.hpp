#pragma once

// Balancing allocation rules between two grid measures, the inverse clock,
// the imbalance function with its running-minimum decomposition, and
// checkers for balancing, equivariance, right-stability and minimality.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include <json.hpp>

#include "ushift/errors.hpp"
#include "ushift/measures.hpp"
#include "ushift/path.hpp"
#include "ushift/philox.hpp"

namespace ushift {

struct BalanceResult {
  enum class Status { matched, censored };
  Status status = Status::censored;
  /// Matched grid index, or the window edge searched when censored.
  std::int64_t index = 0;
  Direction direction = Direction::forward;

  bool matched() const { return status == Status::matched; }

  static BalanceResult match(std::int64_t k) {
    return {Status::matched, k, Direction::forward};
  }
  static BalanceResult censor(std::int64_t edge, Direction dir) {
    return {Status::censored, edge, dir};
  }
};

using Allocation = std::function<BalanceResult(std::int64_t)>;

namespace detail {

inline constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2;

inline void require_same_grid(const CumulativeMeasure& a, const CumulativeMeasure& b) {
  if (!a.same_grid(b)) throw InvalidParameter("measures live on different grids");
}

inline void require_in_window(const CumulativeMeasure& m, std::int64_t s) {
  if (!m.contains(s)) throw OutOfWindow("query point outside the window");
}

// First index t != s (walking in `step` direction) where lead - lag
// accumulated over the closed range between s and t returns to <= tol after
// having been > tol; degenerate starts additionally need lag mass > tol.
inline BalanceResult balance_scan(const CumulativeMeasure& lead,
                                  const CumulativeMeasure& lag, std::int64_t s,
                                  double tol, int step) {
  const std::int64_t lo = -lead.neg_steps();
  const std::int64_t hi = lead.pos_steps();
  double g = 0.0, lag_sum = 0.0, abs_sum = 0.0;
  bool positive = false;
  std::int64_t n = 0;
  for (std::int64_t t = s; t >= lo && t <= hi; t += step) {
    const double a = lead.mass(t), b = lag.mass(t);
    g += a - b;
    lag_sum += b;
    abs_sum += a + b;
    ++n;
    const double guard = tol + static_cast<double>(n) * kUnitRoundoff * abs_sum;
    if (t != s && g <= guard && (positive || lag_sum > guard))
      return BalanceResult::match(t);
    if (g > guard) positive = true;
  }
  return step > 0 ? BalanceResult::censor(hi, Direction::forward)
                  : BalanceResult::censor(lo, Direction::backward);
}

}  // namespace detail

/// tau(s) = first t > s where xi[s,t] - eta[s,t] falls back to tol.
inline BalanceResult balance_forward(const CumulativeMeasure& xi,
                                     const CumulativeMeasure& eta, std::int64_t s,
                                     double tol = 0.0) {
  detail::require_same_grid(xi, eta);
  detail::require_in_window(xi, s);
  return detail::balance_scan(xi, eta, s, tol, +1);
}

/// Mirror rule: last u < t where eta[u,t] - xi[u,t] falls back to tol. On
/// eta-support points it inverts balance_forward.
inline BalanceResult balance_backward(const CumulativeMeasure& xi,
                                      const CumulativeMeasure& eta, std::int64_t t,
                                      double tol = 0.0) {
  detail::require_same_grid(xi, eta);
  detail::require_in_window(xi, t);
  return detail::balance_scan(eta, xi, t, tol, -1);
}

/// balance_forward for every index of the window in O(n log n) using a
/// monotone stack over prefix sums. Starts where the first cell is not
/// strictly positive fall back to the scan.
inline std::vector<BalanceResult> balance_forward_all(const CumulativeMeasure& xi,
                                                      const CumulativeMeasure& eta,
                                                      double tol = 0.0) {
  detail::require_same_grid(xi, eta);
  const std::int64_t lo = -xi.neg_steps();
  const std::size_t n = xi.masses().size();
  std::vector<double> F(n + 1, 0.0);
  double abs_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    F[i + 1] = F[i] + (xi.masses()[i] - eta.masses()[i]);
    abs_sum += xi.masses()[i] + eta.masses()[i];
  }
  const double guard = tol + 2.0 * static_cast<double>(n + 1) *
                                 detail::kUnitRoundoff * abs_sum;
  std::vector<BalanceResult> out(n);
  std::vector<std::size_t> stack;  // prefix positions, F strictly decreasing toward the bottom
  for (std::size_t i = n; i-- > 0;) {
    if (i + 1 < n) {
      const std::size_t p = i + 2;
      while (!stack.empty() && F[stack.back()] >= F[p]) stack.pop_back();
      stack.push_back(p);
    }
    const double first = xi.masses()[i] - eta.masses()[i];
    const std::int64_t s = lo + static_cast<std::int64_t>(i);
    if (!(first > guard)) {
      // An empty cell walks straight on to the next one.
      if (xi.masses()[i] == 0.0 && eta.masses()[i] == 0.0) {
        if (i + 1 == n) {
          out[i] = BalanceResult::censor(xi.pos_steps(), Direction::forward);
          continue;
        }
        const double a = xi.masses()[i + 1], b = eta.masses()[i + 1];
        if ((a == 0.0 && b == 0.0) || a - b > guard) {
          out[i] = out[i + 1];
          continue;
        }
        if (b > guard) {
          out[i] = BalanceResult::match(s + 1);
          continue;
        }
      }
      out[i] = detail::balance_scan(xi, eta, s, tol, +1);
      continue;
    }
    const double v = F[i] + guard;
    // stack from bottom: F increasing; find the topmost entry with F <= v.
    auto it = std::upper_bound(stack.begin(), stack.end(), v,
                               [&](double val, std::size_t p) { return val < F[p]; });
    if (it == stack.begin()) {
      out[i] = BalanceResult::censor(xi.pos_steps(), Direction::forward);
    } else {
      const std::size_t p = *(it - 1);
      out[i] = BalanceResult::match(lo + static_cast<std::int64_t>(p) - 1);
    }
  }
  return out;
}

/// First t > s with ell(s, t] > r.
inline BalanceResult clock_forward(const CumulativeMeasure& ell, std::int64_t s,
                                   double r) {
  detail::require_in_window(ell, s);
  if (!(r >= 0.0)) throw InvalidParameter("clock level must be >= 0");
  double acc = 0.0;
  std::int64_t n = 0;
  for (std::int64_t t = s + 1; t <= ell.pos_steps(); ++t) {
    acc += ell.mass(t);
    ++n;
    if (acc > r + static_cast<double>(n) * detail::kUnitRoundoff * acc)
      return BalanceResult::match(t);
  }
  return BalanceResult::censor(ell.pos_steps(), Direction::forward);
}

/// Last t < s with ell[t, s) > r.
inline BalanceResult clock_backward(const CumulativeMeasure& ell, std::int64_t s,
                                    double r) {
  detail::require_in_window(ell, s);
  if (!(r >= 0.0)) throw InvalidParameter("clock level must be >= 0");
  double acc = 0.0;
  std::int64_t n = 0;
  for (std::int64_t t = s - 1; t >= -ell.neg_steps(); --t) {
    acc += ell.mass(t);
    ++n;
    if (acc > r + static_cast<double>(n) * detail::kUnitRoundoff * acc)
      return BalanceResult::match(t);
  }
  return BalanceResult::censor(-ell.neg_steps(), Direction::backward);
}

/// Generalised inverse of ell at level r: the grid point where the level set
/// {cum = r} ends. Negative r uses the backward branch.
inline BalanceResult inverse_local_time(const CumulativeMeasure& ell, double r) {
  return r >= 0.0 ? clock_forward(ell, 0, r) : clock_backward(ell, 0, -r);
}

inline Allocation compose(Allocation tau1, Allocation tau2) {
  return [tau1 = std::move(tau1), tau2 = std::move(tau2)](std::int64_t s) {
    const BalanceResult r = tau1(s);
    if (!r.matched()) return r;
    return tau2(r.index);
  };
}

/// Allocation that evaluates balance_forward(xi, eta, s) on shared measures.
inline Allocation balancing_rule(std::shared_ptr<const CumulativeMeasure> xi,
                                 std::shared_ptr<const CumulativeMeasure> eta,
                                 double tol = 0.0) {
  return [xi = std::move(xi), eta = std::move(eta), tol](std::int64_t s) {
    return balance_forward(*xi, *eta, s, tol);
  };
}

/// Allocation backed by a precomputed table over the window of `xi`.
inline Allocation table_rule(std::shared_ptr<const std::vector<BalanceResult>> table,
                             std::int64_t lo) {
  return [table = std::move(table), lo](std::int64_t s) {
    const std::int64_t i = s - lo;
    if (i < 0 || i >= static_cast<std::int64_t>(table->size()))
      throw OutOfWindow("query point outside the window");
    return (*table)[static_cast<std::size_t>(i)];
  };
}

// ---------------------------------------------------------------------------

class ImbalanceFunction {
 public:
  ImbalanceFunction(const CumulativeMeasure& xi, const CumulativeMeasure& eta) {
    detail::require_same_grid(xi, eta);
    neg_ = xi.neg_steps();
    f_.resize(xi.masses().size());
    for (std::int64_t k = -neg_; k <= xi.pos_steps(); ++k)
      f_[static_cast<std::size_t>(k + neg_)] = xi.cum(k) - eta.cum(k);
  }

  static ImbalanceFunction from_values(std::int64_t neg_steps, std::vector<double> f) {
    if (neg_steps < 0 || static_cast<std::size_t>(neg_steps) >= f.size())
      throw InvalidParameter("origin outside the supplied values");
    ImbalanceFunction out;
    out.neg_ = neg_steps;
    out.f_ = std::move(f);
    return out;
  }

  double operator()(std::int64_t k) const { return f_[static_cast<std::size_t>(k + neg_)]; }
  std::int64_t neg_steps() const { return neg_; }
  std::int64_t pos_steps() const { return static_cast<std::int64_t>(f_.size()) - neg_ - 1; }

 private:
  ImbalanceFunction() = default;
  std::int64_t neg_ = 0;
  std::vector<double> f_;
};

struct IndexRun {
  std::int64_t first = 0;
  std::int64_t last = 0;
};

struct Decomposition {
  std::vector<double> running_min;  // m(t) for t = 0..a
  std::vector<IndexRun> excursions;  // maximal runs with f > m
  std::vector<std::int64_t> contact;  // C = {t : f(t) = m(t)}
};

inline Decomposition decompose(const ImbalanceFunction& f, std::int64_t a) {
  if (a < 0 || a > f.pos_steps()) throw OutOfWindow("a must lie in [0, window end]");
  Decomposition d;
  d.running_min.resize(static_cast<std::size_t>(a + 1));
  double m = std::numeric_limits<double>::infinity();
  for (std::int64_t t = a; t >= 0; --t) {
    m = std::min(m, f(t));
    d.running_min[static_cast<std::size_t>(t)] = m;
  }
  bool open = false;
  for (std::int64_t t = 0; t <= a; ++t) {
    if (f(t) > d.running_min[static_cast<std::size_t>(t)]) {
      if (!open) d.excursions.push_back({t, t});
      d.excursions.back().last = t;
      open = true;
    } else {
      d.contact.push_back(t);
      open = false;
    }
  }
  return d;
}

// ---------------------------------------------------------------------------

struct BalancingReport {
  std::vector<std::int64_t> edges;
  std::vector<double> image;
  std::vector<double> target;
  double max_abs = 0.0;
  double max_rel = 0.0;
  /// sum |image - target| / sum target over intervals with target mass.
  double aggregate_rel = 0.0;
  double censored_mass = 0.0;
  double outside_mass = 0.0;
  /// xi-mass sent to cells that carry no eta-mass.
  double off_support_mass = 0.0;
  double source_mass = 0.0;
};

/// Image of xi under tau on intervals [e_j, e_{j+1}) of grid indices.
inline BalancingReport check_balancing(const CumulativeMeasure& xi,
                                       const CumulativeMeasure& eta,
                                       const Allocation& tau,
                                       const std::vector<std::int64_t>& edges) {
  detail::require_same_grid(xi, eta);
  if (edges.size() < 2) throw InvalidParameter("partition needs two edges");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (edges[i] <= edges[i - 1]) throw InvalidParameter("partition edges must increase");
  if (!xi.contains(edges.front()) || !xi.contains(edges.back() - 1))
    throw OutOfWindow("partition outside the window");
  BalancingReport rep;
  rep.edges = edges;
  const std::size_t m = edges.size() - 1;
  rep.image.assign(m, 0.0);
  rep.target.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) rep.target[j] = eta.closed(edges[j], edges[j + 1] - 1);
  for (std::int64_t s = -xi.neg_steps(); s <= xi.pos_steps(); ++s) {
    const double w = xi.mass(s);
    if (w <= 0.0) continue;
    const BalanceResult r = tau(s);
    if (!r.matched()) {
      rep.censored_mass += w;
      continue;
    }
    rep.source_mass += w;
    if (!eta.contains(r.index) || eta.mass(r.index) <= 0.0) rep.off_support_mass += w;
    const auto it = std::upper_bound(edges.begin(), edges.end(), r.index);
    if (it == edges.begin() || it == edges.end()) {
      rep.outside_mass += w;
      continue;
    }
    rep.image[static_cast<std::size_t>(it - edges.begin()) - 1] += w;
  }
  double diff = 0.0, tot = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double d = std::abs(rep.image[j] - rep.target[j]);
    rep.max_abs = std::max(rep.max_abs, d);
    if (rep.target[j] > 0.0) {
      rep.max_rel = std::max(rep.max_rel, d / rep.target[j]);
      diff += d;
      tot += rep.target[j];
    }
  }
  rep.aggregate_rel = tot > 0.0 ? diff / tot : 0.0;
  return rep;
}

/// Leftmost minimiser of cum_xi - cum_eta over [window start, b]. Every
/// eta-cell in [a*, b] is the image of a xi-cell in [a*, b].
inline std::int64_t balanced_anchor(const CumulativeMeasure& xi,
                                    const CumulativeMeasure& eta, std::int64_t b) {
  detail::require_same_grid(xi, eta);
  std::int64_t best = -xi.neg_steps();
  double fmin = 0.0;
  for (std::int64_t t = -xi.neg_steps(); t <= b; ++t) {
    const double f = xi.closed(-xi.neg_steps(), t) - eta.closed(-xi.neg_steps(), t);
    if (f < fmin) {
      fmin = f;
      best = t + 1;
    }
  }
  return std::min(best, b);
}

struct EquivarianceReport {
  std::int64_t checked = 0;
  std::int64_t violations = 0;
  std::int64_t skipped = 0;
};

/// Compares tau on the path at s with tau on theta_k(path) at s - k.
inline EquivarianceReport check_equivariance(
    const GridPath& path, const std::function<Allocation(const GridPath&)>& factory,
    const std::vector<std::int64_t>& offsets, const std::vector<std::int64_t>& queries) {
  EquivarianceReport rep;
  const Allocation base = factory(path);
  for (std::int64_t k : offsets) {
    if (!path.contains(k)) {
      ++rep.skipped;
      continue;
    }
    const GridPath moved = shift(path, k);
    const Allocation other = factory(moved);
    for (std::int64_t s : queries) {
      if (!path.contains(s) || !moved.contains(s - k)) {
        ++rep.skipped;
        continue;
      }
      const BalanceResult a = base(s);
      const BalanceResult b = other(s - k);
      if (!a.matched() || !b.matched()) {
        ++rep.skipped;
        continue;
      }
      ++rep.checked;
      if (a.index - k != b.index) ++rep.violations;
    }
  }
  return rep;
}

struct StabilityReport {
  std::int64_t pairs_checked = 0;
  std::int64_t violations = 0;
  std::int64_t precondition_failures = 0;
  bool exhaustive = false;
  /// Exact violating xi x xi mass when exhaustive, otherwise the sampled
  /// fraction scaled by the total pair mass.
  double violation_mass = 0.0;
};

/// Counts pairs t < s <= tau(t) < tau(s) among xi-mass cells.
inline StabilityReport check_right_stable(const CumulativeMeasure& xi,
                                          const Allocation& tau, std::int64_t sample_pairs,
                                          std::uint64_t seed = 0,
                                          std::size_t exhaustive_limit = 2000) {
  StabilityReport rep;
  std::vector<std::int64_t> cells;
  std::vector<double> w;
  std::vector<BalanceResult> img;
  for (std::int64_t s = -xi.neg_steps(); s <= xi.pos_steps(); ++s) {
    if (xi.mass(s) <= 0.0) continue;
    const BalanceResult r = tau(s);
    if (r.matched() && r.index < s) {
      ++rep.precondition_failures;
      continue;
    }
    cells.push_back(s);
    w.push_back(xi.mass(s));
    img.push_back(r);
  }
  auto violates = [&](std::size_t i, std::size_t j) {  // i: t, j: s, cells[i] < cells[j]
    if (!img[i].matched() || !img[j].matched()) return false;
    return cells[j] <= img[i].index && img[i].index < img[j].index;
  };
  const std::size_t n = cells.size();
  if (n <= exhaustive_limit) {
    rep.exhaustive = true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        ++rep.pairs_checked;
        if (violates(i, j)) {
          ++rep.violations;
          rep.violation_mass += w[i] * w[j];
        }
      }
    return rep;
  }
  double total = 0.0, sq = 0.0;
  for (double x : w) {
    total += x;
    sq += x * x;
  }
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) cdf[i] = (acc += w[i]);
  SeededUniform u(seed, 0x57ab1eu);
  auto draw = [&] {
    const double x = u.next() * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
    return std::min(static_cast<std::size_t>(it - cdf.begin()), n - 1);
  };
  for (std::int64_t k = 0; k < sample_pairs; ++k) {
    std::size_t i = draw(), j = draw();
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    ++rep.pairs_checked;
    if (violates(i, j)) ++rep.violations;
  }
  if (rep.pairs_checked > 0)
    rep.violation_mass = static_cast<double>(rep.violations) /
                         static_cast<double>(rep.pairs_checked) * 0.5 * (total * total - sq);
  return rep;
}

struct MinimalityReport {
  std::int64_t precondition_failures = 0;
  double precondition_mass = 0.0;
  /// xi-mass of cells where the other rule stops strictly earlier.
  double smaller_mass = 0.0;
  BalancingReport other_balancing;
};

inline MinimalityReport check_minimal(const CumulativeMeasure& xi,
                                      const CumulativeMeasure& eta,
                                      const Allocation& tau_ref, const Allocation& tau_other,
                                      const std::vector<std::int64_t>& edges) {
  MinimalityReport rep;
  for (std::int64_t s = -xi.neg_steps(); s <= xi.pos_steps(); ++s) {
    const double w = xi.mass(s);
    if (w <= 0.0) continue;
    const BalanceResult r = tau_ref(s);
    const BalanceResult o = tau_other(s);
    if (!r.matched() || !o.matched()) continue;
    if (o.index < s || o.index > r.index) {
      ++rep.precondition_failures;
      rep.precondition_mass += w;
      continue;
    }
    if (o.index < r.index) rep.smaller_mass += w;
  }
  rep.other_balancing = check_balancing(xi, eta, tau_other, edges);
  return rep;
}

inline void to_json(nlohmann::json& j, const BalancingReport& r) {
  j = {{"max_abs", r.max_abs},           {"max_rel", r.max_rel},
       {"aggregate_rel", r.aggregate_rel}, {"censored_mass", r.censored_mass},
       {"outside_mass", r.outside_mass},   {"off_support_mass", r.off_support_mass},
       {"source_mass", r.source_mass},     {"intervals", r.image.size()}};
}
inline void to_json(nlohmann::json& j, const EquivarianceReport& r) {
  j = {{"checked", r.checked}, {"violations", r.violations}, {"skipped", r.skipped}};
}
inline void to_json(nlohmann::json& j, const StabilityReport& r) {
  j = {{"pairs_checked", r.pairs_checked},
       {"violations", r.violations},
       {"precondition_failures", r.precondition_failures},
       {"exhaustive", r.exhaustive},
       {"violation_mass", r.violation_mass}};
}
inline void to_json(nlohmann::json& j, const MinimalityReport& r) {
  j = {{"precondition_failures", r.precondition_failures},
       {"precondition_mass", r.precondition_mass},
       {"smaller_mass", r.smaller_mass},
       {"other_balancing", r.other_balancing}};
}

}  // namespace ushift
