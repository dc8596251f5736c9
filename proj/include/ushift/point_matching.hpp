#pragma once

// Exact matching of two finite point sets on the integers, used as a ground
// truth for the grid balancing engine.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <json.hpp>

#include "ushift/allocation.hpp"
#include "ushift/errors.hpp"
#include "ushift/measures.hpp"
#include "ushift/philox.hpp"

namespace ushift {

struct PointConfig {
  std::vector<std::int64_t> xi;
  std::vector<std::int64_t> eta;
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  void validate() const {
    if (lo > hi) throw InvalidParameter("empty window");
    auto check = [&](const std::vector<std::int64_t>& v) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < lo || v[i] > hi) throw InvalidParameter("point outside the window");
        if (i > 0 && v[i] <= v[i - 1]) throw InvalidParameter("points must be strictly sorted");
      }
    };
    check(xi);
    check(eta);
    for (std::int64_t x : xi)
      if (std::binary_search(eta.begin(), eta.end(), x))
        throw InvalidParameter("xi and eta share a point");
  }

  bool is_xi(std::int64_t s) const { return std::binary_search(xi.begin(), xi.end(), s); }
  bool is_eta(std::int64_t s) const { return std::binary_search(eta.begin(), eta.end(), s); }
};

inline void to_json(nlohmann::json& j, const PointConfig& c) {
  j = {{"xi", c.xi}, {"eta", c.eta}, {"window", {c.lo, c.hi}}};
}
inline void from_json(const nlohmann::json& j, PointConfig& c) {
  j.at("xi").get_to(c.xi);
  j.at("eta").get_to(c.eta);
  c.lo = j.at("window").at(0).get<std::int64_t>();
  c.hi = j.at("window").at(1).get<std::int64_t>();
  c.validate();
}

/// Smallest t >= s with equal counts on [s, t], the common count being
/// positive when s is a xi-point. nullopt when the window runs out.
inline std::optional<std::int64_t> match_forward(const PointConfig& c, std::int64_t s) {
  if (s < c.lo || s > c.hi) throw OutOfWindow("query outside the window");
  std::int64_t nx = 0, ne = 0;
  for (std::int64_t t = s; t <= c.hi; ++t) {
    nx += c.is_xi(t);
    ne += c.is_eta(t);
    if (nx == ne && (nx > 0 || !c.is_xi(s))) return t;
  }
  return std::nullopt;
}

/// Largest u <= t with equal counts on [u, t], positive when t is an eta-point.
inline std::optional<std::int64_t> match_backward(const PointConfig& c, std::int64_t t) {
  if (t < c.lo || t > c.hi) throw OutOfWindow("query outside the window");
  std::int64_t nx = 0, ne = 0;
  for (std::int64_t u = t; u >= c.lo; --u) {
    nx += c.is_xi(u);
    ne += c.is_eta(u);
    if (nx == ne && (ne > 0 || !c.is_eta(t))) return u;
  }
  return std::nullopt;
}

struct ExactReport {
  std::int64_t matched = 0;
  std::int64_t censored = 0;
  std::int64_t balancing_violations = 0;
  std::int64_t stability_violations = 0;
  // Alternative matching, if supplied.
  std::int64_t alt_precondition_violations = 0;
  std::int64_t alt_balancing_violations = 0;
  std::int64_t alt_stability_violations = 0;
  std::int64_t alt_smaller = 0;

  bool passed() const { return balancing_violations == 0 && stability_violations == 0; }
};

inline void to_json(nlohmann::json& j, const ExactReport& r) {
  j = {{"matched", r.matched},
       {"censored", r.censored},
       {"balancing_violations", r.balancing_violations},
       {"stability_violations", r.stability_violations},
       {"alt_precondition_violations", r.alt_precondition_violations},
       {"alt_balancing_violations", r.alt_balancing_violations},
       {"alt_stability_violations", r.alt_stability_violations},
       {"alt_smaller", r.alt_smaller}};
}

using PointMatching = std::map<std::int64_t, std::int64_t>;

namespace detail {

inline std::int64_t injectivity_violations(const PointConfig& c, const PointMatching& m) {
  std::int64_t bad = 0;
  std::map<std::int64_t, int> hits;
  for (const auto& [s, t] : m) {
    if (!c.is_eta(t)) ++bad;
    if (++hits[t] > 1) ++bad;
  }
  return bad;
}

inline std::int64_t stability_violations(const PointMatching& m) {
  std::int64_t bad = 0;
  for (auto i = m.begin(); i != m.end(); ++i)
    for (auto j = std::next(i); j != m.end(); ++j)
      if (j->first <= i->second && i->second < j->second) ++bad;
  return bad;
}

}  // namespace detail

inline PointMatching stable_matching(const PointConfig& c) {
  PointMatching m;
  for (std::int64_t s : c.xi)
    if (auto t = match_forward(c, s)) m[s] = *t;
  return m;
}

/// Exact checks: the matching is a bijection between matched xi-points and
/// the eta-points matched backward, and has no right-stability violations.
inline ExactReport verify_exact(const PointConfig& c,
                                const std::optional<PointMatching>& alternative = std::nullopt) {
  c.validate();
  ExactReport rep;
  const PointMatching m = stable_matching(c);
  rep.matched = static_cast<std::int64_t>(m.size());
  rep.censored = static_cast<std::int64_t>(c.xi.size()) - rep.matched;
  rep.balancing_violations = detail::injectivity_violations(c, m);
  for (std::int64_t t : c.eta) {
    const auto u = match_backward(c, t);
    if (!u) continue;
    const auto it = m.find(*u);
    if (it == m.end() || it->second != t) ++rep.balancing_violations;
  }
  for (const auto& [s, t] : m) {
    const auto u = match_backward(c, t);
    if (!u || *u != s) ++rep.balancing_violations;
  }
  rep.stability_violations = detail::stability_violations(m);
  if (alternative) {
    const PointMatching& a = *alternative;
    rep.alt_balancing_violations = detail::injectivity_violations(c, a);
    if (a.size() != m.size()) ++rep.alt_balancing_violations;
    rep.alt_stability_violations = detail::stability_violations(a);
    for (const auto& [s, t] : a) {
      const auto it = m.find(s);
      if (!c.is_xi(s) || it == m.end() || t < s || t > it->second) {
        ++rep.alt_precondition_violations;
        continue;
      }
      if (t < it->second) ++rep.alt_smaller;
    }
  }
  return rep;
}

/// Seeded random configuration with n = m points per side.
inline PointConfig random_config(std::uint64_t seed, std::uint64_t index,
                                 std::size_t max_points = 20, std::int64_t half_width = 25) {
  SeededUniform u(seed ^ (index * 0x9E3779B97F4A7C15ull), 0x90c0u);
  const std::size_t n = u.index(max_points + 1);
  std::vector<std::int64_t> slots;
  for (std::int64_t k = -half_width; k <= half_width; ++k) slots.push_back(k);
  if (2 * n > slots.size()) throw InvalidParameter("window too small for the point count");
  for (std::size_t i = 0; i < 2 * n; ++i)
    std::swap(slots[i], slots[i + u.index(slots.size() - i)]);
  PointConfig c;
  c.lo = -half_width;
  c.hi = half_width;
  c.xi.assign(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(n));
  c.eta.assign(slots.begin() + static_cast<std::ptrdiff_t>(n),
               slots.begin() + static_cast<std::ptrdiff_t>(2 * n));
  std::sort(c.xi.begin(), c.xi.end());
  std::sort(c.eta.begin(), c.eta.end());
  return c;
}

/// Unit atoms on a unit grid over the window; the window must contain 0.
inline std::pair<CumulativeMeasure, CumulativeMeasure> embed_as_measures(const PointConfig& c) {
  if (c.lo > 0 || c.hi < 0) throw InvalidParameter("window must contain the origin");
  const auto n = static_cast<std::size_t>(c.hi - c.lo + 1);
  std::vector<double> mx(n, 0.0), me(n, 0.0);
  for (std::int64_t s : c.xi) mx[static_cast<std::size_t>(s - c.lo)] = 1.0;
  for (std::int64_t s : c.eta) me[static_cast<std::size_t>(s - c.lo)] = 1.0;
  return {CumulativeMeasure::from_masses(1.0, -c.lo, std::move(mx)),
          CumulativeMeasure::from_masses(1.0, -c.lo, std::move(me))};
}

struct ConsistencyReport {
  std::int64_t queries = 0;
  std::int64_t mismatches = 0;
};

/// Runs the grid engine (scan and tabulated) at every xi-point and compares
/// with the exact matching.
inline ConsistencyReport engine_consistency(const PointConfig& c) {
  ConsistencyReport rep;
  const auto [xm, em] = embed_as_measures(c);
  const auto table = balance_forward_all(xm, em);
  for (std::int64_t s : c.xi) {
    ++rep.queries;
    const auto want = match_forward(c, s);
    const BalanceResult scan = balance_forward(xm, em, s);
    const BalanceResult tab = table[static_cast<std::size_t>(s - c.lo)];
    auto same = [&](const BalanceResult& r) {
      return want ? (r.matched() && r.index == *want) : !r.matched();
    };
    if (!same(scan) || !same(tab)) ++rep.mismatches;
  }
  return rep;
}

}  // namespace ushift
