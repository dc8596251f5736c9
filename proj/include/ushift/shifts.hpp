#pragma once

// Unbiased-shift constructions. Each one is an allocation rule on a fixed
// path window; the shift itself is the rule evaluated at 0, with the window
// doubled on censoring up to a hard cap.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ushift/allocation.hpp"
#include "ushift/errors.hpp"
#include "ushift/measures.hpp"
#include "ushift/path.hpp"

namespace ushift {

enum class Construction {
  bertoin_lejan,
  inverse_local_time,
  atom_splitting,
  atom_probability,
  non_stopping,
  excursion_reflection,
  fixed_time,
};

inline std::string_view to_string(Construction c) {
  switch (c) {
    case Construction::bertoin_lejan: return "bertoin_lejan";
    case Construction::inverse_local_time: return "inverse_local_time";
    case Construction::atom_splitting: return "atom_splitting";
    case Construction::atom_probability: return "atom_probability";
    case Construction::non_stopping: return "non_stopping";
    case Construction::excursion_reflection: return "excursion_reflection";
    case Construction::fixed_time: return "fixed_time";
  }
  return "unknown";
}

inline Construction construction_from_string(std::string_view s) {
  for (Construction c :
       {Construction::bertoin_lejan, Construction::inverse_local_time,
        Construction::atom_splitting, Construction::atom_probability,
        Construction::non_stopping, Construction::excursion_reflection,
        Construction::fixed_time})
    if (to_string(c) == s) return c;
  throw InvalidParameter("unknown construction: " + std::string(s));
}

struct ConstructionSpec {
  Construction kind = Construction::bertoin_lejan;
  TargetMeasure nu = TargetMeasure::dirac(1.0);
  double r = 1.0;           // inverse local time level
  double y = 1.0;           // atom splitting relay level
  double p = 0.5;           // atom probability
  double x = 1.0;           // non-stopping target level
  double fixed_time = 1.0;  // negative control
  double tol = 0.0;
};

struct ShiftOptions {
  double bandwidth = 0.0;  // 0 selects sqrt(dt)
  double base_horizon = 8.0;
  double max_horizon = 1e3;
  double keep = 1.0;  // half-width of the stored shifted path
};

inline double effective_bandwidth(const ShiftOptions& o, double dt) {
  return o.bandwidth > 0.0 ? o.bandwidth : std::sqrt(dt);
}

/// Throws ConstructionMismatch when the parameters do not fit the rule.
inline void validate(const ConstructionSpec& spec) {
  switch (spec.kind) {
    case Construction::bertoin_lejan:
      if (spec.nu.atom_at(0.0) > 0.0)
        throw ConstructionMismatch("target has an atom at 0; use atom_splitting");
      break;
    case Construction::atom_splitting:
      if (!(spec.nu.atom_at(0.0) > 0.0))
        throw ConstructionMismatch("atom_splitting needs an atom at 0");
      if (spec.y == 0.0) throw ConstructionMismatch("relay level y must be nonzero");
      if (spec.nu.atom_at(spec.y) > 0.0)
        throw ConstructionMismatch("target already has an atom at y");
      break;
    case Construction::atom_probability:
      if (!(spec.p >= 0.0 && spec.p <= 1.0))
        throw InvalidParameter("p must lie in [0, 1]");
      break;
    case Construction::non_stopping:
      if (spec.x == 0.0) throw ConstructionMismatch("level x must be nonzero");
      break;
    case Construction::inverse_local_time:
    case Construction::excursion_reflection:
    case Construction::fixed_time:
      break;
  }
}

/// Evaluator that optionally records intermediate stage times.
using TracedAllocation =
    std::function<BalanceResult(std::int64_t, std::vector<std::int64_t>*)>;

struct AllocationRule {
  TracedAllocation eval;
  std::shared_ptr<const CumulativeMeasure> xi;   // source measure
  std::shared_ptr<const CumulativeMeasure> eta;  // target measure
  bool nonnegative = true;
  bool stopping = true;
  /// True when eval is exactly balance_forward(xi, eta, .).
  bool plain_balancing = false;

  Allocation tau() const {
    return [e = eval](std::int64_t s) { return e(s, nullptr); };
  }

  /// Same rule, tabulated over the window when that is cheaper.
  Allocation fast_tau(double tol = 0.0) const {
    if (!plain_balancing) return tau();
    auto table = std::make_shared<const std::vector<BalanceResult>>(
        balance_forward_all(*xi, *eta, tol));
    return table_rule(std::move(table), -xi->neg_steps());
  }
};

namespace detail {

inline bool near_level(const GridPath& p, std::int64_t k, double x, double eps) {
  return std::abs(p.centred(k) - (x - p.base())) <= eps;
}

inline void trace(std::vector<std::int64_t>* t, const BalanceResult& r) {
  if (t && r.matched()) t->push_back(r.index);
}

template <typename T>
std::shared_ptr<const T> share(T v) {
  return std::make_shared<const T>(std::move(v));
}

// Gap structure for excursion reflection: runs are maximal stretches off the
// band |B| <= eps with constant sign; a run is big when it reaches |B| >= 1.
struct GapFinder {
  const GridPath* path;
  double eps;

  int label(std::int64_t k) const {
    const double v = path->centred(k) + path->base();
    if (std::abs(v) <= eps) return 0;
    return v > 0.0 ? 1 : -1;
  }
  bool big_level(std::int64_t k) const {
    return std::abs(path->centred(k) + path->base()) >= 1.0;
  }

  // First index of the first big run strictly after s (s is a band cell).
  std::optional<std::int64_t> next_big(std::int64_t s) const {
    std::int64_t start = 0;
    int sign = 0;
    for (std::int64_t k = s + 1; k <= path->pos_steps(); ++k) {
      const int l = label(k);
      if (l != sign) {
        sign = l;
        start = k;
      }
      if (sign != 0 && big_level(k)) return start;
    }
    return std::nullopt;
  }

  std::optional<std::int64_t> prev_big(std::int64_t s) const {
    std::int64_t start = 0;
    int sign = 0;
    for (std::int64_t k = s - 1; k >= -path->neg_steps(); --k) {
      const int l = label(k);
      if (l != sign) {
        sign = l;
        start = k;
      }
      if (sign != 0 && big_level(k)) return start;
    }
    return std::nullopt;
  }
};

inline BalanceResult reflect_in_gap(const CumulativeMeasure& ell, std::int64_t s,
                                    std::int64_t b, std::int64_t a) {
  std::vector<std::int64_t> cells;
  std::vector<double> w;
  std::size_t j = 0;
  for (std::int64_t k = b + 1; k < a; ++k) {
    if (ell.mass(k) <= 0.0) continue;
    if (k == s) j = cells.size();
    cells.push_back(k);
    w.push_back(ell.mass(k));
  }
  const std::size_t K = cells.size();
  double total = 0.0;
  for (double x : w) total += x;
  double before = 0.0;
  for (std::size_t i = 0; i < j; ++i) before += w[i];
  const double guard = 4.0 * static_cast<double>(K + 1) * kUnitRoundoff * total;
  if (before <= 0.5 * total) {
    // Mirror from the right end: the cell with `before` mass strictly after it.
    double after = 0.0;
    for (std::size_t i = K; i-- > 0;) {
      if (after >= before - guard) return BalanceResult::match(cells[i]);
      after += w[i];
    }
    return BalanceResult::match(cells.front());
  }
  const double tail = total - before - w[j];
  double head = 0.0;
  for (std::size_t i = 0; i < K; ++i) {
    if (head >= tail - guard) return BalanceResult::match(cells[i]);
    head += w[i];
  }
  return BalanceResult::match(cells.back());
}

}  // namespace detail

/// Builds the allocation rule of `spec` on the window of `path`.
inline AllocationRule make_rule(const GridPath& path, const ConstructionSpec& spec,
                                double eps) {
  validate(spec);
  using detail::share;
  AllocationRule rule;
  const double tol = spec.tol;
  switch (spec.kind) {
    case Construction::bertoin_lejan: {
      auto l0 = share(local_time_zero(path, eps));
      auto lnu = share(additive_functional(path, spec.nu, eps));
      rule.xi = l0;
      rule.eta = lnu;
      rule.plain_balancing = true;
      rule.eval = [l0, lnu, tol](std::int64_t s, std::vector<std::int64_t>* t) {
        const auto r = balance_forward(*l0, *lnu, s, tol);
        detail::trace(t, r);
        return r;
      };
      break;
    }
    case Construction::inverse_local_time: {
      auto l0 = share(local_time_zero(path, eps));
      rule.xi = rule.eta = l0;
      rule.nonnegative = spec.r >= 0.0;
      const double r = spec.r;
      rule.eval = [l0, r](std::int64_t s, std::vector<std::int64_t>* t) {
        const auto res = r >= 0.0 ? clock_forward(*l0, s, r) : clock_backward(*l0, s, -r);
        detail::trace(t, res);
        return res;
      };
      break;
    }
    case Construction::atom_splitting: {
      auto l0 = share(local_time_zero(path, eps));
      auto lnu = share(additive_functional(path, spec.nu, eps));
      auto lmu = share(additive_functional(path, spec.nu.move_atom(0.0, spec.y), eps));
      auto ly = share(local_time_at(path, spec.y, eps));
      rule.xi = l0;
      rule.eta = lnu;
      auto p = share(path);
      const double y = spec.y;
      rule.eval = [=](std::int64_t s, std::vector<std::int64_t>* t) {
        const auto r1 = balance_forward(*l0, *lmu, s, tol);
        detail::trace(t, r1);
        if (!r1.matched() || !detail::near_level(*p, r1.index, y, eps)) return r1;
        const auto r2 = balance_forward(*ly, *l0, r1.index, tol);
        detail::trace(t, r2);
        return r2;
      };
      break;
    }
    case Construction::atom_probability: {
      std::vector<Atom> atoms;
      if (spec.p > 0.0) atoms.push_back({1.0, spec.p});
      if (spec.p < 1.0) atoms.push_back({2.0, 1.0 - spec.p});
      auto l0 = share(local_time_zero(path, eps));
      auto lnu = share(additive_functional(path, TargetMeasure(atoms), eps));
      auto first = share(balance_forward_all(*l0, *lnu, tol));
      auto p = share(path);
      rule.xi = rule.eta = l0;
      const std::int64_t lo = -path.neg_steps();
      rule.eval = [=](std::int64_t s, std::vector<std::int64_t>* t) {
        auto at = [&](std::int64_t k) { return (*first)[static_cast<std::size_t>(k - lo)]; };
        if (!l0->contains(s)) throw OutOfWindow("query point outside the window");
        const auto r1 = at(s);
        detail::trace(t, r1);
        if (!r1.matched()) return r1;
        if (detail::near_level(*p, r1.index, 1.0, eps)) return BalanceResult::match(s);
        double acc = 0.0, abs_sum = 0.0;
        std::int64_t n = 0;
        for (std::int64_t k = s + 1; k <= l0->pos_steps(); ++k) {
          const double w = l0->mass(k);
          if (w <= 0.0) continue;
          const auto rk = at(k);
          if (!rk.matched()) return rk;
          if (!detail::near_level(*p, rk.index, 2.0, eps)) continue;
          acc += w;
          abs_sum += w;
          ++n;
          if (acc > 1.0 + static_cast<double>(n) * detail::kUnitRoundoff * abs_sum)
            return BalanceResult::match(k);
        }
        return BalanceResult::censor(l0->pos_steps(), Direction::forward);
      };
      break;
    }
    case Construction::non_stopping: {
      auto l0 = share(local_time_zero(path, eps));
      auto lx = share(local_time_at(path, spec.x, eps));
      rule.xi = l0;
      rule.eta = lx;
      rule.stopping = false;
      rule.eval = [=](std::int64_t s, std::vector<std::int64_t>* t) {
        BalanceResult r = balance_forward(*l0, *lx, s, tol);
        detail::trace(t, r);
        if (!r.matched()) return r;
        r = clock_forward(*lx, r.index, 1.0);
        detail::trace(t, r);
        if (!r.matched()) return r;
        r = balance_forward(*lx, *l0, r.index, tol);
        detail::trace(t, r);
        if (!r.matched()) return r;
        r = balance_forward(*l0, *lx, r.index, tol);
        detail::trace(t, r);
        if (!r.matched()) return r;
        r = clock_backward(*lx, r.index, 1.0);
        detail::trace(t, r);
        return r;
      };
      break;
    }
    case Construction::excursion_reflection: {
      auto l0 = share(local_time_zero(path, eps));
      auto p = share(path);
      rule.xi = rule.eta = l0;
      rule.nonnegative = false;
      rule.eval = [=](std::int64_t s, std::vector<std::int64_t>* t) {
        if (!l0->contains(s)) throw OutOfWindow("query point outside the window");
        if (l0->mass(s) <= 0.0) return BalanceResult::match(s);
        const detail::GapFinder gf{p.get(), eps};
        const auto a = gf.next_big(s);
        if (!a) return BalanceResult::censor(l0->pos_steps(), Direction::forward);
        const auto b = gf.prev_big(s);
        if (!b) return BalanceResult::censor(-l0->neg_steps(), Direction::backward);
        // prev_big returns the run's first index walking backward, i.e. its end.
        const auto r = detail::reflect_in_gap(*l0, s, *b, *a);
        detail::trace(t, r);
        return r;
      };
      break;
    }
    case Construction::fixed_time: {
      const std::int64_t k = std::llround(spec.fixed_time / path.dt());
      const std::int64_t hi = path.pos_steps(), lo = -path.neg_steps();
      rule.nonnegative = k >= 0;
      rule.eval = [k, hi, lo](std::int64_t s, std::vector<std::int64_t>* t) {
        if (s + k > hi) return BalanceResult::censor(hi, Direction::forward);
        if (s + k < lo) return BalanceResult::censor(lo, Direction::backward);
        const auto r = BalanceResult::match(s + k);
        detail::trace(t, r);
        return r;
      };
      break;
    }
  }
  return rule;
}

struct ShiftOutcome {
  BalanceResult::Status status = BalanceResult::Status::censored;
  Construction construction = Construction::bertoin_lejan;
  std::int64_t T_index = 0;  // matched time, or the horizon searched
  double T = 0.0;
  double B_T = 0.0;
  std::optional<double> ell0;  // closed local time at 0 over [0, T]; a lower bound when censored
  GridPath shifted;            // B_{T+.} - B_T on [-keep, keep]
  int extensions_used = 0;
  Direction censored_direction = Direction::forward;
  std::vector<std::int64_t> stages;
  bool stopping = true;

  bool matched() const { return status == BalanceResult::Status::matched; }
};

/// Runs the construction at s = 0 on `path`, extending on censoring. The
/// final searched window is stored in `searched` when given.
inline ShiftOutcome run_shift(GridPath path, const ConstructionSpec& spec,
                              const ShiftOptions& opts, GridPath* searched = nullptr) {
  validate(spec);
  if (!(opts.max_horizon > 0.0)) throw InvalidParameter("max_horizon must be > 0");
  if (!(opts.keep >= 0.0)) throw InvalidParameter("keep must be >= 0");
  const double dt = path.dt();
  const double eps = effective_bandwidth(opts, dt);
  const std::int64_t cap = steps_for(opts.max_horizon, dt);
  ShiftOutcome out;
  out.construction = spec.kind;
  for (;;) {
    const AllocationRule rule = make_rule(path, spec, eps);
    out.stopping = rule.stopping;
    out.stages.clear();
    const BalanceResult r = rule.eval(0, &out.stages);
    if (r.matched()) {
      out.status = BalanceResult::Status::matched;
      out.T_index = r.index;
      break;
    }
    const bool fwd = r.direction == Direction::forward;
    const std::int64_t cur = fwd ? path.pos_steps() : path.neg_steps();
    if (cur >= cap || !path.seed_info().extensible) {
      out.status = BalanceResult::Status::censored;
      out.T_index = r.index;
      out.censored_direction = r.direction;
      break;
    }
    const std::int64_t grow =
        std::min(std::max<std::int64_t>(cur, steps_for(opts.base_horizon, dt)), cap - cur);
    path = extend_steps(path, r.direction, std::max<std::int64_t>(grow, 1));
    ++out.extensions_used;
  }
  out.T = path.time(out.T_index);
  if (searched) *searched = path;
  if (!out.matched()) {
    if (out.T_index >= 0) out.ell0 = local_time_zero(path, eps).closed(0, out.T_index);
    return out;
  }
  out.B_T = path.value(out.T_index);
  if (out.T_index >= 0) out.ell0 = local_time_zero(path, eps).closed(0, out.T_index);
  const std::int64_t keep = steps_for(opts.keep, dt);
  if (path.seed_info().extensible) {
    if (out.T_index + keep > path.pos_steps())
      path = extend_steps(path, Direction::forward, out.T_index + keep - path.pos_steps());
    if (out.T_index - keep < -path.neg_steps())
      path = extend_steps(path, Direction::backward,
                          -path.neg_steps() - (out.T_index - keep));
  }
  out.shifted = restrict_window(shift_recenter(path, out.T_index), -keep, keep);
  return out;
}

/// Simulates replicate `replicate` and runs the construction on it.
inline ShiftOutcome simulate_shift(double dt, std::uint64_t seed, std::uint64_t replicate,
                                   const ConstructionSpec& spec, const ShiftOptions& opts,
                                   GridPath* searched = nullptr) {
  const double h = std::min(opts.base_horizon, opts.max_horizon);
  GridPath path = simulate_two_sided(dt, h, std::max(h, opts.keep), seed, replicate);
  return run_shift(std::move(path), spec, opts, searched);
}

/// First times after and before 0 at which |B| reaches 1, as grid indices.
inline std::pair<std::optional<std::int64_t>, std::optional<std::int64_t>>
unit_exit_times(const GridPath& path) {
  std::pair<std::optional<std::int64_t>, std::optional<std::int64_t>> out;
  for (std::int64_t k = 1; k <= path.pos_steps(); ++k)
    if (std::abs(path.value(k)) >= 1.0) {
      out.first = k;
      break;
    }
  for (std::int64_t k = -1; k >= -path.neg_steps(); --k)
    if (std::abs(path.value(k)) >= 1.0) {
      out.second = -k;
      break;
    }
  return out;
}

}  // namespace ushift
