#pragma once

// Two-sided Brownian paths on a uniform time grid.
//
// Values are stored in the frame of the root simulation ("raw" values) with
// an additive start offset and a recentring anchor kept separately, so that
// translating or recentring a path never rewrites the shared increments:
//
//   value(k) = base + (raw[k] - anchor)

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ushift/errors.hpp"
#include "ushift/philox.hpp"

namespace ushift {

enum class Direction { forward, backward };

/// Identifies the random streams a path was drawn from. `root_lo`/`root_hi`
/// are the root-grid indices covered by the stored window; extension keeps
/// drawing from the same per-direction streams.
struct SeedInfo {
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::int64_t root_lo = 0;
  std::int64_t root_hi = 0;
  bool extensible = false;
};

/// Number of grid steps covering `duration` (durations that are an integer
/// multiple of `dt` up to rounding map to that integer).
inline std::int64_t steps_for(double duration, double dt) {
  if (!(duration >= 0.0)) throw InvalidParameter("duration must be >= 0");
  return static_cast<std::int64_t>(std::ceil(duration / dt - 1e-9));
}

class GridPath {
 public:
  GridPath() = default;

  /// Deterministic path from explicit values; `values[neg_steps]` sits at t=0.
  static GridPath from_values(double dt, std::int64_t neg_steps,
                              std::vector<double> values) {
    if (!(dt > 0.0)) throw InvalidParameter("dt must be > 0");
    if (neg_steps < 0 || static_cast<std::size_t>(neg_steps) >= values.size())
      throw InvalidParameter("origin outside the supplied values");
    GridPath p;
    p.dt_ = dt;
    p.neg_ = neg_steps;
    p.raw_ = std::move(values);
    p.seed_.root_lo = -neg_steps;
    p.seed_.root_hi = p.pos_steps();
    return p;
  }

  double dt() const { return dt_; }
  std::int64_t neg_steps() const { return neg_; }
  std::int64_t pos_steps() const {
    return static_cast<std::int64_t>(raw_.size()) - neg_ - 1;
  }
  std::size_t size() const { return raw_.size(); }
  bool contains(std::int64_t k) const { return k >= -neg_ && k <= pos_steps(); }

  double value(std::int64_t k) const { return base_ + centred(k); }
  double origin_value() const { return value(0); }
  double time(std::int64_t k) const { return static_cast<double>(k) * dt_; }

  /// Value without the start offset; level tests compare this against
  /// `x - base()` so that translations cancel exactly.
  double centred(std::int64_t k) const { return raw_[index(k)] - anchor_; }
  double base() const { return base_; }

  std::vector<double> values() const {
    std::vector<double> out(raw_.size());
    for (std::int64_t k = -neg_; k <= pos_steps(); ++k) out[index(k)] = value(k);
    return out;
  }

  const SeedInfo& seed_info() const { return seed_; }

  // Friends below build derived paths without copying through the public API.
  friend GridPath simulate_two_sided(double, double, double, std::uint64_t,
                                     std::uint64_t);
  friend GridPath extend(const GridPath&, Direction, double);
  friend GridPath extend_steps(const GridPath&, Direction, std::int64_t);
  friend GridPath shift(const GridPath&, std::int64_t);
  friend GridPath shift_recenter(const GridPath&, std::int64_t);
  friend GridPath start_at(const GridPath&, double);
  friend GridPath restrict_window(const GridPath&, std::int64_t, std::int64_t);

 private:
  std::size_t index(std::int64_t k) const {
    return static_cast<std::size_t>(k + neg_);
  }

  double dt_ = 1.0;
  std::int64_t neg_ = 0;
  std::vector<double> raw_{0.0};
  double base_ = 0.0;
  double anchor_ = 0.0;
  SeedInfo seed_{};
};

namespace detail {

inline constexpr std::uint32_t kForwardTag = 0x0f0f0001u;
inline constexpr std::uint32_t kBackwardTag = 0x0f0f0002u;

// Root step i -> i+1 (i >= 0) uses forward position i; root step i -> i-1
// (i <= 0) uses backward position -i.
inline void draw_forward(const SeedInfo& s, double sd, std::int64_t from_root,
                         std::int64_t count, std::vector<double>& raw) {
  const NormalStream stream(s.seed, s.replicate, kForwardTag);
  std::vector<double> z(static_cast<std::size_t>(count));
  stream.fill(static_cast<std::uint64_t>(from_root), std::span<double>(z));
  double b = raw.back();
  raw.reserve(raw.size() + z.size());
  for (double zi : z) {
    b += sd * zi;
    raw.push_back(b);
  }
}

inline std::vector<double> draw_backward(const SeedInfo& s, double sd,
                                         std::int64_t from_root,
                                         std::int64_t count, double start) {
  const NormalStream stream(s.seed, s.replicate, kBackwardTag);
  std::vector<double> z(static_cast<std::size_t>(count));
  stream.fill(static_cast<std::uint64_t>(-from_root), std::span<double>(z));
  std::vector<double> out(z.size());
  double b = start;
  for (std::size_t i = 0; i < z.size(); ++i) {
    b += sd * z[i];
    out[out.size() - 1 - i] = b;
  }
  return out;
}

}  // namespace detail

/// Simulates B on [-neg_horizon, pos_horizon] with B_0 = 0.
inline GridPath simulate_two_sided(double dt, double pos_horizon,
                                   double neg_horizon, std::uint64_t seed,
                                   std::uint64_t replicate) {
  if (!(dt > 0.0)) throw InvalidParameter("dt must be > 0");
  const std::int64_t pos = steps_for(pos_horizon, dt);
  const std::int64_t neg = steps_for(neg_horizon, dt);
  GridPath p;
  p.dt_ = dt;
  p.seed_ = SeedInfo{seed, replicate, 0, 0, true};
  const double sd = std::sqrt(dt);
  if (neg > 0) {
    auto back = detail::draw_backward(p.seed_, sd, 0, neg, 0.0);
    back.push_back(0.0);
    p.raw_ = std::move(back);
    p.neg_ = neg;
  }
  if (pos > 0) detail::draw_forward(p.seed_, sd, 0, pos, p.raw_);
  p.seed_.root_lo = -neg;
  p.seed_.root_hi = pos;
  return p;
}

/// Appends `extra_steps` grid steps in one direction from the path's streams.
inline GridPath extend_steps(const GridPath& path, Direction dir,
                             std::int64_t extra_steps) {
  if (extra_steps < 0) throw InvalidParameter("extension must be >= 0");
  if (extra_steps == 0) return path;
  const SeedInfo& s = path.seed_;
  if (!s.extensible) throw InvalidParameter("path has no random stream");
  GridPath out = path;
  const double sd = std::sqrt(path.dt_);
  if (dir == Direction::forward) {
    if (s.root_hi < 0)
      throw InvalidParameter("forward extension needs a window reaching t>=0");
    detail::draw_forward(s, sd, s.root_hi, extra_steps, out.raw_);
    out.seed_.root_hi += extra_steps;
  } else {
    if (s.root_lo > 0)
      throw InvalidParameter("backward extension needs a window reaching t<=0");
    auto back = detail::draw_backward(s, sd, s.root_lo, extra_steps,
                                      path.raw_.front());
    back.insert(back.end(), path.raw_.begin(), path.raw_.end());
    out.raw_ = std::move(back);
    out.neg_ += extra_steps;
    out.seed_.root_lo -= extra_steps;
  }
  return out;
}

inline GridPath extend(const GridPath& path, Direction dir, double extra) {
  if (!(extra >= 0.0)) throw InvalidParameter("extension must be >= 0");
  return extend_steps(path, dir, steps_for(extra, path.dt()));
}

/// Plain time shift (theta_k): value at j is the original value at k + j.
inline GridPath shift(const GridPath& path, std::int64_t k) {
  if (!path.contains(k)) throw OutOfWindow("shift index outside the window");
  GridPath out = path;
  out.neg_ = path.neg_ + k;
  return out;
}

/// Recentred shift: value at j is B_{k+j} - B_k.
inline GridPath shift_recenter(const GridPath& path, std::int64_t k) {
  if (!path.contains(k)) throw OutOfWindow("shift index outside the window");
  GridPath out = shift(path, k);
  out.base_ = 0.0;
  out.anchor_ = path.raw_[path.index(k)];
  return out;
}

/// The path under P_x: every value raised by x.
inline GridPath start_at(const GridPath& path, double x) {
  GridPath out = path;
  out.base_ = path.base_ + x;
  return out;
}

/// Keeps only grid indices in [lo, hi] (clamped to the window).
inline GridPath restrict_window(const GridPath& path, std::int64_t lo,
                                std::int64_t hi) {
  lo = std::max(lo, -path.neg_steps());
  hi = std::min(hi, path.pos_steps());
  if (lo > 0 || hi < 0) throw OutOfWindow("restriction must keep the origin");
  GridPath out = path;
  const auto first = path.raw_.begin() + static_cast<std::ptrdiff_t>(path.index(lo));
  const auto last = path.raw_.begin() + static_cast<std::ptrdiff_t>(path.index(hi)) + 1;
  out.raw_ = std::vector<double>(first, last);
  out.neg_ = -lo;
  out.seed_.root_hi = path.seed_.root_hi - (path.pos_steps() - hi);
  out.seed_.root_lo = path.seed_.root_lo + (lo + path.neg_steps());
  return out;
}

/// Debug dump as "t,value" lines.
inline void write_csv(const GridPath& path, std::ostream& os) {
  os << "t,value\n";
  os.precision(17);
  for (std::int64_t k = -path.neg_steps(); k <= path.pos_steps(); ++k)
    os << path.time(k) << ',' << path.value(k) << '\n';
}

}  // namespace ushift
