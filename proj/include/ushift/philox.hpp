#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011) and the
// stream layout used for path increments.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace ushift {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                       std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

constexpr PhiloxCounter philox_round(const PhiloxCounter& c,
                                     const PhiloxKey& k) {
  std::uint32_t lo0 = 0, hi0 = 0, lo1 = 0, hi1 = 0;
  mulhilo(kPhiloxM0, c[0], lo0, hi0);
  mulhilo(kPhiloxM1, c[2], lo1, hi1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace detail

/// One Philox4x32-10 block: a pure function of (counter, key).
constexpr PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += detail::kPhiloxW0;
      key[1] += detail::kPhiloxW1;
    }
    ctr = detail::philox_round(ctr, key);
  }
  return ctr;
}

/// Maps two 32-bit words to a double in the open interval (0, 1).
constexpr double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 12;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

/// Stream of standard normals addressed by position. Position `i` always
/// yields the same value, so a stream can be resumed at any point.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t replicate, std::uint32_t tag)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        replicate_(replicate),
        tag_(tag) {}

  /// Both normals of the Box-Muller pair at `block`.
  std::array<double, 2> pair(std::uint64_t block) const {
    const PhiloxCounter out = philox4x32(
        {static_cast<std::uint32_t>(block),
         static_cast<std::uint32_t>(block >> 32),
         static_cast<std::uint32_t>(replicate_),
         tag_ ^ (static_cast<std::uint32_t>(replicate_ >> 32) << 8)},
        key_);
    const double u1 = to_open_unit(out[0], out[1]);
    const double u2 = to_open_unit(out[2], out[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  double at(std::uint64_t position) const { return pair(position / 2)[position % 2]; }

  /// Writes normals for positions [first, first + out.size()) into `out`.
  template <typename Span>
  void fill(std::uint64_t first, Span&& out) const {
    std::size_t i = 0;
    const std::size_t n = out.size();
    std::uint64_t pos = first;
    if (i < n && (pos & 1u)) {
      out[i++] = pair(pos / 2)[1];
      ++pos;
    }
    for (; i + 1 < n; i += 2, pos += 2) {
      const auto p = pair(pos / 2);
      out[i] = p[0];
      out[i + 1] = p[1];
    }
    if (i < n) out[i] = pair(pos / 2)[0];
  }

 private:
  PhiloxKey key_;
  std::uint64_t replicate_;
  std::uint32_t tag_;
};

/// Small sequential generator for seeded resampling and pair sampling.
class SeededUniform {
 public:
  SeededUniform(std::uint64_t seed, std::uint32_t tag)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        tag_(tag) {}

  double next() {
    if (lane_ == 2) {
      block_out_ = philox4x32({static_cast<std::uint32_t>(block_),
                               static_cast<std::uint32_t>(block_ >> 32),
                               0x5eedu, tag_},
                              key_);
      ++block_;
      lane_ = 0;
    }
    const double u =
        to_open_unit(block_out_[2 * lane_], block_out_[2 * lane_ + 1]);
    ++lane_;
    return u;
  }

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    const auto k = static_cast<std::size_t>(next() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

 private:
  PhiloxKey key_;
  std::uint32_t tag_;
  std::uint64_t block_ = 0;
  PhiloxCounter block_out_{};
  int lane_ = 2;
};

}  // namespace ushift
