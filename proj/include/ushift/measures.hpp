#pragma once

// Grid-aligned random measures on the time axis: box-kernel local times,
// additive functionals of target measures, and the occupation check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ushift/errors.hpp"
#include "ushift/path.hpp"

namespace ushift {

struct Atom {
  double location = 0.0;
  double weight = 0.0;
};

/// Normalised density component of a target measure.
class Density {
 public:
  enum class Kind { uniform, normal, piecewise };

  static Density uniform(double a, double b) {
    if (!(b > a)) throw InvalidParameter("uniform density needs a < b");
    Density d(Kind::uniform);
    d.params_ = {a, b};
    return d;
  }

  static Density normal(double mu, double sigma) {
    if (!(sigma > 0.0)) throw InvalidParameter("normal density needs sigma > 0");
    Density d(Kind::normal);
    d.params_ = {mu, sigma};
    return d;
  }

  /// Breakpoints x0 < x1 < ... < xk with heights h1..hk on [x_{i-1}, x_i).
  /// Heights are rescaled to integrate to one.
  static Density piecewise(std::vector<double> edges, std::vector<double> heights) {
    if (edges.size() < 2 || heights.size() + 1 != edges.size())
      throw InvalidParameter("piecewise density needs k heights and k+1 edges");
    double area = 0.0;
    for (std::size_t i = 0; i < heights.size(); ++i) {
      if (!(edges[i + 1] > edges[i]))
        throw InvalidParameter("piecewise edges must increase");
      if (!(heights[i] >= 0.0))
        throw InvalidParameter("piecewise heights must be >= 0");
      area += heights[i] * (edges[i + 1] - edges[i]);
    }
    if (!(area > 0.0)) throw InvalidParameter("piecewise density has zero mass");
    for (double& h : heights) h /= area;
    Density d(Kind::piecewise);
    d.params_ = std::move(edges);
    d.heights_ = std::move(heights);
    return d;
  }

  Kind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<double>& heights() const { return heights_; }

  double pdf(double x) const {
    switch (kind_) {
      case Kind::uniform:
        return (x >= params_[0] && x <= params_[1]) ? 1.0 / (params_[1] - params_[0])
                                                    : 0.0;
      case Kind::normal: {
        const double z = (x - params_[0]) / params_[1];
        return std::exp(-0.5 * z * z) /
               (params_[1] * std::sqrt(2.0 * std::numbers::pi));
      }
      case Kind::piecewise: {
        if (x < params_.front() || x >= params_.back()) return 0.0;
        const auto it = std::upper_bound(params_.begin(), params_.end(), x);
        return heights_[static_cast<std::size_t>(it - params_.begin()) - 1];
      }
    }
    return 0.0;
  }

  double cdf(double x) const {
    switch (kind_) {
      case Kind::uniform:
        return std::clamp((x - params_[0]) / (params_[1] - params_[0]), 0.0, 1.0);
      case Kind::normal:
        return 0.5 * std::erfc(-(x - params_[0]) / (params_[1] * std::numbers::sqrt2));
      case Kind::piecewise: {
        double acc = 0.0;
        for (std::size_t i = 0; i < heights_.size(); ++i) {
          if (x <= params_[i]) break;
          acc += heights_[i] * (std::min(x, params_[i + 1]) - params_[i]);
        }
        return std::min(acc, 1.0);
      }
    }
    return 0.0;
  }

 private:
  explicit Density(Kind k) : kind_(k) {}
  Kind kind_;
  std::vector<double> params_;
  std::vector<double> heights_;
};

/// Probability or sub-probability measure: atoms plus a weighted density.
class TargetMeasure {
 public:
  TargetMeasure() = default;
  TargetMeasure(std::vector<Atom> atoms, std::optional<Density> density = std::nullopt,
                double density_weight = 0.0)
      : atoms_(std::move(atoms)), density_(std::move(density)),
        density_weight_(density_ ? density_weight : 0.0) {
    validate();
  }

  static TargetMeasure dirac(double x) { return TargetMeasure({{x, 1.0}}); }

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::optional<Density>& density() const { return density_; }
  double density_weight() const { return density_weight_; }

  double total() const {
    double t = density_weight_;
    for (const Atom& a : atoms_) t += a.weight;
    return t;
  }
  bool is_sub_probability() const { return total() < 1.0 - 1e-12; }

  /// Weight of the atom at exactly `x` (0 if none).
  double atom_at(double x) const {
    for (const Atom& a : atoms_)
      if (a.location == x) return a.weight;
    return 0.0;
  }

  /// Same measure with the atom at `from` moved to `to`.
  TargetMeasure move_atom(double from, double to) const {
    TargetMeasure out = *this;
    for (Atom& a : out.atoms_)
      if (a.location == from) a.location = to;
    out.validate();
    return out;
  }

 private:
  void validate() const {
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (!(atoms_[i].weight > 0.0) || !std::isfinite(atoms_[i].location))
        throw InvalidParameter("atoms need finite locations and weights > 0");
      for (std::size_t j = 0; j < i; ++j)
        if (atoms_[j].location == atoms_[i].location)
          throw InvalidParameter("atom locations must be distinct");
    }
    if (density_ && !(density_weight_ > 0.0))
      throw InvalidParameter("density weight must be > 0");
    const double t = total();
    if (!(t > 0.0)) throw InvalidParameter("target measure is empty");
    if (t > 1.0 + 1e-12) throw InvalidParameter("target measure has total > 1");
  }

  std::vector<Atom> atoms_;
  std::optional<Density> density_;
  double density_weight_ = 0.0;
};

/// Random measure on the time grid. Each grid point k carries the mass of
/// the cell ending at k; cum(t) is xi(0,t] for t >= 0 and -xi(t,0] for t < 0.
class CumulativeMeasure {
 public:
  CumulativeMeasure() = default;

  static CumulativeMeasure from_masses(double dt, std::int64_t neg_steps,
                                       std::vector<double> masses) {
    if (!(dt > 0.0)) throw InvalidParameter("dt must be > 0");
    if (neg_steps < 0 || static_cast<std::size_t>(neg_steps) >= masses.size())
      throw InvalidParameter("origin outside the supplied masses");
    for (double m : masses)
      if (!(m >= 0.0) || !std::isfinite(m))
        throw InvalidParameter("cell masses must be finite and >= 0");
    CumulativeMeasure c;
    c.dt_ = dt;
    c.neg_ = neg_steps;
    c.mass_ = std::move(masses);
    c.prefix_.assign(c.mass_.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.mass_.size(); ++i)
      c.prefix_[i + 1] = c.prefix_[i] + c.mass_[i];
    return c;
  }

  double dt() const { return dt_; }
  std::int64_t neg_steps() const { return neg_; }
  std::int64_t pos_steps() const {
    return static_cast<std::int64_t>(mass_.size()) - neg_ - 1;
  }
  bool contains(std::int64_t k) const { return k >= -neg_ && k <= pos_steps(); }
  bool same_grid(const CumulativeMeasure& o) const {
    return dt_ == o.dt_ && neg_ == o.neg_ && mass_.size() == o.mass_.size();
  }

  double mass(std::int64_t k) const { return mass_[idx(k)]; }
  const std::vector<double>& masses() const { return mass_; }

  double cum(std::int64_t k) const {
    return prefix_[idx(k) + 1] - prefix_[idx(0) + 1];
  }

  /// Mass of the closed index range [s, t].
  double closed(std::int64_t s, std::int64_t t) const {
    if (t < s) return 0.0;
    return prefix_[idx(t) + 1] - prefix_[idx(s)];
  }

  double total() const { return prefix_.back(); }

 private:
  std::size_t idx(std::int64_t k) const { return static_cast<std::size_t>(k + neg_); }

  double dt_ = 1.0;
  std::int64_t neg_ = 0;
  std::vector<double> mass_{0.0};
  std::vector<double> prefix_{0.0, 0.0};
};

namespace detail {

inline void require_bandwidth(double eps) {
  if (!(eps > 0.0)) throw InvalidParameter("bandwidth must be > 0");
}

// Adds weight * dt/(2 eps) to every cell where the path is within eps of x.
inline void add_level(const GridPath& path, double x, double eps, double weight,
                      std::vector<double>& mass) {
  const double q = weight * path.dt() / (2.0 * eps);
  const double level = x - path.base();
  for (std::int64_t k = -path.neg_steps(); k <= path.pos_steps(); ++k)
    if (std::abs(path.centred(k) - level) <= eps)
      mass[static_cast<std::size_t>(k + path.neg_steps())] += q;
}

}  // namespace detail

inline CumulativeMeasure local_time_at(const GridPath& path, double x, double eps) {
  detail::require_bandwidth(eps);
  std::vector<double> mass(path.size(), 0.0);
  detail::add_level(path, x, eps, 1.0, mass);
  return CumulativeMeasure::from_masses(path.dt(), path.neg_steps(), std::move(mass));
}

inline CumulativeMeasure local_time_zero(const GridPath& path, double eps) {
  return local_time_at(path, 0.0, eps);
}

/// ell^nu: box-kernel local times for atoms, h(B_s) ds for the density part.
inline CumulativeMeasure additive_functional(const GridPath& path,
                                             const TargetMeasure& nu, double eps) {
  detail::require_bandwidth(eps);
  if (!(nu.total() > 0.0)) throw InvalidParameter("target measure is empty");
  std::vector<double> mass(path.size(), 0.0);
  for (const Atom& a : nu.atoms()) detail::add_level(path, a.location, eps, a.weight, mass);
  if (nu.density()) {
    const double w = nu.density_weight() * path.dt();
    for (std::int64_t k = -path.neg_steps(); k <= path.pos_steps(); ++k)
      mass[static_cast<std::size_t>(k + path.neg_steps())] +=
          w * nu.density()->pdf(path.value(k));
  }
  return CumulativeMeasure::from_masses(path.dt(), path.neg_steps(), std::move(mass));
}

struct OccupationBin {
  double lo = 0.0;
  double hi = 0.0;
  double occupation = 0.0;
  double local_time_estimate = 0.0;
};

struct OccupationReport {
  std::vector<OccupationBin> bins;
  double total_occupation = 0.0;
  /// max over bins of |occupation - estimate| / total occupation in the bins.
  double max_relative_residual = 0.0;
};

/// Compares time spent in each bin [e_i, e_{i+1}) with the local time at the
/// bin centre times the bin width.
inline OccupationReport occupation_check(const GridPath& path,
                                         const std::vector<double>& edges, double eps) {
  detail::require_bandwidth(eps);
  if (edges.size() < 2) throw InvalidParameter("need at least one bin");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1])) throw InvalidParameter("bin edges must increase");
  OccupationReport rep;
  const std::size_t nb = edges.size() - 1;
  rep.bins.resize(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    rep.bins[i].lo = edges[i];
    rep.bins[i].hi = edges[i + 1];
  }
  const double half = 1.0 / (2.0 * eps);
  for (std::int64_t k = -path.neg_steps(); k <= path.pos_steps(); ++k) {
    const double v = path.value(k);
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    if (it != edges.begin() && it != edges.end())
      rep.bins[static_cast<std::size_t>(it - edges.begin()) - 1].occupation += path.dt();
    for (auto& b : rep.bins)
      if (std::abs(v - 0.5 * (b.lo + b.hi)) <= eps)
        b.local_time_estimate += half * path.dt() * (b.hi - b.lo);
  }
  for (const auto& b : rep.bins) rep.total_occupation += b.occupation;
  if (rep.total_occupation > 0.0)
    for (const auto& b : rep.bins)
      rep.max_relative_residual =
          std::max(rep.max_relative_residual,
                   std::abs(b.occupation - b.local_time_estimate) / rep.total_occupation);
  return rep;
}

inline void write_csv(const CumulativeMeasure& m, std::ostream& os) {
  os << "t,cum\n";
  os.precision(17);
  for (std::int64_t k = -m.neg_steps(); k <= m.pos_steps(); ++k)
    os << static_cast<double>(k) * m.dt() << ',' << m.cum(k) << '\n';
}

}  // namespace ushift
