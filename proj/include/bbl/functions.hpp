#pragma once

// Finitely supported nonnegative functions on Z^d, their layer-cake
// decomposition and the one-dimensional monotone transport between two
// layer cakes of equal mass.

#include <cstddef>
#include <map>
#include <vector>

#include "bbl/rational.hpp"

namespace bbl {

/// A map Z^d -> [0, inf) with finite support. Only strictly positive values
/// are stored; setting a point to zero removes it.
template <class V>
class BasicSparseFunction {
 public:
  using value_type = V;
  using map_type = std::map<Point, V>;

  explicit BasicSparseFunction(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) throw Error(ErrorCode::invalid_argument, "dimension must be positive");
  }

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t support_size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const map_type& entries() const noexcept { return entries_; }

  void set(const Point& x, V value) {
    check_point(x);
    if (value < 0) throw Error(ErrorCode::invalid_argument, "function values must be nonnegative");
    if (value == 0) {
      entries_.erase(x);
      return;
    }
    entries_.insert_or_assign(x, std::move(value));
  }

  /// Raises f(x) to at least `value`.
  void raise_to(const Point& x, const V& value) {
    if (!(value > 0)) return;
    auto [it, inserted] = entries_.try_emplace(x, value);
    if (!inserted && it->second < value) it->second = value;
  }

  V at(const Point& x) const {
    auto it = entries_.find(x);
    return it == entries_.end() ? V(0) : it->second;
  }

  V mass() const {
    V total(0);
    for (const auto& [x, v] : entries_) total += v;
    return total;
  }

  /// Zero for the empty function.
  V max_value() const {
    V best(0);
    for (const auto& [x, v] : entries_)
      if (best < v) best = v;
    return best;
  }

  BasicSparseFunction translated(const Point& shift) const {
    check_point(shift);
    BasicSparseFunction out(dimension_);
    for (const auto& [x, v] : entries_) out.entries_.emplace(add_points(x, shift), v);
    return out;
  }

  BasicSparseFunction scaled(const V& factor) const {
    if (!(factor > 0)) throw Error(ErrorCode::invalid_argument, "scale factor must be positive");
    BasicSparseFunction out(dimension_);
    for (const auto& [x, v] : entries_) out.entries_.emplace(x, v * factor);
    return out;
  }

  friend bool operator==(const BasicSparseFunction& a, const BasicSparseFunction& b) {
    return a.dimension_ == b.dimension_ && a.entries_ == b.entries_;
  }

 private:
  void check_point(const Point& x) const {
    if (x.size() != dimension_)
      throw Error(ErrorCode::dimension_mismatch,
                  "point " + to_string(x) + " does not have dimension " + std::to_string(dimension_));
  }

  std::size_t dimension_;
  map_type entries_;
};

using SparseFunction = BasicSparseFunction<Rational>;
using RealFunction = BasicSparseFunction<double>;

/// Exact sum of f over its support; zero for the empty function.
Rational mass(const SparseFunction& f);
double mass(const RealFunction& f);

RealFunction to_real(const SparseFunction& f);

/// value * 1_points.
SparseFunction indicator(std::size_t dimension, const std::vector<Point>& points, const Rational& value = 1);

/// The piecewise-constant function t -> |{x : f(x) > t}| on [0, max f).
///
/// thresholds() are the distinct values t_1 < ... < t_k of f and counts()[i]
/// is the superlevel-set size on [t_{i-1}, t_i) with t_{-1} = 0.
class LevelDecomposition {
 public:
  LevelDecomposition(std::vector<Rational> thresholds, std::vector<std::size_t> counts);

  const std::vector<Rational>& thresholds() const noexcept { return thresholds_; }
  const std::vector<std::size_t>& counts() const noexcept { return counts_; }
  const Rational& max_value() const { return thresholds_.back(); }
  std::size_t levels() const noexcept { return thresholds_.size(); }

  /// |F_t|; zero for t >= max_value().
  std::size_t count_above(const Rational& t) const;

  /// Integral of |F_s| over [0, t]; t is clamped to [0, max_value()].
  Rational cumulative(const Rational& t) const;

  /// Inverse of cumulative() on [0, integral()]. cumulative is strictly
  /// increasing there, so the preimage is unique.
  Rational inverse_cumulative(const Rational& m) const;

  /// Integral of |F_t| over [0, max_value()]: the mass of f.
  const Rational& integral() const { return prefix_.back(); }

  /// Mass accumulated up to each threshold (prefix_[i] = cumulative(t_i)).
  const std::vector<Rational>& cumulative_at_thresholds() const noexcept { return prefix_; }

 private:
  std::vector<Rational> thresholds_;
  std::vector<std::size_t> counts_;
  std::vector<Rational> prefix_;
};

/// Throws empty_input for the empty function.
LevelDecomposition layer_cake(const SparseFunction& f);

struct Breakpoint {
  Rational t;
  Rational value;
  friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// Nondecreasing piecewise-linear bijection [0, a] -> [0, b] given by its
/// breakpoints, first (0,0) and last (a,b).
class TransportMap {
 public:
  explicit TransportMap(std::vector<Breakpoint> breakpoints);

  const std::vector<Breakpoint>& breakpoints() const noexcept { return breakpoints_; }
  const Rational& domain_end() const { return breakpoints_.back().t; }
  const Rational& range_end() const { return breakpoints_.back().value; }

  Rational operator()(const Rational& t) const;
  double operator()(double t) const;

  /// Slope of the linear piece containing t (right derivative; the last
  /// piece for t == domain_end()).
  Rational slope_at(const Rational& t) const;

  /// The same map read in the opposite direction, [0, b] -> [0, a].
  TransportMap inverse() const;

 private:
  std::size_t piece_index(const Rational& t) const;
  std::vector<Breakpoint> breakpoints_;
};

/// Monotone map T: [0, s_g] -> [0, s_f] with
///   integral_0^t |G_s| ds = integral_0^T(t) |F_s| ds   for every t,
/// equivalently T' = |G_t| / |F_T(t)|. Throws mass_mismatch unless both
/// decompositions carry the same mass.
///
/// This is the g-to-f orientation. The pushforward in the other direction
/// (f-scale to g-scale) is transport_map(decomp_f, decomp_g), which equals
/// transport_map(decomp_g, decomp_f).inverse().
TransportMap transport_map(const LevelDecomposition& decomp_g, const LevelDecomposition& decomp_f);

}  // namespace bbl
