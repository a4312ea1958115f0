#include "bbl/functions.hpp"

#include <algorithm>
#include <cmath>

namespace bbl {

Rational mass(const SparseFunction& f) { return f.mass(); }

double mass(const RealFunction& f) { return f.mass(); }

RealFunction to_real(const SparseFunction& f) {
  RealFunction out(f.dimension());
  for (const auto& [x, v] : f.entries()) out.set(x, to_double(v));
  return out;
}

SparseFunction indicator(std::size_t dimension, const std::vector<Point>& points, const Rational& value) {
  SparseFunction f(dimension);
  for (const auto& x : points) f.set(x, value);
  return f;
}

LevelDecomposition::LevelDecomposition(std::vector<Rational> thresholds, std::vector<std::size_t> counts)
    : thresholds_(std::move(thresholds)), counts_(std::move(counts)) {
  if (thresholds_.empty()) throw Error(ErrorCode::empty_input, "empty function has no decomposition");
  if (thresholds_.size() != counts_.size())
    throw Error(ErrorCode::invalid_argument, "thresholds and counts differ in length");
  prefix_.reserve(thresholds_.size());
  Rational previous = 0;
  Rational acc = 0;
  for (std::size_t i = 0; i < thresholds_.size(); ++i) {
    if (thresholds_[i] <= previous)
      throw Error(ErrorCode::invalid_argument, "thresholds must be positive and strictly increasing");
    if (counts_[i] == 0 || (i > 0 && counts_[i] > counts_[i - 1]))
      throw Error(ErrorCode::invalid_argument, "level counts must be positive and nonincreasing");
    acc += (thresholds_[i] - previous) * static_cast<unsigned long>(counts_[i]);
    prefix_.push_back(acc);
    previous = thresholds_[i];
  }
}

std::size_t LevelDecomposition::count_above(const Rational& t) const {
  if (sgn(t) < 0) return counts_.front();
  auto it = std::upper_bound(thresholds_.begin(), thresholds_.end(), t);
  if (it == thresholds_.end()) return 0;
  return counts_[static_cast<std::size_t>(it - thresholds_.begin())];
}

Rational LevelDecomposition::cumulative(const Rational& t) const {
  if (sgn(t) <= 0) return 0;
  if (t >= max_value()) return integral();
  const auto i = static_cast<std::size_t>(std::upper_bound(thresholds_.begin(), thresholds_.end(), t) -
                                          thresholds_.begin());
  const Rational start = i == 0 ? Rational(0) : thresholds_[i - 1];
  const Rational before = i == 0 ? Rational(0) : prefix_[i - 1];
  return before + (t - start) * static_cast<unsigned long>(counts_[i]);
}

Rational LevelDecomposition::inverse_cumulative(const Rational& m) const {
  if (sgn(m) < 0 || m > integral())
    throw Error(ErrorCode::out_of_range, "mass " + to_string(m) + " outside [0, " + to_string(integral()) + "]");
  if (sgn(m) == 0) return 0;
  const auto i = static_cast<std::size_t>(std::lower_bound(prefix_.begin(), prefix_.end(), m) - prefix_.begin());
  const Rational start = i == 0 ? Rational(0) : thresholds_[i - 1];
  const Rational before = i == 0 ? Rational(0) : prefix_[i - 1];
  return start + (m - before) / static_cast<unsigned long>(counts_[i]);
}

LevelDecomposition layer_cake(const SparseFunction& f) {
  if (f.empty()) throw Error(ErrorCode::empty_input, "empty function has no decomposition");
  std::vector<Rational> values;
  values.reserve(f.support_size());
  for (const auto& [x, v] : f.entries()) values.push_back(v);
  std::sort(values.begin(), values.end());

  // After sorting, |{x : f(x) > t}| on [t_{i-1}, t_i) is the number of values >= t_i.
  std::vector<Rational> thresholds;
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!thresholds.empty() && thresholds.back() == values[i]) continue;
    thresholds.push_back(values[i]);
    counts.push_back(values.size() - i);
  }
  return LevelDecomposition(std::move(thresholds), std::move(counts));
}

TransportMap::TransportMap(std::vector<Breakpoint> breakpoints) : breakpoints_(std::move(breakpoints)) {
  if (breakpoints_.size() < 2) throw Error(ErrorCode::invalid_argument, "transport map needs two breakpoints");
  if (sgn(breakpoints_.front().t) != 0 || sgn(breakpoints_.front().value) != 0)
    throw Error(ErrorCode::invalid_argument, "transport map must start at the origin");
  for (std::size_t i = 1; i < breakpoints_.size(); ++i)
    if (breakpoints_[i].t <= breakpoints_[i - 1].t || breakpoints_[i].value <= breakpoints_[i - 1].value)
      throw Error(ErrorCode::invalid_argument, "transport map breakpoints must be strictly increasing");
}

std::size_t TransportMap::piece_index(const Rational& t) const {
  if (sgn(t) < 0 || t > domain_end())
    throw Error(ErrorCode::out_of_range, "t = " + to_string(t) + " outside the transport domain");
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t,
                             [](const Rational& v, const Breakpoint& b) { return v < b.t; });
  auto i = static_cast<std::size_t>(it - breakpoints_.begin());
  return std::min(i, breakpoints_.size() - 1) - 1;
}

Rational TransportMap::operator()(const Rational& t) const {
  const std::size_t i = piece_index(t);
  const Breakpoint& a = breakpoints_[i];
  const Breakpoint& b = breakpoints_[i + 1];
  return a.value + (t - a.t) * (b.value - a.value) / (b.t - a.t);
}

double TransportMap::operator()(double t) const {
  const double end = to_double(domain_end());
  if (!(t >= 0) || t > end) throw Error(ErrorCode::out_of_range, "t outside the transport domain");
  std::size_t i = 0;
  while (i + 2 < breakpoints_.size() && to_double(breakpoints_[i + 1].t) <= t) ++i;
  const double t0 = to_double(breakpoints_[i].t);
  const double t1 = to_double(breakpoints_[i + 1].t);
  const double v0 = to_double(breakpoints_[i].value);
  const double v1 = to_double(breakpoints_[i + 1].value);
  return v0 + (t - t0) * (v1 - v0) / (t1 - t0);
}

Rational TransportMap::slope_at(const Rational& t) const {
  const std::size_t i = piece_index(t);
  return (breakpoints_[i + 1].value - breakpoints_[i].value) / (breakpoints_[i + 1].t - breakpoints_[i].t);
}

TransportMap TransportMap::inverse() const {
  std::vector<Breakpoint> swapped;
  swapped.reserve(breakpoints_.size());
  for (const auto& b : breakpoints_) swapped.push_back({b.value, b.t});
  return TransportMap(std::move(swapped));
}

TransportMap transport_map(const LevelDecomposition& decomp_g, const LevelDecomposition& decomp_f) {
  if (decomp_g.integral() != decomp_f.integral())
    throw Error(ErrorCode::mass_mismatch, "transport requires equal masses");

  // Both cumulative masses are piecewise linear and strictly increasing, so
  // T = Phi_f^{-1} o Phi_g is linear between consecutive level changes of
  // either side. Merge the masses at which either layer cake changes level.
  std::vector<Rational> masses;
  masses.reserve(decomp_g.levels() + decomp_f.levels());
  std::merge(decomp_g.cumulative_at_thresholds().begin(), decomp_g.cumulative_at_thresholds().end(),
             decomp_f.cumulative_at_thresholds().begin(), decomp_f.cumulative_at_thresholds().end(),
             std::back_inserter(masses));
  masses.erase(std::unique(masses.begin(), masses.end()), masses.end());

  std::vector<Breakpoint> breakpoints;
  breakpoints.reserve(masses.size() + 1);
  breakpoints.push_back({0, 0});
  for (const auto& m : masses) breakpoints.push_back({decomp_g.inverse_cumulative(m), decomp_f.inverse_cumulative(m)});
  return TransportMap(std::move(breakpoints));
}

}  // namespace bbl
