#include "bbl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace bbl {

namespace {

std::int64_t dot(const Point& u, const Point& x) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * x[i];
  return s;
}

bool is_primitive(const Point& u) {
  std::int64_t g = 0;
  for (auto c : u) g = std::gcd(g, c < 0 ? -c : c);
  return g == 1;
}

Point canonical_sign(Point u) {
  for (auto c : u) {
    if (c == 0) continue;
    if (c < 0)
      for (auto& v : u) v = -v;
    break;
  }
  return u;
}

}  // namespace

PointSet::PointSet(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw Error(ErrorCode::invalid_argument, "dimension must be positive");
}

PointSet::PointSet(std::size_t dimension, const std::vector<Point>& points) : PointSet(dimension) {
  for (const auto& x : points) insert(x);
}

void PointSet::insert(const Point& x) {
  if (x.size() != dimension_)
    throw Error(ErrorCode::dimension_mismatch,
                "point " + to_string(x) + " does not have dimension " + std::to_string(dimension_));
  points_.insert(x);
}

PointSet support(const SparseFunction& f) {
  PointSet s(f.dimension());
  for (const auto& [x, v] : f.entries()) s.insert(x);
  return s;
}

PointSet box(std::size_t dimension, std::int64_t side) {
  if (side <= 0) throw Error(ErrorCode::invalid_argument, "box side must be positive");
  PointSet out(dimension);
  Point x(dimension, 0);
  while (true) {
    out.insert(x);
    std::size_t i = 0;
    while (i < dimension && ++x[i] == side) x[i++] = 0;
    if (i == dimension) break;
  }
  return out;
}

PointSet sumset(const PointSet& a, const PointSet& b) {
  if (a.dimension() != b.dimension())
    throw Error(ErrorCode::dimension_mismatch, "sumset of sets of different dimension");
  PointSet out(a.dimension());
  for (const auto& x : a.points())
    for (const auto& y : b.points()) out.insert(add_points(x, y));
  return out;
}

double bm_deficit(const PointSet& a, const PointSet& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::empty_input, "deficit of an empty set");
  const double inv_d = 1.0 / static_cast<double>(a.dimension());
  const auto root = [inv_d](std::size_t n) { return std::pow(static_cast<double>(n), inv_d); };
  return root(sumset(a, b).size()) - root(a.size()) - root(b.size());
}

HyperplaneFamily::HyperplaneFamily(const SparseFunction& f, Point normal) : normal_(std::move(normal)) {
  if (normal_.size() != f.dimension())
    throw Error(ErrorCode::dimension_mismatch, "normal and function differ in dimension");
  if (std::all_of(normal_.begin(), normal_.end(), [](auto c) { return c == 0; }))
    throw Error(ErrorCode::invalid_argument, "hyperplane normal must be nonzero");
  if (!is_primitive(normal_))
    throw Error(ErrorCode::invalid_argument, "hyperplane normal " + to_string(normal_) + " is not primitive");
  normal_ = canonical_sign(std::move(normal_));

  std::map<std::int64_t, Rational> by_offset;
  for (const auto& [x, v] : f.entries()) by_offset[dot(normal_, x)] += v;
  levels_.reserve(by_offset.size());
  for (auto& [offset, m] : by_offset) {
    total_ += m;
    levels_.push_back({offset, std::move(m)});
  }
  // by_offset is ascending, so a stable sort keeps ties in offset order.
  std::stable_sort(levels_.begin(), levels_.end(), [](const Level& a, const Level& b) { return a.mass > b.mass; });
}

Rational HyperplaneFamily::top_mass(std::size_t n) const {
  Rational s = 0;
  for (std::size_t i = 0; i < std::min(n, levels_.size()); ++i) s += levels_[i].mass;
  return s;
}

std::vector<Point> primitive_directions(std::size_t dimension, std::int64_t bound) {
  if (dimension == 0) throw Error(ErrorCode::invalid_argument, "dimension must be positive");
  if (bound <= 0) throw Error(ErrorCode::invalid_argument, "direction bound must be positive");
  std::vector<Point> out;
  Point u(dimension, -bound);
  while (true) {
    const bool nonzero = std::any_of(u.begin(), u.end(), [](auto c) { return c != 0; });
    if (nonzero && canonical_sign(u) == u && is_primitive(u)) out.push_back(u);
    std::size_t i = dimension;
    while (i > 0 && u[i - 1] == bound) u[--i] = -bound;
    if (i == 0) break;
    ++u[i - 1];
  }
  return out;
}

Rational top_n_hyperplane_mass(const SparseFunction& f, const Point& normal, std::size_t n) {
  if (f.empty()) throw Error(ErrorCode::empty_input, "hyperplane mass of an empty function");
  HyperplaneFamily family(f, normal);
  return family.top_mass(n) / family.total_mass();
}

bool CoverageThreshold::admits(const Rational& fraction) const {
  if (exact) return fraction <= *exact;
  return to_double(fraction) <= value;
}

CoverageThreshold nondegeneracy_threshold(std::size_t dimension, const Rational& p) {
  const Rational inv_p = 1 / p;
  CoverageThreshold t;
  t.value = 1.0 - std::pow(2.0, static_cast<double>(dimension) - to_double(inv_p));
  if (inv_p.get_den() == 1 && abs(inv_p.get_num()) < 4096) {
    t.exact = 1 - pow2(static_cast<long>(dimension) - inv_p.get_num().get_si());
  }
  return t;
}

NonDegeneracyResult non_degenerate(const SparseFunction& f, const Rational& p, std::size_t n,
                                   std::int64_t direction_bound) {
  if (sgn(p) <= 0 || p * static_cast<unsigned long>(f.dimension()) >= 1)
    throw Error(ErrorCode::out_of_range, "non-degeneracy needs 0 < p < 1/d, got p = " + to_string(p));
  if (n == 0) throw Error(ErrorCode::invalid_argument, "hyperplane count n must be positive");
  if (f.empty()) throw Error(ErrorCode::empty_input, "non-degeneracy of an empty function");

  NonDegeneracyResult result;
  result.threshold = nondegeneracy_threshold(f.dimension(), p);
  result.n = n;
  result.direction_bound = direction_bound;
  const Rational total = f.mass();
  bool first = true;
  for (const auto& u : primitive_directions(f.dimension(), direction_bound)) {
    ++result.directions_checked;
    Rational fraction = HyperplaneFamily(f, u).top_mass(n) / total;
    if (first || fraction > result.worst.fraction) {
      result.worst = {u, std::move(fraction)};
      first = false;
    }
  }
  result.ok = result.threshold.admits(result.worst.fraction);
  if (!result.ok) result.witness = result.worst;
  return result;
}

bool covered_by_parallel_hyperplanes(const PointSet& set, std::size_t m, std::int64_t direction_bound) {
  if (set.size() <= m) return true;
  for (const auto& u : primitive_directions(set.dimension(), direction_bound)) {
    std::set<std::int64_t> offsets;
    for (const auto& x : set.points()) {
      offsets.insert(dot(u, x));
      if (offsets.size() > m) break;
    }
    if (offsets.size() <= m) return true;
  }
  return false;
}

Rational hyperplane_threshold(const SparseFunction& g, std::size_t m, std::int64_t direction_bound) {
  if (g.empty()) return 0;
  const LevelDecomposition decomp = layer_cake(g);
  // {g > t} is constant on [t_{i-1}, t_i) and equals {g >= t_i}; superlevel
  // sets shrink as t grows, so scan from the top threshold downwards.
  const auto& thresholds = decomp.thresholds();
  for (std::size_t k = thresholds.size(); k-- > 0;) {
    PointSet level(g.dimension());
    for (const auto& [x, v] : g.entries())
      if (v >= thresholds[k]) level.insert(x);
    if (!covered_by_parallel_hyperplanes(level, m, direction_bound)) return thresholds[k];
  }
  return 0;
}

ExtremalInstance extremal_instance(const Rational& gamma, std::int64_t side, const Rational& p, std::size_t dimension) {
  if (sgn(gamma) <= 0 || gamma >= 1) throw Error(ErrorCode::out_of_range, "gamma must lie in (0,1)");
  if (side <= 0) throw Error(ErrorCode::out_of_range, "N must be positive");
  if (sgn(p) <= 0) throw Error(ErrorCode::out_of_range, "p must be positive");
  if (dimension == 0) throw Error(ErrorCode::out_of_range, "dimension must be positive");
  const double cells = std::pow(static_cast<double>(side), static_cast<double>(dimension));
  if (cells > 4.0e6) throw Error(ErrorCode::out_of_range, "box [N]^d too large for enumeration");

  Integer volume;
  mpz_ui_pow_ui(volume.get_mpz_t(), static_cast<unsigned long>(side), dimension);
  const Rational diffuse = gamma / Rational(volume);
  const Point origin(dimension, 0);

  ExtremalInstance out{SparseFunction(dimension), SparseFunction(dimension), RealFunction(dimension), 0.0};
  out.g.set(origin, 1);
  const double scale = std::pow(2.0, to_double(Rational(1 / p)));
  const double h_diffuse = scale * to_double(diffuse);
  const PointSet cube = box(dimension, side);
  for (const auto& x : cube.points()) {
    out.f.set(x, diffuse);
    out.h.set(x, h_diffuse);
  }
  out.f.set(origin, 1 - gamma + diffuse);
  out.h.set(origin, 1.0 + h_diffuse);
  out.predicted_h_mass = 1.0 + scale * to_double(gamma);
  return out;
}

}  // namespace bbl
