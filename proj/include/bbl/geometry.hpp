#pragma once

// Lattice point sets, sumsets, hyperplane fibrations of a support and the
// non-degeneracy condition of the discrete functional inequality.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "bbl/functions.hpp"
#include "bbl/rational.hpp"

namespace bbl {

class PointSet {
 public:
  explicit PointSet(std::size_t dimension);
  PointSet(std::size_t dimension, const std::vector<Point>& points);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const std::set<Point>& points() const noexcept { return points_; }

  void insert(const Point& x);
  bool contains(const Point& x) const { return points_.count(x) != 0; }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t dimension_;
  std::set<Point> points_;
};

PointSet support(const SparseFunction& f);

/// {0, ..., k-1}^d.
PointSet box(std::size_t dimension, std::int64_t side);

/// Minkowski sum A + B.
PointSet sumset(const PointSet& a, const PointSet& b);

/// |A+B|^{1/d} - |A|^{1/d} - |B|^{1/d}.
double bm_deficit(const PointSet& a, const PointSet& b);

/// Fibers of x -> <u, x> over the support of a function, heaviest first.
class HyperplaneFamily {
 public:
  struct Level {
    std::int64_t offset;  ///< the value <u, x> shared by the fiber
    Rational mass;
  };

  /// The normal is brought to canonical sign (first nonzero entry positive).
  /// Throws invalid_argument for a zero or non-primitive normal.
  HyperplaneFamily(const SparseFunction& f, Point normal);

  const Point& normal() const noexcept { return normal_; }
  /// Sorted by mass descending, ties by offset ascending.
  const std::vector<Level>& levels() const noexcept { return levels_; }
  const Rational& total_mass() const noexcept { return total_; }

  /// Mass on the n heaviest fibers.
  Rational top_mass(std::size_t n) const;

 private:
  Point normal_;
  std::vector<Level> levels_;
  Rational total_;
};

/// Primitive integer vectors with every |u_i| <= bound and first nonzero
/// entry positive, in lexicographic order.
std::vector<Point> primitive_directions(std::size_t dimension, std::int64_t bound);

/// Fraction of the mass of f carried by the n heaviest hyperplanes normal to u.
Rational top_n_hyperplane_mass(const SparseFunction& f, const Point& normal, std::size_t n);

/// 1 - 2^{d - 1/p}, exact when 1/p is an integer.
struct CoverageThreshold {
  double value;
  std::optional<Rational> exact;

  bool admits(const Rational& fraction) const;
};

CoverageThreshold nondegeneracy_threshold(std::size_t dimension, const Rational& p);

struct DirectionWitness {
  Point normal;
  Rational fraction;
};

struct NonDegeneracyResult {
  bool ok = false;
  std::optional<DirectionWitness> witness;  ///< set when !ok
  DirectionWitness worst;                   ///< heaviest direction found, always set
  CoverageThreshold threshold;
  std::size_t n = 0;
  std::int64_t direction_bound = 0;
  std::size_t directions_checked = 0;
};

/// Checks that no n parallel hyperplanes with a primitive normal of
/// coefficients at most direction_bound carry more than 1 - 2^{d-1/p} of the
/// mass of f. Requires 0 < p < 1/d and f nonempty.
NonDegeneracyResult non_degenerate(const SparseFunction& f, const Rational& p, std::size_t n,
                                   std::int64_t direction_bound);

/// Whether some family of at most m parallel hyperplanes (normal within the
/// coefficient bound) covers the set.
bool covered_by_parallel_hyperplanes(const PointSet& set, std::size_t m, std::int64_t direction_bound);

/// sup{t > 0 : {g > t} is not covered by m parallel hyperplanes}, or 0 when
/// every superlevel set is covered. Coverage is tested for normals within
/// the coefficient bound only.
Rational hyperplane_threshold(const SparseFunction& g, std::size_t m, std::int64_t direction_bound);

/// The atom-plus-box triple showing the coverage condition cannot be dropped:
///   g = 1_o,  f = (1-gamma) 1_o + gamma/N^d 1_[N]^d,
///   h = 1_o + 2^{1/p} gamma/N^d 1_[N]^d.
/// h is admissible for M_{-p,1/2} and has mass 1 + 2^{1/p} gamma.
struct ExtremalInstance {
  SparseFunction f;
  SparseFunction g;
  RealFunction h;
  double predicted_h_mass;  ///< 1 + 2^{1/p} gamma
};

ExtremalInstance extremal_instance(const Rational& gamma, std::int64_t side, const Rational& p, std::size_t dimension);

}  // namespace bbl
