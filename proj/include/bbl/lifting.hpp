#pragma once

// Generic passage from a set inequality
//     |S(A,B)| >= C * M_{p,lambda}(|A|, |B|)
// for a set-valued binary operation S on lattice points (counting measure)
// to the functional inequality
//     h(z) >= M_{-p,lambda}(f(x), g(y)) whenever z in S(x,y),
//     sum f == sum g   ==>   sum h >= C * sum f.
//
// Registered operations:
//   "zd-add"        S(x,y) = {x + y} on Z^d, d <= 3.
//   "cube-midpoint" Hamming midpoints on {0,1}^d, d <= 4; p = 0.
//   "grid-scaled"   S(x,y) = {round(l x + (1-l) y)} coordinatewise, rounding
//                   to nearest with ties to even; p = 0.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bbl/functions.hpp"
#include "bbl/geometry.hpp"
#include "bbl/means.hpp"

namespace bbl {

class LiftingDomain {
 public:
  using Operation = std::function<std::vector<Point>(const Point&, const Point&)>;
  using Universe = std::function<bool(const Point&)>;

  /// `mean` is the exponent p >= 0 and weight of the claimed set inequality
  /// and `constant` its multiplier C.
  LiftingDomain(std::string name, std::size_t dimension, Operation op, Universe universe, MeanSpec mean,
                double constant, std::string convention);

  const std::string& name() const noexcept { return name_; }
  std::size_t dimension() const noexcept { return dimension_; }
  const MeanSpec& mean() const noexcept { return mean_; }
  double constant() const noexcept { return constant_; }
  /// Free-text description of any convention the operation relies on.
  const std::string& convention() const noexcept { return convention_; }

  bool contains(const Point& x) const;
  /// S(x, y). Throws universe_violation if either point lies outside the domain.
  std::vector<Point> apply(const Point& x, const Point& y) const;

 private:
  std::string name_;
  std::size_t dimension_;
  Operation op_;
  Universe universe_;
  MeanSpec mean_;
  double constant_;
  std::string convention_;
};

/// x + y on Z^d with C = 1; p defaults to 1/d. (|A+B| >= max(|A|,|B|) makes
/// the claim hold for every p.)
LiftingDomain integer_addition_domain(std::size_t dimension, std::optional<Rational> p = std::nullopt,
                                      Rational lambda = Rational(1, 2));

/// Hamming-cube midpoints: m is a midpoint of x, y when
/// d(x,m) + d(m,y) = d(x,y) and |d(x,m) - d(x,y)/2| <= 1/2. p = 0, C = 1.
LiftingDomain cube_midpoint_domain(std::size_t dimension);

/// round(l x + (1-l) y), p = 0, C = ((floor(1/l)+1)^l (floor(1/(1-l))+1)^(1-l))^(-d):
/// for fixed y at most floor(1/l)+1 integers per coordinate round to the
/// same value, and symmetrically in x.
LiftingDomain scaled_grid_domain(std::size_t dimension, Rational lambda = Rational(1, 2));

/// Looks a domain up by name; throws invalid_argument for unknown names or
/// unsupported dimensions.
LiftingDomain make_domain(std::string_view name, std::size_t dimension);

std::vector<std::string> registered_domains();

/// S(A, B) = union of S(a, b).
PointSet set_image(const LiftingDomain& domain, const PointSet& a, const PointSet& b);

struct SetBmCheck {
  double lhs;  ///< |S(A,B)|
  double rhs;  ///< C * M_{p,l}(|A|, |B|)
};

SetBmCheck check_set_bm(const LiftingDomain& domain, const PointSet& a, const PointSet& b);

/// h*(z) = max over (x,y) with z in S(x,y) of M_{-p,l}(f(x), g(y)); for p = 0
/// the geometric mean.
RealFunction lifted_min_admissible_h(const LiftingDomain& domain, const SparseFunction& f, const SparseFunction& g);

struct LiftCheck {
  double sum_h_star;
  double sum_f;
  double constant;  ///< the claimed bound is sum_h_star >= constant * sum_f
};

/// Requires sum f == sum g exactly.
LiftCheck lift_check(const LiftingDomain& domain, const SparseFunction& f, const SparseFunction& g);

struct Recovery {
  double sum_h_star;   ///< computed from f = 1_A/|A|, g = 1_B/|B|
  double closed_form;  ///< |S(A,B)| * M_{-p,l}(1/|A|, 1/|B|)
};

/// The set inequality read back from the functional one: sum_h_star >= C is
/// exactly |S(A,B)| >= C M_{p,l}(|A|,|B|).
Recovery recover_bm(const LiftingDomain& domain, const PointSet& a, const PointSet& b);

// --- Hamming cube fast paths (sets as bitmasks over {0,1}^d, d <= 5) ---

using CubeMask = std::uint32_t;

/// Bit i of the result is set when vertex i (bit j of i = coordinate j) is a
/// midpoint of vertices x and y.
CubeMask cube_midpoint_mask(std::size_t dimension, std::uint32_t x, std::uint32_t y);

/// Midpoint set of two vertex sets given as masks.
CubeMask cube_midpoint_set(std::size_t dimension, CubeMask a, CubeMask b);

struct CubeBmSummary {
  std::size_t dimension = 0;
  std::uint64_t pairs_checked = 0;  ///< pairs actually evaluated
  std::uint64_t pairs_covered = 0;  ///< pairs accounted for, including symmetric images
  std::uint64_t violations = 0;     ///< pairs with |M|^2 < |A||B|
  double worst_ratio = 0;           ///< min |M| / sqrt(|A||B|)
  CubeMask worst_a = 0;
  CubeMask worst_b = 0;
};

/// |M(A,B)| >= sqrt(|A||B|) over all nonempty A, B in {0,1}^d. A ranges over
/// one representative per orbit of the cube's isometry group (which preserves
/// midpoints), B over all subsets. Integer comparison |M|^2 >= |A||B|.
CubeBmSummary cube_bm_exhaustive(std::size_t dimension);

}  // namespace bbl
