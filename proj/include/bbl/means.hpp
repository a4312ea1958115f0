#pragma once

// Weighted two-argument power means M_{p,lambda}(a, b).
//
//   M_{p,l}(a,b) = (l a^p + (1-l) b^p)^(1/p)   p != 0, ab != 0
//                = a^l b^(1-l)                p == 0, ab != 0
//                = 0                          ab == 0 (every p)
//
// Floating evaluation is carried out in long double and returned as double;
// the relative error contract is 1e-12. Exact evaluation is available where
// the result is guaranteed rational (integer exponents and the geometric
// mean when the root happens to be exact).

#include <optional>

#include "bbl/rational.hpp"

namespace bbl {

class MeanSpec {
 public:
  /// Throws out_of_range unless 0 < lambda < 1.
  MeanSpec(Rational p, Rational lambda = Rational(1, 2));

  const Rational& p() const noexcept { return p_; }
  const Rational& lambda() const noexcept { return lambda_; }
  double p_value() const noexcept { return p_value_; }
  double lambda_value() const noexcept { return lambda_value_; }

  /// The mean with exponent -p. The sup-convolution constraint of the
  /// functional inequalities uses M_{-p,lambda} for a positive p.
  MeanSpec negated() const { return MeanSpec(-p_, lambda_); }

  bool is_geometric() const { return sgn(p_) == 0; }

  friend bool operator==(const MeanSpec& a, const MeanSpec& b) {
    return a.p_ == b.p_ && a.lambda_ == b.lambda_;
  }

 private:
  Rational p_;
  Rational lambda_;
  double p_value_;
  double lambda_value_;
};

/// Floating evaluation, total on the nonnegative quadrant.
double p_mean(const MeanSpec& spec, double a, double b);

/// Same mean with raw floating exponent and weight; used where the exponent
/// is not a rational parameter (random campaigns, derivative checks).
long double p_mean_raw(long double p, long double lambda, long double a, long double b);

/// Exact evaluation. Returns nullopt when the value is not known to be
/// rational: that is, unless p is an integer (|p| <= 64) or p == 0, and the
/// final root is exact.
std::optional<Rational> p_mean_exact(const MeanSpec& spec, const Rational& a, const Rational& b);

/// Exact when possible, floating otherwise.
double p_mean(const MeanSpec& spec, const Rational& a, const Rational& b);

struct DerivativeBound {
  double lhs;  ///< d/dt M_{-p,lambda}(t, T(t)) with T'(t) = T_prime
  double rhs;  ///< 1 / M_{p,lambda}(1, 1/T_prime)
};

/// Both sides of the derivative bound for the curve t -> M_{-p,lambda}(t, T(t)).
/// spec.p() is the positive exponent p; all other inputs must be positive.
DerivativeBound mean_curve_derivative_bound(const MeanSpec& spec, double t, double T_t, double T_prime);

}  // namespace bbl
