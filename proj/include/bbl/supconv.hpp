#pragma once

// Discrete sup-convolution under the mean constraint
//     h(x + y) >= M_{-p,lambda}(f(x), g(y))   for all x, y in Z^d
// and the checks built on it.
//
// Throughout, MeanSpec carries the positive exponent p of the constraint;
// the mean actually applied is M_{-p,lambda}. p = 0 gives the geometric
// mean (the Prekopa-Leindler constraint h(x+y) >= f(x)^l g(y)^(1-l)).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bbl/functions.hpp"
#include "bbl/geometry.hpp"
#include "bbl/means.hpp"

namespace bbl {

/// Absolute tolerance for floating comparisons, applied after normalising
/// masses to 1.
inline constexpr double kTolerance = 1e-9;

/// The pointwise smallest admissible h: h*(z) = max_{x+y=z} M_{-p,l}(f(x), g(y)).
RealFunction min_admissible_h(const SparseFunction& f, const SparseFunction& g, const MeanSpec& spec);

/// Exact h* when every mean involved is rational (integer p, or a geometric
/// mean with exact roots); nullopt otherwise.
std::optional<SparseFunction> min_admissible_h_exact(const SparseFunction& f, const SparseFunction& g,
                                                     const MeanSpec& spec);

/// Whether h satisfies the constraint for every pair in supp f x supp g, to
/// relative tolerance `rel_tol`.
bool is_admissible(const RealFunction& h, const SparseFunction& f, const SparseFunction& g, const MeanSpec& spec,
                   double rel_tol = 1e-12);

struct FunctionalBmCheck {
  double sum_h_star;
  double mean_of_masses;  ///< M_{-p,l}(sum f, sum g)
  bool exact = false;     ///< both sides were computed in rationals
};

/// sum h* >= M_{-p,l}(sum f, sum g) for every f, g; returns both sides.
FunctionalBmCheck check_functional_bm(const SparseFunction& f, const SparseFunction& g, const MeanSpec& spec);

struct BetaConvexCheck {
  double lhs;  ///< sum_i M_{-p,1/2}(c, beta_i)
  double rhs;  ///< alpha M_{-p,1/2}(c n / (1 - alpha), 1)
};

/// Convexity bound over a nonincreasing probability sequence beta whose first
/// n terms carry at most 1 - alpha. Precondition violations throw not_sorted,
/// wrong_sum or mass_cap_violated.
BetaConvexCheck beta_convex_check(const std::vector<Rational>& betas, double c, std::size_t n,
                                  const Rational& alpha, double p);

enum class Verdict { pass, fail, hypothesis_not_met };

std::string to_string(Verdict v);

struct VerificationReport {
  Rational sum_f;
  Rational sum_g;
  double sum_h = 0;  ///< mass of the minimal admissible h
  double bound = 0;  ///< (2^d - epsilon) sum f
  double margin = 0; ///< sum_h - bound
  double epsilon = 0;
  NonDegeneracyResult nondegeneracy;
  Verdict verdict = Verdict::fail;
};

/// Runs the coverage check on f and, when it holds, tests
///     sum h* >= (2^d - epsilon) sum f.
/// The verdict is hypothesis_not_met when the coverage check fails; pass
/// iff margin / sum f >= -kTolerance otherwise. Requires sum f == sum g
/// exactly and 0 < p < 1/d.
VerificationReport verify_main_theorem(const SparseFunction& f, const SparseFunction& g, const MeanSpec& spec,
                                       double epsilon, std::size_t n, std::int64_t direction_bound);

}  // namespace bbl
