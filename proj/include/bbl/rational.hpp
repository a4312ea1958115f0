#pragma once

// Exact rationals and lattice points shared by every module.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace bbl {

using Rational = mpq_class;
using Integer = mpz_class;

/// A point of Z^d. The dimension is the vector length.
using Point = std::vector<std::int64_t>;

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  empty_input,
  mass_mismatch,
  out_of_range,
  not_sorted,
  wrong_sum,
  mass_cap_violated,
  universe_violation,
  parse_error,
};

/// The single exception type thrown by the library. The code lets callers
/// (and tests) tell precondition failures apart without matching on text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parses "3", "-7/4", "0.25", "1e-3" or "2.5E+2" into an exact rational.
/// Decimal forms are read digit-for-digit, so "0.1" is exactly 1/10.
Rational parse_rational(std::string_view text);

/// num/den in lowest terms. Throws invalid_argument for den == 0.
Rational fraction(std::int64_t num, std::int64_t den);

/// Shortest decimal rendering of a double, re-read exactly. Use when a value
/// came in as a JSON number and the author meant the decimal they typed.
Rational rational_from_double(double value);

std::string to_string(const Rational& q);

double to_double(const Rational& q);

Rational pow_int(const Rational& base, unsigned long exponent);

/// Exact k-th root of a nonnegative rational if it is itself rational.
std::optional<Rational> exact_root(const Rational& q, unsigned long k);

/// 2^e for an integer e, exact.
Rational pow2(long e);

Point add_points(const Point& a, const Point& b);

std::string to_string(const Point& p);

}  // namespace bbl
