#include "bbl/means.hpp"

#include <cmath>

namespace bbl {

MeanSpec::MeanSpec(Rational p, Rational lambda) : p_(std::move(p)), lambda_(std::move(lambda)) {
  p_.canonicalize();
  lambda_.canonicalize();
  if (sgn(lambda_) <= 0 || lambda_ >= 1)
    throw Error(ErrorCode::out_of_range, "mean weight lambda must lie in (0,1), got " + to_string(lambda_));
  p_value_ = to_double(p_);
  lambda_value_ = to_double(lambda_);
}

long double p_mean_raw(long double p, long double lambda, long double a, long double b) {
  if (a == 0 || b == 0) return 0;
  if (a == b) return a;
  const long double la = std::log(a);
  const long double lb = std::log(b);
  if (p == 0) return std::exp(lambda * la + (1 - lambda) * lb);

  const long double x = p * la;
  const long double y = p * lb;
  long double log_sum;
  if (std::fabs(x) < 0.5L && std::fabs(y) < 0.5L) {
    // Near p = 0 the sum is 1 + O(p); keep the small part separate.
    log_sum = std::log1p(lambda * std::expm1(x) + (1 - lambda) * std::expm1(y));
  } else {
    const long double u = std::log(lambda) + x;
    const long double v = std::log1p(-lambda) + y;
    const long double hi = std::max(u, v);
    log_sum = hi + std::log1p(std::exp(std::min(u, v) - hi));
  }
  return std::exp(log_sum / p);
}

double p_mean(const MeanSpec& spec, double a, double b) {
  return static_cast<double>(p_mean_raw(spec.p_value(), spec.lambda_value(), a, b));
}

std::optional<Rational> p_mean_exact(const MeanSpec& spec, const Rational& a, const Rational& b) {
  if (sgn(a) == 0 || sgn(b) == 0) return Rational(0);
  if (a == b) return a;
  const Rational& lambda = spec.lambda();
  const Rational& p = spec.p();

  if (sgn(p) == 0) {
    // a^l b^(1-l) with l = r/s is the s-th root of a^r b^(s-r).
    const Integer& r = lambda.get_num();
    const Integer& s = lambda.get_den();
    if (s > 64) return std::nullopt;
    const unsigned long rs = r.get_ui();
    const unsigned long ss = s.get_ui();
    return exact_root(pow_int(a, rs) * pow_int(b, ss - rs), ss);
  }

  if (p.get_den() != 1 || abs(p.get_num()) > 64) return std::nullopt;
  const long k = p.get_num().get_si();
  const unsigned long k_abs = static_cast<unsigned long>(k < 0 ? -k : k);
  Rational sum;
  if (k > 0) {
    sum = lambda * pow_int(a, k_abs) + (1 - lambda) * pow_int(b, k_abs);
  } else {
    Rational ia = 1 / a;
    Rational ib = 1 / b;
    sum = lambda * pow_int(ia, k_abs) + (1 - lambda) * pow_int(ib, k_abs);
  }
  auto root = exact_root(sum, k_abs);
  if (!root) return std::nullopt;
  if (k < 0) return Rational(1 / *root);
  return root;
}

double p_mean(const MeanSpec& spec, const Rational& a, const Rational& b) {
  if (auto exact = p_mean_exact(spec, a, b)) return to_double(*exact);
  return p_mean(spec, to_double(a), to_double(b));
}

DerivativeBound mean_curve_derivative_bound(const MeanSpec& spec, double t, double T_t, double T_prime) {
  if (!(t > 0) || !(T_t > 0) || !(T_prime > 0))
    throw Error(ErrorCode::invalid_argument, "derivative bound needs positive t, T(t) and T'(t)");
  if (sgn(spec.p()) <= 0)
    throw Error(ErrorCode::out_of_range, "derivative bound needs p > 0");

  const long double p = spec.p_value();
  const long double lambda = spec.lambda_value();
  const long double tt = t;
  const long double T = T_t;
  const long double dT = T_prime;

  // M = S^(-1/p) with S = l t^-p + (1-l) T^-p, hence
  // dM/dt = S^(-1/p - 1) (l t^(-p-1) + (1-l) T^(-p-1) T').
  const long double S = lambda * std::pow(tt, -p) + (1 - lambda) * std::pow(T, -p);
  const long double inner = lambda * std::pow(tt, -p - 1) + (1 - lambda) * std::pow(T, -p - 1) * dT;
  const long double lhs = std::pow(S, -1 / p - 1) * inner;
  const long double rhs = 1 / p_mean_raw(p, lambda, 1, 1 / dT);
  return {static_cast<double>(lhs), static_cast<double>(rhs)};
}

}  // namespace bbl
