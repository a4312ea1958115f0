#include "bbl/supconv.hpp"

#include <cmath>
#include <map>
#include <utility>

namespace bbl {

namespace {

void check_pair(const SparseFunction& f, const SparseFunction& g) {
  if (f.dimension() != g.dimension())
    throw Error(ErrorCode::dimension_mismatch, "f and g live in different dimensions");
  if (f.empty() || g.empty()) throw Error(ErrorCode::empty_input, "sup-convolution of an empty function");
}

std::vector<std::pair<const Point*, double>> as_doubles(const SparseFunction& f) {
  std::vector<std::pair<const Point*, double>> out;
  out.reserve(f.support_size());
  for (const auto& [x, v] : f.entries()) out.emplace_back(&x, to_double(v));
  return out;
}

}  // namespace

RealFunction min_admissible_h(const SparseFunction& f, const SparseFunction& g, const MeanSpec& spec) {
  check_pair(f, g);
  const MeanSpec constraint = spec.negated();
  const long double p = constraint.p_value();
  const long double lambda = constraint.lambda_value();
  const auto fv = as_doubles(f);
  const auto gv = as_doubles(g);

  std::map<Point, double> best;
  Point z(f.dimension());
  for (const auto& [x, a] : fv) {
    for (const auto& [y, b] : gv) {
      for (std::size_t i = 0; i < z.size(); ++i) z[i] = (*x)[i] + (*y)[i];
      const double m = static_cast<double>(p_mean_raw(p, lambda, a, b));
      auto [it, inserted] = best.try_emplace(z, m);
      if (!inserted && it->second < m) it->second = m;
    }
  }
  RealFunction h(f.dimension());
  for (auto& [point, value] : best) h.set(point, value);
  return h;
}

std::optional<SparseFunction> min_admissible_h_exact(const SparseFunction& f, const SparseFunction& g,
                                                     const MeanSpec& spec) {
  check_pair(f, g);
  const MeanSpec constraint = spec.negated();
  SparseFunction h(f.dimension());
  for (const auto& [x, a] : f.entries()) {
    for (const auto& [y, b] : g.entries()) {
      auto m = p_mean_exact(constraint, a, b);
      if (!m) return std::nullopt;
      h.raise_to(add_points(x, y), *m);
    }
  }
  return h;
}

bool is_admissible(const RealFunction& h, const SparseFunction& f, const SparseFunction& g, const MeanSpec& spec,
                   double rel_tol) {
  check_pair(f, g);
  const MeanSpec constraint = spec.negated();
  for (const auto& [x, a] : f.entries()) {
    for (const auto& [y, b] : g.entries()) {
      const double need = p_mean(constraint, a, b);
      if (h.at(add_points(x, y)) < need * (1.0 - rel_tol)) return false;
    }
  }
  return true;
}

FunctionalBmCheck check_functional_bm(const SparseFunction& f, const SparseFunction& g, const MeanSpec& spec) {
  check_pair(f, g);
  const MeanSpec constraint = spec.negated();
  const Rational sum_f = f.mass();
  const Rational sum_g = g.mass();
  if (auto h = min_admissible_h_exact(f, g, spec)) {
    if (auto m = p_mean_exact(constraint, sum_f, sum_g))
      return {to_double(h->mass()), to_double(*m), true};
  }
  return {min_admissible_h(f, g, spec).mass(), p_mean(constraint, sum_f, sum_g), false};
}

BetaConvexCheck beta_convex_check(const std::vector<Rational>& betas, double c, std::size_t n,
                                  const Rational& alpha, double p) {
  if (betas.empty()) throw Error(ErrorCode::empty_input, "beta sequence is empty");
  if (!(c > 0)) throw Error(ErrorCode::invalid_argument, "c must be positive");
  if (!(p > 0)) throw Error(ErrorCode::invalid_argument, "p must be positive");
  if (n == 0) throw Error(ErrorCode::invalid_argument, "n must be positive");
  if (sgn(alpha) <= 0 || alpha >= 1) throw Error(ErrorCode::out_of_range, "alpha must lie in (0,1)");

  Rational total = 0;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (sgn(betas[i]) <= 0) throw Error(ErrorCode::invalid_argument, "beta terms must be positive");
    if (i > 0 && betas[i] > betas[i - 1]) throw Error(ErrorCode::not_sorted, "beta sequence is not nonincreasing");
    total += betas[i];
  }
  if (total != 1) throw Error(ErrorCode::wrong_sum, "beta sequence sums to " + to_string(total) + ", not 1");
  Rational head = 0;
  for (std::size_t i = 0; i < std::min(n, betas.size()); ++i) head += betas[i];
  if (n > betas.size() || head > 1 - alpha)
    throw Error(ErrorCode::mass_cap_violated, "first n terms carry more than 1 - alpha");

  long double lhs = 0;
  for (const auto& b : betas) lhs += p_mean_raw(-p, 0.5L, c, to_double(b));
  const long double a = to_double(alpha);
  const long double rhs = a * p_mean_raw(-p, 0.5L, c * static_cast<long double>(n) / (1 - a), 1);
  return {static_cast<double>(lhs), static_cast<double>(rhs)};
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::hypothesis_not_met:
      return "hypothesis-not-met";
  }
  return "fail";
}

VerificationReport verify_main_theorem(const SparseFunction& f, const SparseFunction& g, const MeanSpec& spec,
                                       double epsilon, std::size_t n, std::int64_t direction_bound) {
  check_pair(f, g);
  VerificationReport report;
  report.sum_f = f.mass();
  report.sum_g = g.mass();
  if (report.sum_f != report.sum_g)
    throw Error(ErrorCode::mass_mismatch, "main inequality needs sum f == sum g, got " + to_string(report.sum_f) +
                                              " and " + to_string(report.sum_g));
  const std::size_t d = f.dimension();
  if (sgn(spec.p()) <= 0 || spec.p() * static_cast<unsigned long>(d) >= 1)
    throw Error(ErrorCode::out_of_range, "main inequality needs 0 < p < 1/d, got p = " + to_string(spec.p()));

  report.epsilon = epsilon;
  report.nondegeneracy = non_degenerate(f, spec.p(), n, direction_bound);
  const auto exact = min_admissible_h_exact(f, g, spec);
  report.sum_h = exact ? to_double(exact->mass()) : min_admissible_h(f, g, spec).mass();
  const double sum_f = to_double(report.sum_f);
  report.bound = (std::ldexp(1.0, static_cast<int>(d)) - epsilon) * sum_f;
  report.margin = report.sum_h - report.bound;
  if (!report.nondegeneracy.ok)
    report.verdict = Verdict::hypothesis_not_met;
  else
    report.verdict = report.margin / sum_f >= -kTolerance ? Verdict::pass : Verdict::fail;
  return report;
}

}  // namespace bbl
