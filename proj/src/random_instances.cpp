#include "bbl/random_instances.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace bbl {

namespace {

std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

}  // namespace

Rng trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return Rng(seq);
}

SparseFunction random_function(Rng& rng, std::size_t dimension, std::size_t support_max, std::int64_t value_max,
                               std::int64_t radius) {
  const std::size_t size = static_cast<std::size_t>(uniform(rng, 1, static_cast<std::int64_t>(support_max)));
  SparseFunction f(dimension);
  // Room for `size` distinct points.
  while (std::pow(2.0 * static_cast<double>(radius) + 1, static_cast<double>(dimension)) <
         static_cast<double>(size) * 2)
    radius *= 2;
  while (f.support_size() < size) {
    Point x(dimension);
    for (auto& c : x) c = uniform(rng, -radius, radius);
    if (f.entries().count(x)) continue;
    Rational v(uniform(rng, 1, value_max), static_cast<unsigned long>(uniform(rng, 1, value_max)));
    v.canonicalize();
    f.set(x, v);
  }
  return f;
}

SparseFunction equalize_mass(const SparseFunction& g, const Rational& target) {
  return g.scaled(Rational(target / g.mass()));
}

FunctionPair random_equal_mass_pair(Rng& rng, std::size_t dimension, std::size_t support_max,
                                    std::int64_t value_max) {
  SparseFunction f = random_function(rng, dimension, support_max, value_max);
  SparseFunction g = random_function(rng, dimension, support_max, value_max);
  return {f, equalize_mass(g, f.mass())};
}

FunctionPair random_spread_pair(Rng& rng, std::size_t min_points, std::size_t max_points) {
  const auto spread = [&]() {
    const auto size = static_cast<std::size_t>(
        uniform(rng, static_cast<std::int64_t>(min_points), static_cast<std::int64_t>(max_points)));
    const std::int64_t span = static_cast<std::int64_t>(size) * 2;
    SparseFunction f(1);
    while (f.support_size() < size) {
      const Point x{uniform(rng, 0, span)};
      if (f.entries().count(x)) continue;
      f.set(x, Rational(uniform(rng, 50, 100)));
    }
    return f;
  };
  SparseFunction f = spread();
  SparseFunction g = spread();
  return {f, equalize_mass(g, f.mass())};
}

PointSet random_point_set(Rng& rng, std::size_t dimension, std::size_t size_max, std::int64_t radius) {
  const std::size_t size = static_cast<std::size_t>(uniform(rng, 1, static_cast<std::int64_t>(size_max)));
  while (std::pow(2.0 * static_cast<double>(radius) + 1, static_cast<double>(dimension)) <
         static_cast<double>(size) * 2)
    radius *= 2;
  PointSet s(dimension);
  while (s.size() < size) {
    Point x(dimension);
    for (auto& c : x) c = uniform(rng, -radius, radius);
    s.insert(x);
  }
  return s;
}

BetaTuple random_beta_tuple(Rng& rng, std::size_t length_max) {
  const auto m = static_cast<std::size_t>(uniform(rng, 2, static_cast<std::int64_t>(length_max)));
  std::vector<std::int64_t> weights(m);
  for (auto& w : weights) w = uniform(rng, 1, 1000);
  std::sort(weights.begin(), weights.end(), std::greater<>());
  std::int64_t total = 0;
  for (auto w : weights) total += w;

  BetaTuple t;
  t.betas.reserve(m);
  for (auto w : weights) {
    Rational b(w, static_cast<unsigned long>(total));
    b.canonicalize();
    t.betas.push_back(b);
  }
  t.n = static_cast<std::size_t>(uniform(rng, 1, static_cast<std::int64_t>(m) - 1));
  Rational head = 0;
  for (std::size_t i = 0; i < t.n; ++i) head += t.betas[i];
  // alpha in (0, 1 - head]: the cap on the first n terms then holds.
  Rational u(uniform(rng, 1, 1000), 1000);
  u.canonicalize();
  t.alpha = (1 - head) * u;
  t.c = std::exp(std::uniform_real_distribution<double>(std::log(1e-3), std::log(1e3))(rng));
  t.p = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
  if (t.p <= 0) t.p = 1e-3;
  return t;
}

}  // namespace bbl
