#pragma once

// Seeded generators for random check instances. All draws go through a
// caller-owned engine so a (seed, trial) pair fixes the instance.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "bbl/functions.hpp"
#include "bbl/geometry.hpp"

namespace bbl {

using Rng = std::mt19937_64;

/// Engine for one trial of a seeded campaign.
Rng trial_rng(std::uint64_t seed, std::uint64_t trial);

/// Between 1 and support_max points with coordinates in [-radius, radius],
/// values num/den with 1 <= num, den <= value_max.
SparseFunction random_function(Rng& rng, std::size_t dimension, std::size_t support_max, std::int64_t value_max = 100,
                               std::int64_t radius = 6);

/// g rescaled so that sum g == sum f exactly.
SparseFunction equalize_mass(const SparseFunction& g, const Rational& target);

struct FunctionPair {
  SparseFunction f;
  SparseFunction g;
};

FunctionPair random_equal_mass_pair(Rng& rng, std::size_t dimension, std::size_t support_max,
                                    std::int64_t value_max = 100);

/// One-dimensional functions spread over at least min_points integers with
/// values within a factor 2 of each other, equal masses.
FunctionPair random_spread_pair(Rng& rng, std::size_t min_points, std::size_t max_points);

/// Nonempty random subset of a coordinate box [-radius, radius]^d.
PointSet random_point_set(Rng& rng, std::size_t dimension, std::size_t size_max, std::int64_t radius = 4);

struct BetaTuple {
  std::vector<Rational> betas;
  double c;
  std::size_t n;
  Rational alpha;
  double p;
};

/// Nonincreasing probability vector with an admissible (n, alpha) and random
/// c in [1e-3, 1e3] (log-uniform) and p in (0, 3].
BetaTuple random_beta_tuple(Rng& rng, std::size_t length_max = 30);

}  // namespace bbl
