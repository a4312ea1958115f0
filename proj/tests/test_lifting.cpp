#include <doctest.h>

#include <bit>
#include <cmath>

#include "bbl/lifting.hpp"
#include "bbl/random_instances.hpp"
#include "bbl/supconv.hpp"
#include "oracles.hpp"

using bbl::LiftingDomain;
using bbl::Point;
using bbl::PointSet;
using bbl::Rational;
using bbl::SparseFunction;
using oracle::q;

namespace {

Point vertex(std::size_t d, std::uint32_t bits) {
  Point v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = (bits >> i) & 1;
  return v;
}

PointSet cube_set(std::size_t d, bbl::CubeMask mask) {
  PointSet s(d);
  for (std::uint32_t v = 0; v < (1u << d); ++v)
    if (mask >> v & 1) s.insert(vertex(d, v));
  return s;
}

SparseFunction uniform(const PointSet& s) {
  return bbl::indicator(s.dimension(), std::vector<Point>(s.points().begin(), s.points().end()));
}

}  // namespace

TEST_CASE("registry") {
  const auto names = bbl::registered_domains();
  CHECK(names == std::vector<std::string>{"zd-add", "cube-midpoint", "grid-scaled"});
  CHECK(bbl::make_domain("zd-add", 3).dimension() == 3);
  CHECK_THROWS_AS(bbl::make_domain("zd-add", 4), bbl::Error);
  CHECK_THROWS_AS(bbl::make_domain("cube-midpoint", 5), bbl::Error);
  CHECK_THROWS_AS(bbl::make_domain("gaussian", 1), bbl::Error);
  CHECK(bbl::make_domain("cube-midpoint", 2).mean().is_geometric());
  CHECK_FALSE(bbl::make_domain("grid-scaled", 1).convention().empty());
}

TEST_CASE("integer addition image is the sumset") {
  bbl::Rng rng(51);
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto domain = bbl::integer_addition_domain(d);
    CHECK(domain.mean().p() == q(1, static_cast<std::int64_t>(d)));
    for (int i = 0; i < 30; ++i) {
      const auto a = bbl::random_point_set(rng, d, 8);
      const auto b = bbl::random_point_set(rng, d, 8);
      CHECK(bbl::set_image(domain, a, b) == bbl::sumset(a, b));
    }
  }
}

TEST_CASE("cube midpoints") {
  const auto domain = bbl::cube_midpoint_domain(3);
  const PointSet x(3, {{1, 0, 1}});
  CHECK(bbl::set_image(domain, x, x) == x);
  const auto m = bbl::set_image(domain, PointSet(3, {{0, 0, 0}}), PointSet(3, {{1, 1, 1}}));
  CHECK(m.size() == 6);
  for (const auto& v : m.points()) {
    const auto weight = v[0] + v[1] + v[2];
    CHECK((weight == 1 || weight == 2));
  }
  CHECK_THROWS_AS(domain.apply({0, 2, 0}, {0, 0, 0}), bbl::Error);
  try {
    domain.apply({0, 0}, {0, 0});
    FAIL("no error");
  } catch (const bbl::Error& e) {
    CHECK((e.code() == bbl::ErrorCode::universe_violation || e.code() == bbl::ErrorCode::dimension_mismatch));
  }
}

TEST_CASE("cube midpoint masks agree with coordinate enumeration") {
  for (std::size_t d = 1; d <= 4; ++d)
    for (std::uint32_t x = 0; x < (1u << d); ++x)
      for (std::uint32_t y = 0; y < (1u << d); ++y) {
        const auto expected = oracle::cube_midpoints(vertex(d, x), vertex(d, y));
        const auto mask = bbl::cube_midpoint_mask(d, x, y);
        CHECK(static_cast<std::size_t>(std::popcount(mask)) == expected.size());
        for (const auto& v : expected) {
          std::uint32_t bits = 0;
          for (std::size_t i = 0; i < d; ++i) bits |= static_cast<std::uint32_t>(v[i]) << i;
          CHECK((mask >> bits & 1) == 1);
        }
        CHECK(mask == bbl::cube_midpoint_mask(d, y, x));
      }
}

TEST_CASE("cube midpoint image is symmetric and matches the mask path") {
  bbl::Rng rng(52);
  const std::size_t d = 4;
  const auto domain = bbl::cube_midpoint_domain(d);
  for (int i = 0; i < 200; ++i) {
    const auto a = static_cast<bbl::CubeMask>(rng() & 0xffff) | 1u;
    const auto b = static_cast<bbl::CubeMask>(rng() & 0xffff) | 2u;
    const auto image = bbl::set_image(domain, cube_set(d, a), cube_set(d, b));
    CHECK(image == bbl::set_image(domain, cube_set(d, b), cube_set(d, a)));
    CHECK(image == cube_set(d, bbl::cube_midpoint_set(d, a, b)));
  }
}

TEST_CASE("set inequality examples") {
  const auto add1 = bbl::integer_addition_domain(1, Rational(1));
  const auto ten = bbl::box(1, 10);
  const auto r = bbl::check_set_bm(add1, ten, ten);
  CHECK(r.lhs == 19);
  CHECK(r.rhs == doctest::Approx(10.0));

  // A singleton against a set in the cube.
  const auto cube = bbl::cube_midpoint_domain(3);
  for (bbl::CubeMask b = 1; b < 256; ++b) {
    const auto s = bbl::check_set_bm(cube, cube_set(3, 1), cube_set(3, b));
    CHECK(s.lhs >= std::sqrt(static_cast<double>(std::popcount(b))) - 1e-12);
    CHECK(s.rhs == doctest::Approx(std::sqrt(static_cast<double>(std::popcount(b)))));
  }
  CHECK_THROWS_AS(bbl::check_set_bm(cube, PointSet(3), cube_set(3, 1)), bbl::Error);
}

TEST_CASE("cube inequality holds over every pair in low dimension") {
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto s = bbl::cube_bm_exhaustive(d);
    const std::uint64_t subsets = (1ull << (1u << d)) - 1;
    CHECK(s.pairs_covered == subsets * subsets);
    CHECK(s.violations == 0);
    CHECK(s.worst_ratio >= 1.0);
    // Brute force without symmetry reduction.
    std::uint64_t violations = 0;
    for (bbl::CubeMask a = 1; a <= subsets; ++a)
      for (bbl::CubeMask b = 1; b <= subsets; ++b) {
        const auto m = std::popcount(bbl::cube_midpoint_set(d, a, b));
        if (static_cast<std::uint64_t>(m) * m <
            static_cast<std::uint64_t>(std::popcount(a)) * static_cast<std::uint64_t>(std::popcount(b)))
          ++violations;
      }
    CHECK(violations == 0);
  }
}

TEST_CASE("scaled grid domain") {
  const auto grid = bbl::scaled_grid_domain(1, q(1, 2));
  CHECK(grid.apply({0}, {1}) == std::vector<Point>{{0}});  // 1/2 rounds to even
  CHECK(grid.apply({1}, {2}) == std::vector<Point>{{2}});  // 3/2 rounds to even
  CHECK(grid.apply({-1}, {0}) == std::vector<Point>{{0}});
  CHECK(grid.apply({4}, {-2}) == std::vector<Point>{{1}});
  CHECK(grid.constant() == doctest::Approx(1.0 / 3));

  const auto third = bbl::scaled_grid_domain(2, q(1, 3));
  const double c = std::pow(std::pow(4.0, 1.0 / 3) * std::pow(2.0, 2.0 / 3), -2.0);
  CHECK(third.constant() == doctest::Approx(c).epsilon(1e-14));

  bbl::Rng rng(53);
  for (int i = 0; i < 200; ++i) {
    const std::size_t d = 1 + i % 2;
    const auto domain = bbl::scaled_grid_domain(d, q(1 + static_cast<std::int64_t>(rng() % 9), 10));
    const auto a = bbl::random_point_set(rng, d, 10);
    const auto b = bbl::random_point_set(rng, d, 10);
    const auto r = bbl::check_set_bm(domain, a, b);
    CHECK(r.lhs >= r.rhs * (1 - 1e-12));
  }
}

TEST_CASE("lifted h for addition matches the sup-convolution") {
  bbl::Rng rng(54);
  for (int i = 0; i < 100; ++i) {
    const std::size_t d = 1 + i % 2;
    const auto [f, g] = bbl::random_equal_mass_pair(rng, d, 15);
    const auto domain = bbl::integer_addition_domain(d, q(1, 4));
    const auto lifted = bbl::lifted_min_admissible_h(domain, f, g);
    const auto direct = bbl::min_admissible_h(f, g, domain.mean());
    CHECK(lifted == direct);
    const auto check = bbl::lift_check(domain, f, g);
    CHECK(check.sum_h_star >= check.sum_f * check.constant * (1 - 1e-12));
  }
}

TEST_CASE("lifting examples") {
  for (const std::string& name : bbl::registered_domains()) {
    const auto domain = bbl::make_domain(name, 2);
    const auto a = uniform(PointSet(2, {{0, 1}}));
    const auto check = bbl::lift_check(domain, a, a);
    CHECK(check.sum_h_star >= check.sum_f * check.constant);
  }
  const auto cube = bbl::cube_midpoint_domain(3);
  const auto full = uniform(cube_set(3, 0xff));
  const auto check = bbl::lift_check(cube, full, full);
  CHECK(check.sum_h_star >= check.sum_f);
  CHECK_THROWS_AS(bbl::lift_check(cube, full, uniform(cube_set(3, 1))), bbl::Error);
}

TEST_CASE("lifting holds on random pairs in every domain") {
  bbl::Rng rng(55);
  for (int i = 0; i < 150; ++i) {
    const std::size_t d = 1 + i % 3;
    SparseFunction f(d), g(d);
    std::string name;
    if (i % 3 == 0) {
      name = "cube-midpoint";
      for (std::uint32_t v = 0; v < (1u << d); ++v) {
        if (rng() % 3) f.set(vertex(d, v), q(1 + static_cast<std::int64_t>(rng() % 9), 1));
        if (rng() % 3) g.set(vertex(d, v), q(1 + static_cast<std::int64_t>(rng() % 9), 1));
      }
      if (f.empty()) f.set(vertex(d, 0), 1);
      if (g.empty()) g.set(vertex(d, 0), 1);
      g = bbl::equalize_mass(g, bbl::mass(f));
    } else {
      name = i % 3 == 1 ? "zd-add" : "grid-scaled";
      auto pair = bbl::random_equal_mass_pair(rng, d, 12);
      f = pair.f;
      g = pair.g;
    }
    const auto c = bbl::lift_check(bbl::make_domain(name, d), f, g);
    CHECK(c.sum_h_star >= c.constant * c.sum_f * (1 - 1e-12));
  }
}

TEST_CASE("recovering the set inequality from indicators") {
  const auto add1 = bbl::integer_addition_domain(1, Rational(1));
  auto r = bbl::recover_bm(add1, PointSet(1, {{0}}), PointSet(1, {{0}}));
  CHECK(r.sum_h_star == 1);
  CHECK(r.closed_form == 1);

  r = bbl::recover_bm(add1, bbl::box(1, 10), bbl::box(1, 10));
  CHECK(r.sum_h_star == doctest::Approx(1.9).epsilon(1e-14));
  CHECK(r.closed_form == doctest::Approx(1.9).epsilon(1e-14));

  const auto cube = bbl::cube_midpoint_domain(3);
  const auto sub = cube_set(3, 0x0f);  // the face with third coordinate 0
  r = bbl::recover_bm(cube, sub, sub);
  CHECK(r.sum_h_star >= 1);

  bbl::Rng rng(56);
  for (int i = 0; i < 200; ++i) {
    const std::size_t d = 1 + i % 2;
    const auto domain = bbl::integer_addition_domain(d, q(1 + static_cast<std::int64_t>(rng() % 4), 4),
                                                     q(1 + static_cast<std::int64_t>(rng() % 9), 10));
    const auto a = bbl::random_point_set(rng, d, 10);
    const auto b = bbl::random_point_set(rng, d, 10);
    r = bbl::recover_bm(domain, a, b);
    CHECK(std::fabs(r.sum_h_star - r.closed_form) <= 1e-12 * r.closed_form);
    CHECK(r.sum_h_star >= domain.constant() * (1 - 1e-12));
  }
  CHECK_THROWS_AS(bbl::recover_bm(cube, PointSet(3), sub), bbl::Error);
}
