#include "bbl/lifting.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

namespace bbl {

LiftingDomain::LiftingDomain(std::string name, std::size_t dimension, Operation op, Universe universe,
                             MeanSpec mean, double constant, std::string convention)
    : name_(std::move(name)),
      dimension_(dimension),
      op_(std::move(op)),
      universe_(std::move(universe)),
      mean_(std::move(mean)),
      constant_(constant),
      convention_(std::move(convention)) {
  if (dimension_ == 0) throw Error(ErrorCode::invalid_argument, "domain dimension must be positive");
  if (sgn(mean_.p()) < 0) throw Error(ErrorCode::out_of_range, "set inequality exponent must be nonnegative");
  if (!(constant_ > 0)) throw Error(ErrorCode::invalid_argument, "domain constant must be positive");
}

bool LiftingDomain::contains(const Point& x) const { return x.size() == dimension_ && universe_(x); }

std::vector<Point> LiftingDomain::apply(const Point& x, const Point& y) const {
  if (!contains(x) || !contains(y))
    throw Error(ErrorCode::universe_violation,
                "point " + to_string(contains(x) ? y : x) + " outside domain '" + name_ + "'");
  auto out = op_(x, y);
  if (out.empty()) throw Error(ErrorCode::universe_violation, "operation of '" + name_ + "' returned no point");
  return out;
}

LiftingDomain integer_addition_domain(std::size_t dimension, std::optional<Rational> p, Rational lambda) {
  const Rational exponent = p ? *p : Rational(1, static_cast<unsigned long>(dimension));
  return LiftingDomain(
      "zd-add", dimension, [](const Point& x, const Point& y) { return std::vector<Point>{add_points(x, y)}; },
      [](const Point&) { return true; }, MeanSpec(exponent, std::move(lambda)), 1.0,
      "S(x,y) = x + y; claimed |A+B| >= M_{p,l}(|A|,|B|) with constant 1");
}

namespace {

std::uint32_t cube_index(const Point& x) {
  std::uint32_t v = 0;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j]) v |= 1u << j;
  return v;
}

Point cube_point(std::size_t dimension, std::uint32_t v) {
  Point x(dimension);
  for (std::size_t j = 0; j < dimension; ++j) x[j] = (v >> j) & 1u;
  return x;
}

// Nearest integer to num/den (den > 0), ties to even.
std::int64_t round_half_even(const Integer& num, const Integer& den) {
  Integer q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  const int c = cmp(Integer(2 * r), den);
  if (c > 0 || (c == 0 && mpz_odd_p(q.get_mpz_t()))) q += 1;
  return q.get_si();
}

}  // namespace

LiftingDomain cube_midpoint_domain(std::size_t dimension) {
  if (dimension > 5) throw Error(ErrorCode::out_of_range, "cube domain supports d <= 5");
  return LiftingDomain(
      "cube-midpoint", dimension,
      [dimension](const Point& x, const Point& y) {
        const CubeMask mask = cube_midpoint_mask(dimension, cube_index(x), cube_index(y));
        std::vector<Point> out;
        for (std::uint32_t v = 0; v < (1u << dimension); ++v)
          if (mask >> v & 1u) out.push_back(cube_point(dimension, v));
        return out;
      },
      [](const Point& x) { return std::all_of(x.begin(), x.end(), [](auto c) { return c == 0 || c == 1; }); },
      MeanSpec(0, Rational(1, 2)), 1.0,
      "Hamming midpoints: d(x,m)+d(m,y)=d(x,y), |d(x,m)-d(x,y)/2| <= 1/2; claimed |M| >= sqrt(|A||B|)");
}

LiftingDomain scaled_grid_domain(std::size_t dimension, Rational lambda) {
  MeanSpec mean(0, lambda);  // validates lambda
  const Integer r = lambda.get_num();
  const Integer s = lambda.get_den();
  const double l = to_double(lambda);
  const auto per_axis = [](const Rational& w) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), w.get_den_mpz_t(), w.get_num_mpz_t());
    return q.get_d() + 1.0;  // floor(1/w) + 1
  };
  const double k_x = per_axis(lambda);
  const double k_y = per_axis(1 - lambda);
  const double constant =
      std::pow(std::pow(k_x, l) * std::pow(k_y, 1 - l), -static_cast<double>(dimension));
  return LiftingDomain(
      "grid-scaled", dimension,
      [r, s](const Point& x, const Point& y) {
        Point z(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
          const Integer num = r * Integer(static_cast<long>(x[i])) + (s - r) * Integer(static_cast<long>(y[i]));
          z[i] = round_half_even(num, s);
        }
        return std::vector<Point>{z};
      },
      [](const Point&) { return true; }, std::move(mean), constant,
      "S(x,y) = round(l x + (1-l) y) per coordinate, nearest with ties to even (a library convention); "
      "claimed |S(A,B)| >= C |A|^l |B|^(1-l) with C = ((floor(1/l)+1)^l (floor(1/(1-l))+1)^(1-l))^(-d)");
}

LiftingDomain make_domain(std::string_view name, std::size_t dimension) {
  if (name == "zd-add") {
    if (dimension == 0 || dimension > 3) throw Error(ErrorCode::invalid_argument, "zd-add supports 1 <= d <= 3");
    return integer_addition_domain(dimension);
  }
  if (name == "cube-midpoint") {
    if (dimension == 0 || dimension > 4)
      throw Error(ErrorCode::invalid_argument, "cube-midpoint supports 1 <= d <= 4");
    return cube_midpoint_domain(dimension);
  }
  if (name == "grid-scaled") {
    if (dimension == 0 || dimension > 3)
      throw Error(ErrorCode::invalid_argument, "grid-scaled supports 1 <= d <= 3");
    return scaled_grid_domain(dimension);
  }
  throw Error(ErrorCode::invalid_argument, "unknown domain '" + std::string(name) + "'");
}

std::vector<std::string> registered_domains() { return {"zd-add", "cube-midpoint", "grid-scaled"}; }

PointSet set_image(const LiftingDomain& domain, const PointSet& a, const PointSet& b) {
  if (a.dimension() != domain.dimension() || b.dimension() != domain.dimension())
    throw Error(ErrorCode::dimension_mismatch, "sets and domain differ in dimension");
  PointSet out(domain.dimension());
  for (const auto& x : a.points())
    for (const auto& y : b.points())
      for (const auto& z : domain.apply(x, y)) out.insert(z);
  return out;
}

SetBmCheck check_set_bm(const LiftingDomain& domain, const PointSet& a, const PointSet& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::empty_input, "set inequality needs nonempty sets");
  const double image = static_cast<double>(set_image(domain, a, b).size());
  const Rational size_a(static_cast<unsigned long>(a.size()));
  const Rational size_b(static_cast<unsigned long>(b.size()));
  return {image, domain.constant() * p_mean(domain.mean(), size_a, size_b)};
}

RealFunction lifted_min_admissible_h(const LiftingDomain& domain, const SparseFunction& f, const SparseFunction& g) {
  if (f.dimension() != domain.dimension() || g.dimension() != domain.dimension())
    throw Error(ErrorCode::dimension_mismatch, "functions and domain differ in dimension");
  const MeanSpec constraint = domain.mean().negated();
  std::map<Point, double> best;
  for (const auto& [x, a] : f.entries()) {
    for (const auto& [y, b] : g.entries()) {
      const double m = p_mean(constraint, a, b);
      for (auto& z : domain.apply(x, y)) {
        auto [it, inserted] = best.try_emplace(std::move(z), m);
        if (!inserted && it->second < m) it->second = m;
      }
    }
  }
  RealFunction h(domain.dimension());
  for (auto& [z, v] : best) h.set(z, v);
  return h;
}

LiftCheck lift_check(const LiftingDomain& domain, const SparseFunction& f, const SparseFunction& g) {
  const Rational sum_f = f.mass();
  if (sum_f != g.mass()) throw Error(ErrorCode::mass_mismatch, "lifting needs sum f == sum g");
  return {lifted_min_admissible_h(domain, f, g).mass(), to_double(sum_f), domain.constant()};
}

Recovery recover_bm(const LiftingDomain& domain, const PointSet& a, const PointSet& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::empty_input, "recovery needs nonempty sets");
  const Rational inv_a(1, static_cast<unsigned long>(a.size()));
  const Rational inv_b(1, static_cast<unsigned long>(b.size()));
  SparseFunction f(domain.dimension());
  SparseFunction g(domain.dimension());
  for (const auto& x : a.points()) f.set(x, inv_a);
  for (const auto& y : b.points()) g.set(y, inv_b);
  const double sum_h = lifted_min_admissible_h(domain, f, g).mass();
  const double image = static_cast<double>(set_image(domain, a, b).size());
  return {sum_h, image * p_mean(domain.mean().negated(), inv_a, inv_b)};
}

CubeMask cube_midpoint_mask(std::size_t dimension, std::uint32_t x, std::uint32_t y) {
  if (dimension > 5) throw Error(ErrorCode::out_of_range, "cube masks support d <= 5");
  const std::uint32_t diff = x ^ y;
  const int distance = std::popcount(diff);
  CubeMask mask = 0;
  for (std::uint32_t m = 0; m < (1u << dimension); ++m) {
    // Agreeing with x and y off the differing coordinates makes m geodesic.
    if ((m & ~diff) != (x & ~diff)) continue;
    const int to_x = std::popcount((m ^ x) & diff);
    if (2 * to_x == distance || 2 * to_x == distance - 1 || 2 * to_x == distance + 1) mask |= 1u << m;
  }
  return mask;
}

CubeMask cube_midpoint_set(std::size_t dimension, CubeMask a, CubeMask b) {
  CubeMask out = 0;
  for (std::uint32_t x = 0; x < (1u << dimension); ++x) {
    if (!(a >> x & 1u)) continue;
    for (std::uint32_t y = 0; y < (1u << dimension); ++y)
      if (b >> y & 1u) out |= cube_midpoint_mask(dimension, x, y);
  }
  return out;
}

CubeBmSummary cube_bm_exhaustive(std::size_t dimension) {
  if (dimension == 0 || dimension > 4) throw Error(ErrorCode::out_of_range, "exhaustive cube check supports d <= 4");
  const std::uint32_t vertices = 1u << dimension;
  const std::uint32_t subsets = 1u << vertices;

  std::vector<CubeMask> table(vertices * vertices);
  for (std::uint32_t x = 0; x < vertices; ++x)
    for (std::uint32_t y = 0; y < vertices; ++y) table[x * vertices + y] = cube_midpoint_mask(dimension, x, y);

  // Vertex permutations of the isometry group: coordinate permutation then
  // translation by xor.
  std::vector<std::vector<std::uint32_t>> group;
  std::vector<std::size_t> perm(dimension);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (std::uint32_t t = 0; t < vertices; ++t) {
      std::vector<std::uint32_t> image(vertices);
      for (std::uint32_t v = 0; v < vertices; ++v) {
        std::uint32_t w = 0;
        for (std::size_t j = 0; j < dimension; ++j)
          if (v >> j & 1u) w |= 1u << perm[j];
        image[v] = w ^ t;
      }
      group.push_back(std::move(image));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  const auto act = [&](const std::vector<std::uint32_t>& g, CubeMask s) {
    CubeMask out = 0;
    for (std::uint32_t v = 0; v < vertices; ++v)
      if (s >> v & 1u) out |= 1u << g[v];
    return out;
  };

  CubeBmSummary summary;
  summary.dimension = dimension;
  summary.worst_ratio = INFINITY;
  std::vector<bool> seen(subsets, false);
  std::vector<CubeMask> image_of(subsets);
  std::vector<CubeMask> per_vertex(vertices);
  for (CubeMask a = 1; a < subsets; ++a) {
    if (seen[a]) continue;
    std::uint64_t orbit = 0;
    for (const auto& g : group) {
      const CubeMask ga = act(g, a);
      if (!seen[ga]) {
        seen[ga] = true;
        ++orbit;
      }
    }
    for (std::uint32_t y = 0; y < vertices; ++y) {
      CubeMask m = 0;
      for (std::uint32_t x = 0; x < vertices; ++x)
        if (a >> x & 1u) m |= table[x * vertices + y];
      per_vertex[y] = m;
    }
    const std::uint64_t size_a = static_cast<std::uint64_t>(std::popcount(a));
    image_of[0] = 0;
    for (CubeMask b = 1; b < subsets; ++b) {
      image_of[b] = image_of[b & (b - 1)] | per_vertex[static_cast<std::uint32_t>(std::countr_zero(b))];
      const std::uint64_t image = static_cast<std::uint64_t>(std::popcount(image_of[b]));
      const std::uint64_t product = size_a * static_cast<std::uint64_t>(std::popcount(b));
      ++summary.pairs_checked;
      if (image * image < product) ++summary.violations;
      const double ratio = static_cast<double>(image) / std::sqrt(static_cast<double>(product));
      if (ratio < summary.worst_ratio) {
        summary.worst_ratio = ratio;
        summary.worst_a = a;
        summary.worst_b = b;
      }
    }
    summary.pairs_covered += orbit * (subsets - 1);
  }
  return summary;
}

}  // namespace bbl
