// Acceptance gate: runs each end-to-end criterion at full size and prints one
// PASS/FAIL line per criterion. Exit status is nonzero if any criterion fails.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "bbl/campaign.hpp"
#include "bbl/cli.hpp"
#include "bbl/lifting.hpp"
#include "bbl/random_instances.hpp"
#include "bbl/supconv.hpp"
#include "oracles.hpp"

using bbl::Rational;
using oracle::q;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

/// limit_s <= 0 means the criterion sets no runtime limit.
bool run_criterion(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const bool in_time = limit_s <= 0 || secs < limit_s;
  const bool pass = o.ok && in_time;
  const std::string limit = limit_s > 0 ? fmt(", limit %.0f s", limit_s) : std::string();
  std::printf("%s [%d] %s: %s (%.2f s%s)\n", pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(), secs,
              limit.c_str());
  std::fflush(stdout);
  return pass;
}

const std::vector<Rational> kGammas{q(1, 10), q(1, 4), q(1, 2)};
const std::vector<std::int64_t> kSides{4, 16, 64};
const std::vector<Rational> kExponents{q(1, 4), q(1, 3), q(1, 2)};
const std::vector<std::size_t> kDims{1, 2};

Outcome extremal_identity() {
  std::size_t combos = 0, bad_mass = 0, bad_admissible = 0;
  double worst_rel = 0;
  for (const auto& gamma : kGammas)
    for (auto side : kSides)
      for (const auto& p : kExponents)
        for (auto d : kDims) {
          ++combos;
          const auto ex = bbl::extremal_instance(gamma, side, p, d);
          const double pd = bbl::to_double(p);
          const double predicted = 1 + std::pow(2.0, 1 / pd) * bbl::to_double(gamma);
          const double rel = std::fabs(ex.h.mass() - predicted) / predicted;
          worst_rel = std::max(worst_rel, rel);
          if (rel > 1e-9) ++bad_mass;
          for (const auto& [x, fx] : ex.f.entries())
            for (const auto& [y, gy] : ex.g.entries())
              if (ex.h.at(oracle::add(x, y)) < oracle::mean(-pd, 0.5, bbl::to_double(fx), bbl::to_double(gy)))
                ++bad_admissible;
        }
  return {bad_mass == 0 && bad_admissible == 0 && combos >= 20,
          fmt("%zu combos, mass mismatches %zu (worst rel %.1e), admissibility violations %zu", combos, bad_mass,
              worst_rel, bad_admissible)};
}

Outcome extremal_coverage() {
  std::size_t combos = 0, axis_mismatch = 0;
  double fitted_c = 0;
  for (const auto& gamma : kGammas)
    for (auto side : kSides)
      for (auto d : kDims) {
        ++combos;
        const auto ex = bbl::extremal_instance(gamma, side, q(1, 4), d);
        bbl::Point axis(d, 0);
        axis[0] = 1;
        // A hyperplane through the origin meets [N]^d in N^{d-1} points.
        if (bbl::top_n_hyperplane_mass(ex.f, axis, 1) != 1 - gamma + gamma / side) ++axis_mismatch;
        for (std::size_t n : {1, 2, 3}) {
          Rational worst = 0;
          for (const auto& u : bbl::primitive_directions(d, 3))
            worst = std::max(worst, bbl::top_n_hyperplane_mass(ex.f, u, n));
          const Rational excess = worst - (1 - gamma);
          fitted_c = std::max(fitted_c, bbl::to_double(Rational(excess * side / static_cast<unsigned long>(n))));
        }
      }
  // The excess over the atom is at most n gamma / N, so C <= max gamma = 1/2.
  return {axis_mismatch == 0 && fitted_c <= 0.5,
          fmt("%zu combos, axis value mismatches %zu, fitted C = %.6g", combos, axis_mismatch, fitted_c)};
}

Outcome mean_mass_suite() {
  std::size_t failures = 0, oracle_mismatch = 0;
  double worst = INFINITY;
  const std::vector<Rational> ps{q(1, 4), q(1, 2), Rational(1)};
  for (std::uint64_t trial = 0; trial < 1000; ++trial) {
    bbl::Rng rng = bbl::trial_rng(2021, trial);
    const std::size_t d = 1 + trial % 2;
    const auto f = bbl::random_function(rng, d, 20, 100);
    const auto g = bbl::random_function(rng, d, 20, 100);
    const Rational& p = ps[trial % 3];
    const auto r = bbl::check_functional_bm(f, g, bbl::MeanSpec(p));
    const double expected = oracle::total(oracle::sup_convolution(f, g, bbl::to_double(p)));
    if (std::fabs(r.sum_h_star - expected) > 1e-12 * expected) ++oracle_mismatch;
    worst = std::min(worst, r.sum_h_star - r.mean_of_masses);
    if (!(r.sum_h_star >= r.mean_of_masses - 1e-9)) ++failures;
  }
  return {failures == 0 && oracle_mismatch == 0,
          fmt("1000 pairs, failures %zu, oracle mismatches %zu, worst slack %.3g", failures, oracle_mismatch, worst)};
}

Outcome beta_sequence_suite() {
  std::size_t failures = 0;
  double worst = INFINITY;
  for (std::uint64_t trial = 0; trial < 1000; ++trial) {
    bbl::Rng rng = bbl::trial_rng(2022, trial);
    const auto t = bbl::random_beta_tuple(rng);
    const auto r = bbl::beta_convex_check(t.betas, t.c, t.n, t.alpha, t.p);
    worst = std::min(worst, r.lhs - r.rhs);
    if (!(r.lhs >= r.rhs - 1e-9)) ++failures;
  }
  return {failures == 0, fmt("1000 tuples, failures %zu, worst slack %.3g", failures, worst)};
}

Outcome lifting_suite() {
  std::size_t failures = 0, recovery_failures = 0, closed_form_mismatch = 0;
  double worst = INFINITY, worst_gap = 0;
  for (std::uint64_t trial = 0; trial < 500; ++trial) {
    bbl::Rng rng = bbl::trial_rng(2014, trial);
    const std::size_t d = 1 + trial % 2;
    const auto domain = bbl::integer_addition_domain(d);
    const auto [f, g] = bbl::random_equal_mass_pair(rng, d, 20);
    const auto c = bbl::lift_check(domain, f, g);
    worst = std::min(worst, c.sum_h_star / c.sum_f - 1);
    if (!(c.sum_h_star >= c.sum_f)) ++failures;

    const auto a = bbl::random_point_set(rng, d, 15);
    const auto b = bbl::random_point_set(rng, d, 15);
    const auto r = bbl::recover_bm(domain, a, b);
    if (!(r.sum_h_star / domain.constant() >= 1)) ++recovery_failures;
    // Closed form recomputed here from |A+B| and the textbook mean.
    const double p = domain.mean().p_value();
    const double closed = static_cast<double>(oracle::sumset(a.points(), b.points()).size()) *
                          oracle::mean(-p, 0.5, 1.0 / static_cast<double>(a.size()), 1.0 / static_cast<double>(b.size()));
    const double gap = std::max(std::fabs(r.sum_h_star - r.closed_form), std::fabs(r.closed_form - closed));
    worst_gap = std::max(worst_gap, gap);
    if (gap > 1e-12) ++closed_form_mismatch;
  }
  return {failures == 0 && recovery_failures == 0 && closed_form_mismatch == 0,
          fmt("500 pairs, lift failures %zu (worst rel slack %.3g), recovery failures %zu, closed-form mismatches %zu "
              "(max gap %.1e)",
              failures, worst, recovery_failures, closed_form_mismatch, worst_gap)};
}

Outcome cube_suite() {
  // d = 3: every pair, with midpoints from the coordinate oracle.
  const std::size_t d3 = 3;
  std::vector<std::uint32_t> mid(64);
  for (std::uint32_t x = 0; x < 8; ++x)
    for (std::uint32_t y = 0; y < 8; ++y) {
      bbl::Point px(d3), py(d3);
      for (std::size_t i = 0; i < d3; ++i) {
        px[i] = x >> i & 1;
        py[i] = y >> i & 1;
      }
      for (const auto& m : oracle::cube_midpoints(px, py)) mid[x * 8 + y] |= 1u << (m[0] | m[1] << 1 | m[2] << 2);
    }
  std::uint64_t pairs3 = 0, violations3 = 0;
  for (std::uint32_t a = 1; a < 256; ++a)
    for (std::uint32_t b = 1; b < 256; ++b) {
      std::uint32_t m = 0;
      for (std::uint32_t x = 0; x < 8; ++x)
        if (a >> x & 1)
          for (std::uint32_t y = 0; y < 8; ++y)
            if (b >> y & 1) m |= mid[x * 8 + y];
      ++pairs3;
      const auto sm = static_cast<std::uint64_t>(std::popcount(m));
      if (sm * sm < static_cast<std::uint64_t>(std::popcount(a)) * static_cast<std::uint64_t>(std::popcount(b)))
        ++violations3;
    }
  const auto lib3 = bbl::cube_bm_exhaustive(3);

  // d = 4: 10^5 random pairs.
  bbl::Rng rng(2047);
  std::uint64_t violations4 = 0;
  for (int i = 0; i < 100000; ++i) {
    bbl::CubeMask a = 0, b = 0;
    while (a == 0) a = static_cast<bbl::CubeMask>(rng() & 0xffff);
    while (b == 0) b = static_cast<bbl::CubeMask>(rng() & 0xffff);
    const auto sm = static_cast<std::uint64_t>(std::popcount(bbl::cube_midpoint_set(4, a, b)));
    if (sm * sm < static_cast<std::uint64_t>(std::popcount(a)) * static_cast<std::uint64_t>(std::popcount(b)))
      ++violations4;
  }
  // d = 4 over every pair, one representative per isometry orbit of A.
  const auto lib4 = bbl::cube_bm_exhaustive(4);

  const bool ok = violations3 == 0 && lib3.violations == 0 && lib3.pairs_covered == pairs3 && violations4 == 0 &&
                  lib4.violations == 0;
  return {ok, fmt("d=3 %llu pairs, %llu violations (library %llu); d=4 sampled 100000, %llu violations; d=4 all "
                  "%llu pairs via %llu representatives, %llu violations",
                  static_cast<unsigned long long>(pairs3), static_cast<unsigned long long>(violations3),
                  static_cast<unsigned long long>(lib3.violations), static_cast<unsigned long long>(violations4),
                  static_cast<unsigned long long>(lib4.pairs_covered),
                  static_cast<unsigned long long>(lib4.pairs_checked),
                  static_cast<unsigned long long>(lib4.violations))};
}

Outcome spread_pair_suite() {
  std::size_t checked = 0, failures = 0, not_met = 0;
  double worst = INFINITY;
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    bbl::Rng rng = bbl::trial_rng(2012, trial);
    const auto [f, g] = bbl::random_spread_pair(rng, 50, 80);
    const auto r = bbl::verify_main_theorem(f, g, bbl::MeanSpec(q(1, 4)), 0.1, 3, 5);
    if (r.verdict == bbl::Verdict::hypothesis_not_met) {
      ++not_met;
      continue;
    }
    ++checked;
    // Independent recomputation of sum h* and the bound.
    const double sum_h = oracle::total(oracle::sup_convolution(f, g, 0.25));
    const double bound = (2 - 0.1) * bbl::to_double(bbl::mass(f));
    worst = std::min(worst, (sum_h - bound) / bbl::to_double(bbl::mass(f)));
    if (r.verdict != bbl::Verdict::pass || sum_h < bound) ++failures;
  }
  return {failures == 0 && checked > 0,
          fmt("%zu non-degenerate pairs, failures %zu, hypothesis-not-met %zu, worst normalised slack %.3g", checked,
              failures, not_met, worst)};
}

Outcome transport_suite() {
  std::size_t cake_bad = 0, round_trip_bad = 0, breakpoints = 0;
  for (std::uint64_t trial = 0; trial < 1000; ++trial) {
    bbl::Rng rng = bbl::trial_rng(2008, trial);
    const std::size_t d = 1 + trial % 3;
    const auto [f, g] = bbl::random_equal_mass_pair(rng, d, 50);
    const auto lf = bbl::layer_cake(f), lg = bbl::layer_cake(g);
    if (lf.integral() != bbl::mass(f) || lg.integral() != bbl::mass(g)) ++cake_bad;
    const auto forward = bbl::transport_map(lg, lf);
    const auto backward = bbl::transport_map(lf, lg);
    for (const auto& b : forward.breakpoints()) {
      ++breakpoints;
      if (backward(b.value) != b.t || forward(b.t) != b.value || lg.cumulative(b.t) != lf.cumulative(b.value))
        ++round_trip_bad;
    }
  }

  std::size_t deriv_bad = 0, fd_mismatch = 0;
  double worst = INFINITY;
  bbl::Rng rng(2088);
  std::uniform_real_distribution<double> logv(std::log(0.05), std::log(20.0));
  std::uniform_int_distribution<std::int64_t> pnum(1, 300), wt(1, 99);
  for (int i = 0; i < 1000; ++i) {
    const Rational p = q(pnum(rng), 100), lambda = q(wt(rng), 100);
    const double t = std::exp(logv(rng)), T = std::exp(logv(rng)), slope = std::exp(logv(rng));
    const auto bound = bbl::mean_curve_derivative_bound(bbl::MeanSpec(p, lambda), t, T, slope);
    const double pd = bbl::to_double(p), ld = bbl::to_double(lambda);
    const double fd = oracle::derivative(
        [&](double s) { return oracle::mean(-pd, ld, s, T + slope * (s - t)); }, t, 1e-6);
    if (std::fabs(bound.lhs - fd) > 1e-6 * std::max(1.0, std::fabs(fd))) ++fd_mismatch;
    worst = std::min(worst, bound.lhs - bound.rhs);
    if (!(bound.lhs >= bound.rhs - 1e-6)) ++deriv_bad;
  }
  return {cake_bad == 0 && round_trip_bad == 0 && deriv_bad == 0 && fd_mismatch == 0,
          fmt("1000 pairs: layer-cake mismatches %zu, round-trip mismatches %zu over %zu breakpoints; 1000 points: "
              "derivative bound failures %zu, finite-difference mismatches %zu, worst slack %.3g",
              cake_bad, round_trip_bad, breakpoints, deriv_bad, fd_mismatch, worst)};
}

std::string campaign_output(const std::vector<std::string>& args, const char* threads) {
  setenv("BBL_LAB_THREADS", threads, 1);
  std::ostringstream out, err;
  const int code = bbl::cli::run(args, out, err);
  if (code == bbl::cli::kExitError) throw std::runtime_error("campaign failed: " + err.str());
  auto doc = bbl::Json::parse(out.str());
  doc.erase("timing");
  return doc.dump();
}

Outcome determinism() {
  std::size_t differing = 0, runs = 0;
  for (const char* mode :
       {"lemma21", "lemma22", "prop14", "cube-exhaustive", "cube-sampled", "main-theorem", "transport", "meanderiv"}) {
    const std::vector<std::string> args{"bbl-lab", "campaign", "--mode", mode,  "--seed", "12345",
                                        "--trials", "60",      "--d",    std::string(mode) == "main-theorem" ? "1" : std::string(mode) == "cube-sampled" ? "3" : "2"};
    const auto first = campaign_output(args, "1");
    const auto second = campaign_output(args, "3");
    ++runs;
    if (first != second) ++differing;
  }
  unsetenv("BBL_LAB_THREADS");
  return {differing == 0, fmt("%zu modes run twice (1 and 3 workers), %zu differ outside timing", runs, differing)};
}

}  // namespace

int main() {
  bool all = true;
  all &= run_criterion(1, "extremal family mass identity and admissibility", 10, extremal_identity);
  all &= run_criterion(2, "extremal family hyperplane coverage", 5, extremal_coverage);
  all &= run_criterion(3, "sup-convolution dominates the mean of the masses", 60, mean_mass_suite);
  all &= run_criterion(4, "beta-sequence convexity bound", 10, beta_sequence_suite);
  all &= run_criterion(5, "lifting on integer addition and indicator recovery", 60, lifting_suite);
  all &= run_criterion(6, "Hamming cube midpoint inequality", 300, cube_suite);
  all &= run_criterion(7, "discrete functional inequality on spread pairs", 0, spread_pair_suite);
  all &= run_criterion(8, "layer cake, transport and mean-curve derivative", 0, transport_suite);
  all &= run_criterion(9, "campaign determinism", 0, determinism);
  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAILED");
  return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
