#include "bbl/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "bbl/lifting.hpp"
#include "bbl/random_instances.hpp"
#include "bbl/supconv.hpp"

namespace bbl {

namespace {

const std::pair<CampaignMode, const char*> kModeNames[] = {
    {CampaignMode::lemma21, "lemma21"},
    {CampaignMode::lemma22, "lemma22"},
    {CampaignMode::prop14, "prop14"},
    {CampaignMode::cube_exhaustive, "cube-exhaustive"},
    {CampaignMode::cube_sampled, "cube-sampled"},
    {CampaignMode::main_theorem, "main-theorem"},
    {CampaignMode::transport, "transport"},
    {CampaignMode::meanderiv, "meanderiv"},
};

using Records = std::vector<CheckRecord>;

double scaled_tolerance(double reference) { return kTolerance * std::max(1.0, std::fabs(reference)); }

std::size_t trial_dimension(const CampaignConfig& c, std::size_t trial) { return 1 + trial % c.dimension; }

Records mean_mass_trial(const CampaignConfig& c, std::size_t trial) {
  Rng rng = trial_rng(c.seed, trial);
  static const Rational cycle[] = {Rational(1, 4), Rational(1, 2), Rational(1)};
  const MeanSpec spec(c.p ? *c.p : cycle[trial % 3], c.lambda);
  const std::size_t d = trial_dimension(c, trial);
  const SparseFunction f = random_function(rng, d, c.support_max);
  const SparseFunction g = random_function(rng, d, c.support_max);
  const auto check = check_functional_bm(f, g, spec);
  return {make_record("lemma21", check.sum_h_star, check.mean_of_masses, Relation::at_least,
                      scaled_tolerance(check.mean_of_masses), static_cast<std::int64_t>(trial))};
}

Records beta_sequence_trial(const CampaignConfig& c, std::size_t trial) {
  Rng rng = trial_rng(c.seed, trial);
  BetaTuple t = random_beta_tuple(rng);
  if (c.p) t.p = to_double(*c.p);
  const auto check = beta_convex_check(t.betas, t.c, t.n, t.alpha, t.p);
  return {make_record("lemma22", check.lhs, check.rhs, Relation::at_least, scaled_tolerance(check.rhs),
                      static_cast<std::int64_t>(trial))};
}

Records lifting_trial(const CampaignConfig& c, std::size_t trial) {
  Rng rng = trial_rng(c.seed, trial);
  const std::size_t d = trial_dimension(c, trial);
  const LiftingDomain domain = integer_addition_domain(d, c.p, c.lambda);
  const auto [f, g] = random_equal_mass_pair(rng, d, c.support_max);
  const auto lift = lift_check(domain, f, g);
  const auto id = static_cast<std::int64_t>(trial);
  Records out;
  out.push_back(make_record("prop14", lift.sum_h_star, lift.constant * lift.sum_f, Relation::at_least,
                            scaled_tolerance(lift.sum_f), id));
  const auto rec = recover_bm(domain, support(f), support(g));
  out.push_back(make_record("recover_bm", rec.sum_h_star, domain.constant(), Relation::at_least, kTolerance, id));
  out.push_back(make_record("recover_closed_form", rec.sum_h_star, rec.closed_form, Relation::equal,
                            1e-12 * std::max(1.0, rec.closed_form), id));
  return out;
}

Records cube_sampled_trial(const CampaignConfig& c, std::size_t trial) {
  Rng rng = trial_rng(c.seed, trial);
  const std::size_t d = c.dimension;
  const LiftingDomain domain = cube_midpoint_domain(d);
  const std::uint64_t full = (std::uint64_t{1} << (1u << d)) - 1;
  std::uniform_int_distribution<std::uint64_t> pick(1, full);
  const auto to_set = [d](std::uint64_t mask) {
    PointSet s(d);
    for (std::uint32_t v = 0; v < (1u << d); ++v) {
      if (!(mask >> v & 1u)) continue;
      Point x(d);
      for (std::size_t j = 0; j < d; ++j) x[j] = (v >> j) & 1u;
      s.insert(x);
    }
    return s;
  };
  const PointSet a = to_set(pick(rng));
  const PointSet b = to_set(pick(rng));
  const auto check = check_set_bm(domain, a, b);
  return {make_record("cube_bm", check.lhs, check.rhs, Relation::at_least, 1e-12, static_cast<std::int64_t>(trial))};
}

Records spread_pair_trial(const CampaignConfig& c, std::size_t trial) {
  Rng rng = trial_rng(c.seed, trial);
  const MeanSpec spec(c.p ? *c.p : Rational(1, 4), c.lambda);
  const auto [f, g] = random_spread_pair(rng, 50, std::max<std::size_t>(50, c.support_max));
  const auto report = verify_main_theorem(f, g, spec, c.epsilon, c.n, c.direction_bound);
  const double sum_f = to_double(report.sum_f);
  return {make_record("main_theorem", report.sum_h, report.bound, Relation::at_least, kTolerance * sum_f,
                      static_cast<std::int64_t>(trial), report.nondegeneracy.ok)};
}

Records transport_trial(const CampaignConfig& c, std::size_t trial) {
  Rng rng = trial_rng(c.seed, trial);
  const std::size_t d = trial_dimension(c, trial);
  const auto [f, g] = random_equal_mass_pair(rng, d, c.support_max);
  const LevelDecomposition lf = layer_cake(f);
  const LevelDecomposition lg = layer_cake(g);
  const auto id = static_cast<std::int64_t>(trial);
  Records out;
  out.push_back(make_record("layer_cake", to_double(lf.integral()), to_double(f.mass()), Relation::equal, 0.0, id));
  out.push_back(make_record("layer_cake_exact", lf.integral() == f.mass() && lg.integral() == g.mass() ? 1 : 0, 1,
                            Relation::equal, 0.0, id));

  const TransportMap forward = transport_map(lg, lf);
  const TransportMap backward = transport_map(lf, lg);
  std::size_t mismatches = 0;
  for (const auto& b : forward.breakpoints()) {
    if (backward(b.value) != b.t) ++mismatches;
    if (lg.cumulative(b.t) != lf.cumulative(b.value)) ++mismatches;
  }
  out.push_back(make_record("transport_roundtrip", static_cast<double>(mismatches), 0, Relation::equal, 0.0, id));
  return out;
}

Records meanderiv_trial(const CampaignConfig& c, std::size_t trial) {
  Rng rng = trial_rng(c.seed, trial);
  std::uniform_int_distribution<long> permille(1, 999);
  std::uniform_int_distribution<long> exponent(1, 3000);
  std::uniform_real_distribution<double> log_scale(std::log(1e-2), std::log(1e2));
  const Rational lambda = fraction(permille(rng), 1000);
  const MeanSpec spec(c.p ? *c.p : fraction(exponent(rng), 1000), lambda);
  const double t = std::exp(log_scale(rng));
  const double T = std::exp(log_scale(rng));
  const double slope = std::exp(log_scale(rng));
  const auto bound = mean_curve_derivative_bound(spec, t, T, slope);
  return {make_record("meanderiv", bound.lhs, bound.rhs, Relation::at_least, scaled_tolerance(bound.rhs),
                      static_cast<std::int64_t>(trial))};
}

Records run_trial(const CampaignConfig& c, std::size_t trial) {
  switch (c.mode) {
    case CampaignMode::lemma21:
      return mean_mass_trial(c, trial);
    case CampaignMode::lemma22:
      return beta_sequence_trial(c, trial);
    case CampaignMode::prop14:
      return lifting_trial(c, trial);
    case CampaignMode::cube_sampled:
      return cube_sampled_trial(c, trial);
    case CampaignMode::main_theorem:
      return spread_pair_trial(c, trial);
    case CampaignMode::transport:
      return transport_trial(c, trial);
    case CampaignMode::meanderiv:
      return meanderiv_trial(c, trial);
    case CampaignMode::cube_exhaustive:
      break;
  }
  throw Error(ErrorCode::invalid_argument, "mode has no per-trial runner");
}

void validate(const CampaignConfig& c) {
  if (c.trials == 0) throw Error(ErrorCode::invalid_argument, "trials must be at least 1");
  if (c.dimension == 0) throw Error(ErrorCode::invalid_argument, "dimension must be positive");
  if (c.support_max == 0) throw Error(ErrorCode::invalid_argument, "support_max must be positive");
  if (c.n == 0) throw Error(ErrorCode::invalid_argument, "n must be positive");
  if (c.direction_bound <= 0) throw Error(ErrorCode::invalid_argument, "direction bound must be positive");
  MeanSpec(0, c.lambda);
  switch (c.mode) {
    case CampaignMode::cube_exhaustive:
    case CampaignMode::cube_sampled:
      if (c.dimension > 4) throw Error(ErrorCode::invalid_argument, "cube campaigns support d <= 4");
      break;
    case CampaignMode::main_theorem:
      if (c.dimension != 1) throw Error(ErrorCode::invalid_argument, "main-theorem campaign runs in d = 1");
      if (c.p && (sgn(*c.p) <= 0 || *c.p >= 1))
        throw Error(ErrorCode::out_of_range, "main-theorem campaign needs 0 < p < 1");
      break;
    case CampaignMode::prop14:
    case CampaignMode::transport:
    case CampaignMode::lemma21:
      if (c.dimension > 3) throw Error(ErrorCode::invalid_argument, "campaign supports d <= 3");
      if (c.p && sgn(*c.p) < 0) throw Error(ErrorCode::out_of_range, "p must be nonnegative");
      break;
    case CampaignMode::lemma22:
    case CampaignMode::meanderiv:
      if (c.p && sgn(*c.p) <= 0) throw Error(ErrorCode::out_of_range, "p must be positive");
      break;
  }
}

Json parameters_json(const CampaignConfig& c) {
  Json j;
  j["mode"] = to_string(c.mode);
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["d"] = c.dimension;
  j["support_max"] = c.support_max;
  j["p"] = c.p ? Json(to_string(*c.p)) : Json("mode-default");
  j["lambda"] = to_string(c.lambda);
  j["epsilon"] = c.epsilon;
  j["n"] = c.n;
  j["direction_bound"] = c.direction_bound;
  return j;
}

}  // namespace

CampaignMode parse_campaign_mode(std::string_view name) {
  for (const auto& [mode, text] : kModeNames)
    if (name == text) return mode;
  throw Error(ErrorCode::invalid_argument, "unknown campaign mode '" + std::string(name) + "'");
}

std::string to_string(CampaignMode mode) {
  for (const auto& [m, text] : kModeNames)
    if (m == mode) return text;
  return "unknown";
}

std::size_t configured_threads() {
  if (const char* env = std::getenv("BBL_LAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Report run_campaign(const CampaignConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  Report report;
  report.command = "campaign";
  report.parameters = parameters_json(config);

  if (config.mode == CampaignMode::cube_exhaustive) {
    const CubeBmSummary s = cube_bm_exhaustive(config.dimension);
    report.records.push_back(make_record("cube_bm_exhaustive", s.worst_ratio, 1.0, Relation::at_least, 1e-12));
    report.records.push_back(
        make_record("cube_bm_violations", static_cast<double>(s.violations), 0.0, Relation::equal, 0.0));
    report.details = {{"pairs_checked", s.pairs_checked},
                      {"pairs_covered", s.pairs_covered},
                      {"worst_a_mask", s.worst_a},
                      {"worst_b_mask", s.worst_b}};
  } else {
    std::vector<Records> per_trial(config.trials);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&] {
      for (std::size_t i = next++; i < config.trials; i = next++) {
        try {
          per_trial[i] = run_trial(config, i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = config.trials;
        }
      }
    };
    const std::size_t threads = std::clamp<std::size_t>(config.threads, 1, config.trials);
    {
      std::vector<std::jthread> pool;
      for (std::size_t k = 1; k < threads; ++k) pool.emplace_back(worker);
      worker();
    }
    if (failure) std::rethrow_exception(failure);
    for (auto& records : per_trial)
      for (auto& r : records) report.records.push_back(std::move(r));
  }
  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace bbl
