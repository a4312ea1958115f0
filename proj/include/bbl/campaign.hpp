#pragma once

// Seeded property campaigns. Trials are independent and may run on several
// threads; records are merged in trial order so a report depends only on the
// configuration.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "bbl/io.hpp"
#include "bbl/rational.hpp"

namespace bbl {

enum class CampaignMode {
  lemma21,          ///< sum h* >= M_{-p,1/2}(sum f, sum g) on random pairs
  lemma22,          ///< beta convexity bound on random sequences
  prop14,           ///< lifting on Z^d addition plus indicator recovery
  cube_exhaustive,  ///< |M| >= sqrt(|A||B|) over every pair on {0,1}^d
  cube_sampled,     ///< the same on random pairs
  main_theorem,     ///< sum h* >= (2^d - eps) sum f on spread 1-D pairs
  transport,        ///< layer-cake identity and transport round trip
  meanderiv,        ///< derivative bound of the mean curve
};

CampaignMode parse_campaign_mode(std::string_view name);
std::string to_string(CampaignMode mode);

struct CampaignConfig {
  CampaignMode mode = CampaignMode::lemma21;
  std::uint64_t seed = 1;
  std::size_t trials = 100;
  std::size_t dimension = 1;
  std::size_t support_max = 20;
  std::optional<Rational> p;  ///< mode default when absent
  Rational lambda{1, 2};
  double epsilon = 0.1;
  std::size_t n = 3;
  std::int64_t direction_bound = 5;
  std::size_t threads = 1;
};

/// Worker count from BBL_LAB_THREADS, else the hardware concurrency.
std::size_t configured_threads();

/// Throws invalid_argument for trials == 0 or unsupported dimensions.
Report run_campaign(const CampaignConfig& config);

}  // namespace bbl
