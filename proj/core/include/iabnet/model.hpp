#pragma once

#include <array>

#include "iabnet/config.hpp"
#include "iabnet/types.hpp"

namespace iabnet {

// Closed-form sub-models: Zipf popularity, cache hit ratio, the power
// budget split between transmission and caching, blockage, path loss and
// the sectorial antenna gain distribution.

// Popularity of file f (1-based rank), f^-gp / sum_g g^-gp.
double zipf_popularity(int file_rank, const SystemConfig& cfg);

// Hit ratio of a highest-popularity-first cache of C files.
double hit_ratio(int cache_files, const SystemConfig& cfg);

// Baseline placement where every file is cached with identical probability.
double uniform_hit_ratio(int cache_files, const SystemConfig& cfg);

// Transmit power left after circuit and cache power at full power draw:
// P_tr = (P_max - P_fc - omega_ca * s * C) / rho.  Throws
// InfeasibleCacheError when the result would be <= 0.
double transmit_power_sbs(int cache_files, const SystemConfig& cfg);

// MBS caches the whole library, so its transmit power is a config constant.
double transmit_power_mbs(const SystemConfig& cfg);

// Largest C with positive SBS transmit power, capped at cache_max.
int max_feasible_cache(const SystemConfig& cfg);

double los_probability(double r_m, const SystemConfig& cfg);

// A_k * r^-alpha_k for the given link state; r must be positive.
double path_loss(double r_m, LinkState link, const SystemConfig& cfg);

struct GainDistribution {
  struct Entry {
    GainClass cls;
    double gain;         // linear product of the two lobe gains
    double probability;
  };
  std::array<Entry, 3> entries;  // MainMain, MainSide, SideSide

  double gain_of(GainClass cls) const;
  double probability_of(GainClass cls) const;
  double expected_gain() const;
};

// Random gain of an unaligned (interfering) link under the sectorial
// pattern: each end points its main lobe at the interferee independently
// with probability theta / 2pi.
GainDistribution gain_distribution(const SystemConfig& cfg);

}  // namespace iabnet
