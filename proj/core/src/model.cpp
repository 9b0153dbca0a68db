#include "iabnet/model.hpp"

#include <cmath>

namespace iabnet {

namespace {

constexpr double kPi = 3.14159265358979323846;

// sum_{f=1..n} f^-gp, plain partial sum.
double zipf_partial_sum(int n, double gp) {
  double s = 0.0;
  for (int f = 1; f <= n; ++f) s += std::pow(static_cast<double>(f), -gp);
  return s;
}

}  // namespace

double zipf_popularity(int file_rank, const SystemConfig& cfg) {
  if (file_rank < 1 || file_rank > cfg.library_files)
    throw DomainError("zipf_popularity: file rank outside [1, F]");
  return std::pow(static_cast<double>(file_rank), -cfg.zipf_gamma) /
         zipf_partial_sum(cfg.library_files, cfg.zipf_gamma);
}

double hit_ratio(int cache_files, const SystemConfig& cfg) {
  if (cache_files < 0 || cache_files > cfg.library_files)
    throw DomainError("hit_ratio: cache size outside [0, F]");
  if (cache_files == 0) return 0.0;
  return zipf_partial_sum(cache_files, cfg.zipf_gamma) /
         zipf_partial_sum(cfg.library_files, cfg.zipf_gamma);
}

double uniform_hit_ratio(int cache_files, const SystemConfig& cfg) {
  if (cache_files < 0 || cache_files > cfg.library_files)
    throw DomainError("uniform_hit_ratio: cache size outside [0, F]");
  return static_cast<double>(cache_files) / static_cast<double>(cfg.library_files);
}

double transmit_power_sbs(int cache_files, const SystemConfig& cfg) {
  double p = (cfg.p_s_max_w - cfg.p_s_fc_w -
              cfg.omega_ca_w_per_bit * cfg.file_size_bits * cache_files) /
             cfg.rho_s;
  if (!(p > 0.0))
    throw InfeasibleCacheError("transmit_power_sbs: cache of " + std::to_string(cache_files) +
                               " files leaves no transmit power");
  return p;
}

double transmit_power_mbs(const SystemConfig& cfg) {
  return (cfg.p_m_max_w - cfg.p_m_fc_w -
          cfg.omega_ca_w_per_bit * cfg.file_size_bits * cfg.library_files) /
         cfg.rho_m;
}

int max_feasible_cache(const SystemConfig& cfg) {
  double per_file = cfg.omega_ca_w_per_bit * cfg.file_size_bits;
  int c = cfg.cache_max;
  if (per_file > 0.0) {
    double budget = (cfg.p_s_max_w - cfg.p_s_fc_w) / per_file;
    if (budget < static_cast<double>(c)) c = static_cast<int>(std::floor(budget));
  }
  if (c < 0) c = 0;
  // Exact exhaustion of the budget leaves zero transmit power.
  while (c > 0 && cfg.p_s_max_w - cfg.p_s_fc_w - per_file * c <= 0.0) --c;
  return c;
}

double los_probability(double r_m, const SystemConfig& cfg) {
  if (r_m < 0.0) throw DomainError("los_probability: negative distance");
  return std::exp(-cfg.beta_blockage * r_m);
}

double path_loss(double r_m, LinkState link, const SystemConfig& cfg) {
  if (!(r_m > 0.0)) throw DomainError("path_loss: distance must be > 0");
  return link == LinkState::LOS ? cfg.a_los * std::pow(r_m, -cfg.alpha_los)
                                : cfg.a_nlos * std::pow(r_m, -cfg.alpha_nlos);
}

double GainDistribution::gain_of(GainClass cls) const {
  for (const auto& e : entries)
    if (e.cls == cls) return e.gain;
  return 0.0;
}

double GainDistribution::probability_of(GainClass cls) const {
  for (const auto& e : entries)
    if (e.cls == cls) return e.probability;
  return 0.0;
}

double GainDistribution::expected_gain() const {
  double g = 0.0;
  for (const auto& e : entries) g += e.gain * e.probability;
  return g;
}

GainDistribution gain_distribution(const SystemConfig& cfg) {
  const double th = cfg.theta_rad;
  const double M = cfg.gain_main;
  const double m = cfg.gain_side;
  const double two_pi = 2.0 * kPi;
  GainDistribution d;
  d.entries = {{
      {GainClass::MainMain, M * M, (th * th) / (two_pi * two_pi)},
      {GainClass::MainSide, M * m, th * (two_pi - th) / (2.0 * kPi * kPi)},
      {GainClass::SideSide, m * m, (two_pi - th) * (two_pi - th) / (two_pi * two_pi)},
  }};
  return d;
}

}  // namespace iabnet
