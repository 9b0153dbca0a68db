#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "iabnet/analytic.hpp"
#include "iabnet/config.hpp"
#include "iabnet/rng.hpp"
#include "iabnet/types.hpp"

namespace iabnet::mc {

// System-level oracle: sampled PPP deployments with independent per-link
// blockage, unit-mean Rayleigh (exponential) fading and sectorial lobe
// gains.  Association maximizes biased mean received power over every BS;
// SINR sums the realized interferer field.

struct PointSample {
  double x = 0.0, y = 0.0;   // position, probe at the origin
  double r = 0.0;            // distance to probe
  LinkState link = LinkState::LOS;   // realized state of the link to the probe
  double fading = 1.0;       // exp(1) draw, applied at SINR evaluation
  GainClass gain = GainClass::SideSide;  // lobe alignment when interfering
  double mean_path_gain = 0.0;           // A_k r^-alpha_k for the realized state
};

struct NetworkRealization {
  std::vector<PointSample> sbs;
  std::vector<PointSample> mbs;
  double window_radius = 0.0;
};

enum class ProbeKind { User, BackhaulSbs };

struct Association {
  bool served = false;  // false when no candidate BS exists in the window
  Tier tier = Tier::MBS;
  std::size_t index = 0;
  LinkState link = LinkState::LOS;
};

struct EmpiricalEstimate {
  double mean = 0.0;
  double ci_half_width_99 = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
};

enum class CoverageEventKind { SbsAccess, MbsAccess, Backhaul };

NetworkRealization sample_realization(const SystemConfig& cfg, RngStream& stream);

// Argmax of P^tr * B * A_k * r^-alpha_k over the candidate set (both tiers
// for a user, MBSs only for a backhaul probe), mean fading and main-lobe
// gains on every candidate link.
Association associate(const NetworkRealization& net, ProbeKind probe, int cache_files,
                      const SystemConfig& cfg);

// Linear SINR of the served link.  The serving BS contributes main-lobe
// gain and is excluded from its own tier's interference sum; the backhaul
// link sees MBS-tier interference only.
double sinr(const NetworkRealization& net, const Association& assoc, ProbeKind probe,
            int cache_files, const SystemConfig& cfg);

using TraceSink = std::function<void(std::uint64_t realization, const Association&, double sinr)>;

// Joint probability of (associated with `kind`) and (SINR > gamma), plus
// the conditional form and the association frequency from the same pass.
struct CoverageEstimate {
  EmpiricalEstimate joint;
  EmpiricalEstimate conditional;
  double association_frequency = 0.0;
};

CoverageEstimate empirical_coverage_detailed(CoverageEventKind kind, double gamma_lin,
                                             int cache_files, std::uint64_t n,
                                             std::uint64_t seed, const SystemConfig& cfg,
                                             int workers = 1,
                                             const TraceSink* trace = nullptr);

EmpiricalEstimate empirical_coverage(CoverageEventKind kind, double gamma_lin, int cache_files,
                                     std::uint64_t n, std::uint64_t seed,
                                     const SystemConfig& cfg, int workers = 1);

// All three coverage kinds across a gamma grid in one pass over the
// realizations (SINRs are computed once and compared with every threshold).
struct CoverageGrid {
  std::vector<double> gammas;
  // joint[kind][gamma index]; kind order: SbsAccess, MbsAccess, Backhaul
  std::vector<std::vector<EmpiricalEstimate>> joint;
  double assoc_sbs = 0.0;
  double assoc_mbs = 0.0;
};

CoverageGrid empirical_coverage_grid(const std::vector<double>& gammas, int cache_files,
                                     std::uint64_t n, std::uint64_t seed,
                                     const SystemConfig& cfg, int workers = 1);

struct AssociationFrequencies {
  double sbs = 0.0;
  double mbs = 0.0;
  double unserved = 0.0;
};

AssociationFrequencies empirical_association(int cache_files, std::uint64_t n,
                                             std::uint64_t seed, const SystemConfig& cfg,
                                             int workers = 1);

// Interference-free oracle for the noise-limited closed form: probability
// that the best faded SNR offered by one tier exceeds gamma.
EmpiricalEstimate empirical_noise_limited(Tier tier, double gamma_lin, int cache_files,
                                          std::uint64_t n, std::uint64_t seed,
                                          const SystemConfig& cfg, int workers = 1);
std::vector<EmpiricalEstimate> empirical_noise_limited_grid(Tier tier,
                                                            const std::vector<double>& gammas,
                                                            int cache_files, std::uint64_t n,
                                                            std::uint64_t seed,
                                                            const SystemConfig& cfg,
                                                            int workers = 1);

// Empirical APT: the coverage estimates from one pass plugged into the
// throughput algebra (estimator composition, not per-realization rates).
struct AptEmpirical {
  EmpiricalEstimate total;
  analytic::AptBreakdown breakdown;
  analytic::CoverageTriple coverage;
};

AptEmpirical empirical_apt(double eta, int cache_files, double gamma0_lin, std::uint64_t n,
                           std::uint64_t seed, const SystemConfig& cfg, int workers = 1);

}  // namespace iabnet::mc
