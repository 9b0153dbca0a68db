#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "iabnet/config.hpp"
#include "iabnet/model.hpp"
#include "iabnet/types.hpp"

namespace iabnet::analytic {

struct CoverageResult {
  double value = 0.0;          // probability in [0, 1]
  double est_abs_error = 0.0;  // quadrature error estimate
  std::uint64_t evaluations = 0;  // integrand samples, inner + outer
};

enum class CoverageKind { SbsAccess, MbsAccess, Backhaul };

// Which association the density/Laplace machinery describes.
enum class AssocDest { UserToSbs, UserToMbs, SbsToMbsBackhaul };

// PDF of the distance to the nearest tier-k BS, split by the realized link
// state of that link: P_k(r) * exp(-pi*lambda*r^2) * 2*pi*lambda*r.
double nearest_distance_pdf(double r, Tier tier, LinkState link, const SystemConfig& cfg);

// Radius inside which a tier-`other` BS on link `other_link` would deliver
// more biased mean power than the serving link (tier `dest`, link `desired`)
// at distance r.  Mean fading, main-lobe gains both sides.
double exclusion_radius(AssocDest dest, LinkState desired, Tier other, LinkState other_link,
                        double r, int cache_files, const SystemConfig& cfg);

// Density of the event "probe associates via `link` with the `dest` target
// at distance r": nearest-distance PDF times the void factor of every
// competing (tier, link) pair.
double association_density(AssocDest dest, LinkState link, double r, int cache_files,
                           const SystemConfig& cfg);

// Exponent contributed by interferer tier `interferer` to the conditional
// Laplace transform of interference at the serving link's SINR threshold.
// The three lobe-gain classes are folded into one integral per interferer
// path, weighted by their probabilities.
double interference_exponent(AssocDest dest, LinkState link, Tier interferer, double r,
                             double gamma_lin, int cache_files, const SystemConfig& cfg);

// exp(-sum of interference exponents over the interfering tiers);
// value in (0, 1], monotone non-increasing in gamma.
double laplace_interference(AssocDest dest, LinkState link, double r, double gamma_lin,
                            int cache_files, const SystemConfig& cfg);

// Joint probability of association with the given target and SINR above
// gamma, integrating noise factor * Laplace transform * association density
// over both link states.
CoverageResult coverage(CoverageKind kind, double gamma_lin, int cache_files,
                        const SystemConfig& cfg);
CoverageResult coverage_sbs(double gamma_lin, int cache_files, const SystemConfig& cfg);
CoverageResult coverage_mbs(double gamma_lin, int cache_files, const SystemConfig& cfg);
CoverageResult coverage_backhaul(double gamma_lin, const SystemConfig& cfg);

// Noise-limited distribution of the best faded SNR offered by one tier:
// 1 - exp(-pi*l*A_NL^(2/a_NL)*Gamma(2/a_NL+1)*xi0^(2/a_NL) - 2*pi*l*Y(xi0)),
// xi0 = P_k B_k M^2 / (N0 gamma), Y evaluated by nested quadrature over the
// blockage-thinned propagation process.
double coverage_noise_limited(Tier tier, double gamma_lin, int cache_files,
                              const SystemConfig& cfg);

// Same quantity through the PGFL route, as a single distance-domain
// integral with the interference transform forced to 1.  Independent check
// of the closed form.
double coverage_snr_only_integral(Tier tier, double gamma_lin, int cache_files,
                                  const SystemConfig& cfg);

enum class BindingSide { Access, Backhaul };

struct AptBreakdown {
  double access_sbs_uncached = 0.0;  // bits/s/m^2
  double backhaul_uncached = 0.0;
  double cached_sbs = 0.0;
  double mbs_term = 0.0;
  double total = 0.0;
  BindingSide binding_side = BindingSide::Access;
};

struct CoverageTriple {
  double sbs = 0.0;
  double mbs = 0.0;
  double backhaul = 0.0;
};

// Per-config memo of coverage values keyed by (kind, gamma, C); safe for
// concurrent readers, insertions are idempotent recomputes.
class CoverageMemo {
public:
  explicit CoverageMemo(SystemConfig cfg);
  const SystemConfig& config() const { return cfg_; }

  CoverageResult get(CoverageKind kind, double gamma_lin, int cache_files) const;
  CoverageTriple triple(double gamma_lin, int cache_files) const;

  // Fill the memo for a C-grid at one threshold, fanning integrals out to
  // `workers` threads.  Results are identical to on-demand computation.
  void precompute(double gamma_lin, const std::vector<int>& cache_grid, int workers) const;

  std::size_t size() const;

private:
  struct Key {
    int kind;
    std::uint64_t gamma_bits;
    int cache;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };

  SystemConfig cfg_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<Key, CoverageResult, KeyHash> map_;
};

// Source of the coverage triple used by the APT algebra; the analytic memo
// is the production implementation, tests may substitute closed-form fakes.
class CoverageProvider {
public:
  virtual ~CoverageProvider() = default;
  virtual CoverageTriple at(int cache_files) const = 0;
};

class MemoCoverageProvider final : public CoverageProvider {
public:
  MemoCoverageProvider(const CoverageMemo& memo, double gamma_lin)
      : memo_(&memo), gamma_(gamma_lin) {}
  CoverageTriple at(int cache_files) const override { return memo_->triple(gamma_, cache_files); }

private:
  const CoverageMemo* memo_;
  double gamma_;
};

enum class HitModel { Zipf, Uniform };

// APT algebra over a coverage source: hit-ratio model, spectrum split and
// the min over access/backhaul capacity of the uncached traffic.
class AptEvaluator {
public:
  AptEvaluator(const SystemConfig& cfg, const CoverageProvider& provider,
               HitModel hit_model = HitModel::Zipf);

  AptBreakdown apt(double eta, int cache_files) const;
  double hit(int cache_files) const;
  int max_cache() const { return max_cache_; }
  const SystemConfig& config() const { return cfg_; }
  const CoverageProvider& provider() const { return *provider_; }
  HitModel hit_model() const { return hit_model_; }

  double coef_backhaul() const { return a1_; }  // A1 = lambda_m W log2(1+g0)
  double coef_access() const { return a2_; }    // A2 = lambda_s W log2(1+g0)
  double coef_mbs() const { return a3_; }       // A3 = lambda_m W log2(1+g0)

private:
  SystemConfig cfg_;
  const CoverageProvider* provider_;
  HitModel hit_model_;
  int max_cache_;
  double a1_, a2_, a3_;
  std::vector<double> zipf_prefix_;  // prefix sums of f^-gamma_p
};

// One-shot APT at Table-scale cost (three coverage integrals per distinct C).
AptBreakdown apt(double eta, int cache_files, const SystemConfig& cfg);
AptBreakdown apt(double eta, int cache_files, const CoverageMemo& memo);

// Flag-gated diagnostic sink for outer coverage integrand samples.
// Not thread-safe; intended for single-run debugging dumps.
using IntegrandSink = std::function<void(CoverageKind, LinkState, double r, double value)>;
void set_integrand_sink(IntegrandSink sink);

}  // namespace iabnet::analytic
