#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "iabnet/analytic.hpp"

namespace iabnet::opt {

struct GaParams {
  int population_size = 40;
  int generations = 50;
  int chromosome_bits = 10;
  double crossover_rate = 0.8;
  double mutation_rate = 0.02;  // per bit
  int elitism_count = 2;
  std::uint64_t seed = 1;

  // Throws DomainError unless rates lie in [0,1], sizes are >= 1 and the
  // chromosome can express every cache size up to cache_max.
  void validate(int cache_max) const;
};

struct OptimizationState {
  int iteration = 0;
  double eta = 0.0;
  int cache = 0;
  double apt_after_spectrum = 0.0;  // APT(eta_t, C_{t-1})
  double apt_after_cache = 0.0;     // APT(eta_t, C_t)
};

struct SolveResult {
  int c_star = 0;
  double eta_star = 0.0;
  double p_s_tr_star = 0.0;  // from the full-power identity at c_star
  double apt_star = 0.0;
  std::vector<OptimizationState> trace;
  bool converged = false;
  bool restarts_disagree = false;  // multistart finals spread beyond 1%
};

struct JcspaParams {
  double epsilon = 1e-5;  // relative: |apt2 - apt1| <= eps * max(1, apt2)
  int iter_max = 20;
  int restarts = 3;  // first start is C=0, the rest are seeded random
  std::uint64_t seed = 1;
  GaParams ga;
};

// Constraint values of the cache/power subproblem: f1 carries the backhaul
// branch, f2 the pure access branch; min(f1, f2) equals the full APT.
std::pair<double, double> fitness_terms(int cache_files, double eta,
                                        const analytic::AptEvaluator& eval);

struct SpectrumSolution {
  double eta = 0.0;
  double value = 0.0;
};

// Max over eta of the min of two linear functions; candidates are the two
// endpoints and their single crossing.  Ties resolve to the smaller eta.
SpectrumSolution solve_spectrum_partition(int cache_files, const analytic::AptEvaluator& eval);

struct CacheSolution {
  int cache = 0;
  double value = 0.0;
};

// Genetic search over binary-encoded cache sizes; out-of-range decodes are
// clamped to the feasible maximum.  `incumbent` >= 0 joins the initial
// population, which makes the best-ever fitness at least its fitness.
CacheSolution gcdpa(double eta, const analytic::AptEvaluator& eval, const GaParams& ga,
                    int incumbent = -1);

// Exact argmax over every feasible cache size; ties to the smaller C.
CacheSolution exhaustive_cache(double eta, const analytic::AptEvaluator& eval);

// Alternating spectrum/cache optimization with multistart; the trace of the
// best start is returned and is monotone non-decreasing in APT.
SolveResult jcspa(const analytic::AptEvaluator& eval, const JcspaParams& params = {});

enum class BaselineKind { NoCacheDsa, OptCacheFsa, FullCacheDsa, UniformCacheDsa };

// NoCacheDsa: C=0, spectrum optimized.  OptCacheFsa: eta fixed at 0.5,
// exhaustive cache.  FullCacheDsa: C at the feasible maximum, spectrum
// optimized.  UniformCacheDsa: the joint loop with the uniform hit ratio.
SolveResult baseline(BaselineKind kind, const analytic::AptEvaluator& eval,
                     const JcspaParams& params = {});

const char* to_string(BaselineKind kind);

}  // namespace iabnet::opt
