#include "iabnet/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "iabnet/model.hpp"
#include "iabnet/rng.hpp"

namespace iabnet::opt {

namespace {

double apt_total(const analytic::AptEvaluator& eval, double eta, int cache) {
  return eval.apt(eta, cache).total;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = base ^ (a * 0x9E3779B97F4A7C15ULL) ^ (b * 0xC2B2AE3D27D4EB4FULL);
  return splitmix64_next(s);
}

}  // namespace

void GaParams::validate(int cache_max) const {
  if (population_size < 1) throw DomainError("GaParams: population_size must be >= 1");
  if (generations < 1) throw DomainError("GaParams: generations must be >= 1");
  if (chromosome_bits < 1 || chromosome_bits > 30)
    throw DomainError("GaParams: chromosome_bits must lie in [1, 30]");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
    throw DomainError("GaParams: crossover_rate must lie in [0, 1]");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
    throw DomainError("GaParams: mutation_rate must lie in [0, 1]");
  if (elitism_count < 0 || elitism_count > population_size)
    throw DomainError("GaParams: elitism_count must lie in [0, population_size]");
  if (!((1u << chromosome_bits) > static_cast<unsigned>(cache_max)))
    throw DomainError("GaParams: 2^chromosome_bits must exceed cache_max");
}

std::pair<double, double> fitness_terms(int cache_files, double eta,
                                        const analytic::AptEvaluator& eval) {
  // grouped exactly as the APT composition so min(f1, f2) reproduces it
  const analytic::AptBreakdown b = eval.apt(eta, cache_files);
  return {b.backhaul_uncached + b.cached_sbs + b.mbs_term,
          b.access_sbs_uncached + b.cached_sbs + b.mbs_term};
}

SpectrumSolution solve_spectrum_partition(int cache_files, const analytic::AptEvaluator& eval) {
  const double ph = eval.hit(cache_files);
  const analytic::CoverageTriple cov = eval.provider().at(cache_files);
  const double a1 = eval.coef_backhaul() * (1.0 - ph) * cov.backhaul;  // L1 at eta=0
  const double b1 = eval.coef_access() * ph * cov.sbs + eval.coef_mbs() * cov.mbs - a1;
  const double b2 = eval.coef_access() * cov.sbs + eval.coef_mbs() * cov.mbs;  // L2 slope

  double cands[3] = {0.0, 1.0, -1.0};
  int n_cands = 2;
  if (b2 > b1) {
    const double x = a1 / (b2 - b1);
    if (x > 0.0 && x < 1.0) cands[n_cands++] = x;
  }
  std::sort(cands, cands + n_cands);

  SpectrumSolution best{0.0, -std::numeric_limits<double>::infinity()};
  for (int i = 0; i < n_cands; ++i) {
    const double v = apt_total(eval, cands[i], cache_files);
    if (v > best.value) best = {cands[i], v};
  }
  return best;
}

CacheSolution exhaustive_cache(double eta, const analytic::AptEvaluator& eval) {
  CacheSolution best{0, -std::numeric_limits<double>::infinity()};
  for (int c = 0; c <= eval.max_cache(); ++c) {
    const double v = apt_total(eval, eta, c);
    if (v > best.value) best = {c, v};
  }
  return best;
}

CacheSolution gcdpa(double eta, const analytic::AptEvaluator& eval, const GaParams& ga,
                    int incumbent) {
  const int c_max = eval.max_cache();
  ga.validate(eval.config().cache_max);
  RngStream rng(ga.seed);
  const unsigned mask = (1u << ga.chromosome_bits) - 1u;
  const int pop_n = ga.population_size;

  auto decode = [&](unsigned chrom) { return std::min(static_cast<int>(chrom), c_max); };

  std::vector<double> fitness_memo(static_cast<std::size_t>(c_max) + 1,
                                   std::numeric_limits<double>::quiet_NaN());
  auto fitness = [&](unsigned chrom) {
    const int c = decode(chrom);
    double& f = fitness_memo[c];
    if (std::isnan(f)) f = apt_total(eval, eta, c);
    return f;
  };

  std::vector<unsigned> pop(pop_n);
  for (auto& chrom : pop) chrom = static_cast<unsigned>(rng.next()) & mask;
  if (incumbent >= 0 && incumbent <= c_max) pop[0] = static_cast<unsigned>(incumbent);

  CacheSolution best{0, -std::numeric_limits<double>::infinity()};
  std::vector<double> fit(pop_n);
  std::vector<int> order(pop_n);
  std::vector<unsigned> next(pop_n);

  for (int gen = 0; gen < ga.generations; ++gen) {
    for (int i = 0; i < pop_n; ++i) {
      fit[i] = fitness(pop[i]);
      const int c = decode(pop[i]);
      if (fit[i] > best.value || (fit[i] == best.value && c < best.cache))
        best = {c, fit[i]};
    }
    // elites first (fitness desc, smaller decoded C on ties), then offspring
    for (int i = 0; i < pop_n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (fit[a] != fit[b]) return fit[a] > fit[b];
      if (decode(pop[a]) != decode(pop[b])) return decode(pop[a]) < decode(pop[b]);
      return pop[a] < pop[b];
    });
    next.clear();
    for (int e = 0; e < ga.elitism_count && e < pop_n; ++e) next.push_back(pop[order[e]]);

    auto tournament = [&]() {
      const int a = static_cast<int>(rng.next() % pop_n);
      const int b = static_cast<int>(rng.next() % pop_n);
      return fit[a] >= fit[b] ? pop[a] : pop[b];
    };
    while (static_cast<int>(next.size()) < pop_n) {
      unsigned p1 = tournament();
      unsigned p2 = tournament();
      if (rng.uniform01() < ga.crossover_rate && ga.chromosome_bits > 1) {
        const int cut =
            1 + static_cast<int>(rng.next() % static_cast<unsigned>(ga.chromosome_bits - 1));
        const unsigned low = (1u << cut) - 1u;
        const unsigned c1 = (p1 & ~low) | (p2 & low);
        const unsigned c2 = (p2 & ~low) | (p1 & low);
        p1 = c1;
        p2 = c2;
      }
      for (int b = 0; b < ga.chromosome_bits; ++b)
        if (rng.uniform01() < ga.mutation_rate) p1 ^= (1u << b);
      for (int b = 0; b < ga.chromosome_bits; ++b)
        if (rng.uniform01() < ga.mutation_rate) p2 ^= (1u << b);
      next.push_back(p1);
      if (static_cast<int>(next.size()) < pop_n) next.push_back(p2);
    }
    pop.swap(next);
  }
  for (int i = 0; i < pop_n; ++i) {
    const double f = fitness(pop[i]);
    const int c = decode(pop[i]);
    if (f > best.value || (f == best.value && c < best.cache)) best = {c, f};
  }
  return best;
}

namespace {

SolveResult run_bcd(const analytic::AptEvaluator& eval, const JcspaParams& params, int c0,
                    std::uint64_t restart_index) {
  SolveResult res;
  int c_prev = c0;
  double eta_t = 0.0;
  double apt2 = 0.0;
  for (int t = 1; t <= params.iter_max; ++t) {
    const SpectrumSolution sp = solve_spectrum_partition(c_prev, eval);
    eta_t = sp.eta;
    const double apt1 = sp.value;

    GaParams ga = params.ga;
    ga.seed = derive_seed(params.seed, restart_index, static_cast<std::uint64_t>(t));
    const CacheSolution cs = gcdpa(eta_t, eval, ga, c_prev);
    apt2 = cs.value;
    c_prev = cs.cache;

    res.trace.push_back({t, eta_t, c_prev, apt1, apt2});
    if (std::fabs(apt2 - apt1) <= params.epsilon * std::max(1.0, std::fabs(apt2))) {
      res.converged = true;
      break;
    }
  }
  res.c_star = c_prev;
  res.eta_star = eta_t;
  res.apt_star = apt2;
  res.p_s_tr_star = transmit_power_sbs(res.c_star, eval.config());
  return res;
}

}  // namespace

SolveResult jcspa(const analytic::AptEvaluator& eval, const JcspaParams& params) {
  const int c_max = eval.max_cache();
  SolveResult best;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool have = false;
  const int restarts = std::max(params.restarts, 1);
  for (int k = 0; k < restarts; ++k) {
    int c0 = 0;
    if (k > 0) {
      RngStream st = RngStream::substream(params.seed, 0xC0FFEEULL + k);
      c0 = static_cast<int>(st.next() % static_cast<std::uint64_t>(c_max + 1));
    }
    SolveResult r = run_bcd(eval, params, c0, static_cast<std::uint64_t>(k));
    lo = std::min(lo, r.apt_star);
    hi = std::max(hi, r.apt_star);
    const bool better =
        !have || r.apt_star > best.apt_star ||
        (r.apt_star == best.apt_star &&
         (r.c_star < best.c_star || (r.c_star == best.c_star && r.eta_star < best.eta_star)));
    if (better) best = std::move(r);
    have = true;
  }
  best.restarts_disagree = hi > lo && (hi - lo) > 0.01 * std::max(std::fabs(hi), 1e-300);
  return best;
}

SolveResult baseline(BaselineKind kind, const analytic::AptEvaluator& eval,
                     const JcspaParams& params) {
  SolveResult res;
  switch (kind) {
    case BaselineKind::NoCacheDsa: {
      const SpectrumSolution sp = solve_spectrum_partition(0, eval);
      res.c_star = 0;
      res.eta_star = sp.eta;
      res.apt_star = sp.value;
      res.trace.push_back({1, sp.eta, 0, sp.value, sp.value});
      res.converged = true;
      break;
    }
    case BaselineKind::OptCacheFsa: {
      const CacheSolution cs = exhaustive_cache(0.5, eval);
      res.c_star = cs.cache;
      res.eta_star = 0.5;
      res.apt_star = cs.value;
      res.trace.push_back({1, 0.5, cs.cache, cs.value, cs.value});
      res.converged = true;
      break;
    }
    case BaselineKind::FullCacheDsa: {
      const int c = eval.max_cache();
      const SpectrumSolution sp = solve_spectrum_partition(c, eval);
      res.c_star = c;
      res.eta_star = sp.eta;
      res.apt_star = sp.value;
      res.trace.push_back({1, sp.eta, c, sp.value, sp.value});
      res.converged = true;
      break;
    }
    case BaselineKind::UniformCacheDsa: {
      analytic::AptEvaluator uniform_eval(eval.config(), eval.provider(),
                                          analytic::HitModel::Uniform);
      return jcspa(uniform_eval, params);
    }
  }
  res.p_s_tr_star = transmit_power_sbs(res.c_star, eval.config());
  return res;
}

const char* to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::NoCacheDsa: return "no_cache_dsa";
    case BaselineKind::OptCacheFsa: return "opt_cache_fsa";
    case BaselineKind::FullCacheDsa: return "full_cache_dsa";
    case BaselineKind::UniformCacheDsa: return "uniform_cache_dsa";
  }
  return "unknown";
}

}  // namespace iabnet::opt
