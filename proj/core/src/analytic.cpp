#include "iabnet/analytic.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <mutex>
#include <thread>

#include "iabnet/quadrature.hpp"

namespace iabnet::analytic {

namespace {

constexpr double kPi = 3.14159265358979323846;

IntegrandSink g_sink;

double pow_neg(double u, double alpha) {
  if (alpha == 2.0) return 1.0 / (u * u);
  if (alpha == 4.0) {
    const double s = u * u;
    return 1.0 / (s * s);
  }
  return std::pow(u, -alpha);
}

double a_of(LinkState k, const SystemConfig& cfg) {
  return k == LinkState::LOS ? cfg.a_los : cfg.a_nlos;
}
double alpha_of(LinkState k, const SystemConfig& cfg) {
  return k == LinkState::LOS ? cfg.alpha_los : cfg.alpha_nlos;
}

struct TierSide {
  Tier tier;
  double lambda;
  double pb;  // transmit power * association bias
};

// Serving side plus the tiers whose points compete and interfere.
struct LinkContext {
  TierSide serving;
  std::array<TierSide, 2> others;
  int n_others;  // 1 for backhaul (MBS only), 2 for access
};

LinkContext make_context(AssocDest dest, int cache_files, const SystemConfig& cfg) {
  const double pb_m = transmit_power_mbs(cfg) * cfg.bias_m;
  LinkContext ctx{};
  switch (dest) {
    case AssocDest::UserToSbs: {
      const double pb_s = transmit_power_sbs(cache_files, cfg) * cfg.bias_s;
      ctx.serving = {Tier::SBS, cfg.lambda_s, pb_s};
      ctx.others = {{{Tier::SBS, cfg.lambda_s, pb_s}, {Tier::MBS, cfg.lambda_m, pb_m}}};
      ctx.n_others = 2;
      break;
    }
    case AssocDest::UserToMbs: {
      const double pb_s = transmit_power_sbs(cache_files, cfg) * cfg.bias_s;
      ctx.serving = {Tier::MBS, cfg.lambda_m, pb_m};
      ctx.others = {{{Tier::SBS, cfg.lambda_s, pb_s}, {Tier::MBS, cfg.lambda_m, pb_m}}};
      ctx.n_others = 2;
      break;
    }
    case AssocDest::SbsToMbsBackhaul: {
      ctx.serving = {Tier::MBS, cfg.lambda_m, pb_m};
      ctx.others = {{{Tier::MBS, cfg.lambda_m, pb_m}, {Tier::MBS, 0.0, pb_m}}};
      ctx.n_others = 1;
      break;
    }
  }
  return ctx;
}

// Biased-power tie radius: a tier-`other` BS on path k closer than this
// would beat the serving link (path j, distance r).  Power and gain factors
// cancel within a tier, so d == 1 there and the radius is power-free.
double exclusion_radius_impl(const LinkContext& ctx, LinkState j, const TierSide& other,
                             LinkState k, double r, const SystemConfig& cfg) {
  if (other.tier == ctx.serving.tier && k == j) return r;
  const double d = other.tier == ctx.serving.tier ? 1.0 : other.pb / ctx.serving.pb;
  const double aj = a_of(j, cfg), ak = a_of(k, cfg);
  const double alj = alpha_of(j, cfg), alk = alpha_of(k, cfg);
  return std::pow(d * ak / aj, 1.0 / alk) * std::pow(r, alj / alk);
}

// Sum over both interferer paths of the PGFL exponent for one tier, the
// three lobe-gain classes folded into each path's integral.
double tier_exponent(const LinkContext& ctx, LinkState j, const TierSide& other, double r,
                     double gamma, const SystemConfig& cfg, std::uint64_t* evals) {
  if (other.lambda <= 0.0 || gamma <= 0.0) return 0.0;
  const GainDistribution gd = gain_distribution(cfg);
  const double d = other.tier == ctx.serving.tier ? 1.0 : other.pb / ctx.serving.pb;
  const double aj = a_of(j, cfg);
  const double alj = alpha_of(j, cfg);
  const double m2 = cfg.gain_main * cfg.gain_main;
  const double r_pow = std::pow(r, alj);

  QuadratureOptions opt{cfg.numeric.quad_rel_tol, cfg.numeric.quad_abs_tol, 2000};
  double sum = 0.0;
  for (LinkState k : {LinkState::LOS, LinkState::NLOS}) {
    const double ak = a_of(k, cfg);
    const double alk = alpha_of(k, cfg);
    const double x = exclusion_radius_impl(ctx, j, other, k, r, cfg);
    // z_G(u) = gamma * d * G * A_k u^-alpha_k / (M^2 A_j r^-alpha_j)
    std::array<double, 3> cg{};
    for (int gi = 0; gi < 3; ++gi)
      cg[gi] = gamma * d * gd.entries[gi].gain * ak * r_pow / (m2 * aj);
    const double beta = cfg.beta_blockage;
    auto integrand = [&, k](double u) {
      const double upw = pow_neg(u, alk);
      double w = 0.0;
      for (int gi = 0; gi < 3; ++gi) {
        const double t = cg[gi] * upw;
        w += gd.entries[gi].probability * (t / (1.0 + t));
      }
      const double plos = std::exp(-beta * u);
      const double pk = (k == LinkState::LOS) ? plos : 1.0 - plos;
      return pk * u * w;
    };
    double scale = std::max(x, std::pow(cg[1], 1.0 / alk));
    if (k == LinkState::LOS && beta > 0.0) scale = std::min(scale, std::max(x, 5.0 / beta));
    if (!(scale > 0.0)) scale = 1.0;
    QuadratureResult q =
        integrate_semi_infinite(integrand, x, scale, opt, cfg.numeric.inner_epsilon);
    if (evals) *evals += q.evaluations;
    sum += q.value;
  }
  return 2.0 * kPi * other.lambda * sum;
}

// Association void product over every competing (tier, path), the serving
// pair included (its radius is r, giving the nearest-distance factor).
double void_exponent(const LinkContext& ctx, LinkState j, double r, const SystemConfig& cfg) {
  double e = 0.0;
  for (int i = 0; i < ctx.n_others; ++i) {
    for (LinkState k : {LinkState::LOS, LinkState::NLOS}) {
      const double x = exclusion_radius_impl(ctx, j, ctx.others[i], k, r, cfg);
      e += kPi * ctx.others[i].lambda * x * x;
    }
  }
  return e;
}

AssocDest dest_of(CoverageKind kind) {
  switch (kind) {
    case CoverageKind::SbsAccess: return AssocDest::UserToSbs;
    case CoverageKind::MbsAccess: return AssocDest::UserToMbs;
    default: return AssocDest::SbsToMbsBackhaul;
  }
}

}  // namespace

void set_integrand_sink(IntegrandSink sink) { g_sink = std::move(sink); }

double nearest_distance_pdf(double r, Tier tier, LinkState link, const SystemConfig& cfg) {
  if (r < 0.0) throw DomainError("nearest_distance_pdf: negative distance");
  if (r == 0.0) return 0.0;
  const double lambda = tier == Tier::SBS ? cfg.lambda_s : cfg.lambda_m;
  const double plos = std::exp(-cfg.beta_blockage * r);
  const double pk = link == LinkState::LOS ? plos : 1.0 - plos;
  return pk * std::exp(-kPi * lambda * r * r) * 2.0 * kPi * lambda * r;
}

double exclusion_radius(AssocDest dest, LinkState desired, Tier other, LinkState other_link,
                        double r, int cache_files, const SystemConfig& cfg) {
  if (!(r > 0.0)) throw DomainError("exclusion_radius: distance must be > 0");
  const LinkContext ctx = make_context(dest, cache_files, cfg);
  const TierSide side = other == Tier::SBS
                            ? TierSide{Tier::SBS, cfg.lambda_s, ctx.others[0].pb}
                            : TierSide{Tier::MBS, cfg.lambda_m,
                                       transmit_power_mbs(cfg) * cfg.bias_m};
  if (dest == AssocDest::SbsToMbsBackhaul && other == Tier::SBS)
    throw DomainError("exclusion_radius: backhaul has no SBS competitors");
  return exclusion_radius_impl(ctx, desired, side, other_link, r, cfg);
}

double association_density(AssocDest dest, LinkState link, double r, int cache_files,
                           const SystemConfig& cfg) {
  if (!(r > 0.0)) throw DomainError("association_density: distance must be > 0");
  const LinkContext ctx = make_context(dest, cache_files, cfg);
  const double plos = std::exp(-cfg.beta_blockage * r);
  const double pk = link == LinkState::LOS ? plos : 1.0 - plos;
  return pk * 2.0 * kPi * ctx.serving.lambda * r * std::exp(-void_exponent(ctx, link, r, cfg));
}

double interference_exponent(AssocDest dest, LinkState link, Tier interferer, double r,
                             double gamma_lin, int cache_files, const SystemConfig& cfg) {
  if (!(r > 0.0)) throw DomainError("interference_exponent: distance must be > 0");
  if (!(gamma_lin >= 0.0)) throw DomainError("interference_exponent: gamma must be >= 0");
  const LinkContext ctx = make_context(dest, cache_files, cfg);
  for (int i = 0; i < ctx.n_others; ++i)
    if (ctx.others[i].tier == interferer)
      return tier_exponent(ctx, link, ctx.others[i], r, gamma_lin, cfg, nullptr);
  throw DomainError("interference_exponent: tier does not interfere with this destination");
}

double laplace_interference(AssocDest dest, LinkState link, double r, double gamma_lin,
                            int cache_files, const SystemConfig& cfg) {
  if (!(r > 0.0)) throw DomainError("laplace_interference: distance must be > 0");
  if (!(gamma_lin >= 0.0)) throw DomainError("laplace_interference: gamma must be >= 0");
  const LinkContext ctx = make_context(dest, cache_files, cfg);
  double e = 0.0;
  for (int i = 0; i < ctx.n_others; ++i)
    e += tier_exponent(ctx, link, ctx.others[i], r, gamma_lin, cfg, nullptr);
  return std::exp(-e);
}

CoverageResult coverage(CoverageKind kind, double gamma_lin, int cache_files,
                        const SystemConfig& cfg) {
  if (!(gamma_lin > 0.0)) throw DomainError("coverage: gamma must be > 0");
  const AssocDest dest = dest_of(kind);
  const LinkContext ctx = make_context(dest, cache_files, cfg);
  if (ctx.serving.lambda <= 0.0) return {};

  const double m2 = cfg.gain_main * cfg.gain_main;
  const double r_up = std::sqrt(std::log(1.0 / cfg.numeric.void_epsilon) /
                                (kPi * ctx.serving.lambda));
  QuadratureOptions outer_opt{cfg.numeric.quad_rel_tol, cfg.numeric.quad_abs_tol, 4000};

  CoverageResult res;
  for (LinkState j : {LinkState::LOS, LinkState::NLOS}) {
    const double aj = a_of(j, cfg);
    const double alj = alpha_of(j, cfg);
    auto outer = [&, j](double r) {
      const double plos = std::exp(-cfg.beta_blockage * r);
      const double pk = j == LinkState::LOS ? plos : 1.0 - plos;
      double density = pk * 2.0 * kPi * ctx.serving.lambda * r;
      if (density <= 0.0) return 0.0;
      const double ve = void_exponent(ctx, j, r, cfg);
      if (ve > 700.0) return 0.0;  // association impossible this far out
      density *= std::exp(-ve);
      const double snorm = m2 * aj * pow_neg(r, alj);  // mean gain without P*B
      const double noise = std::exp(-gamma_lin * cfg.noise_w / (ctx.serving.pb * snorm));
      double lap_exp = 0.0;
      for (int i = 0; i < ctx.n_others; ++i)
        lap_exp += tier_exponent(ctx, j, ctx.others[i], r, gamma_lin, cfg, &res.evaluations);
      const double v = noise * std::exp(-lap_exp) * density;
      if (g_sink) g_sink(kind, j, r, v);
      return v;
    };
    QuadratureResult q = integrate(outer, 0.0, r_up, outer_opt);
    res.value += q.value;
    res.est_abs_error += q.est_abs_error;
    res.evaluations += q.evaluations;
  }
  if (res.value < 0.0) res.value = 0.0;
  return res;
}

CoverageResult coverage_sbs(double gamma_lin, int cache_files, const SystemConfig& cfg) {
  return coverage(CoverageKind::SbsAccess, gamma_lin, cache_files, cfg);
}
CoverageResult coverage_mbs(double gamma_lin, int cache_files, const SystemConfig& cfg) {
  return coverage(CoverageKind::MbsAccess, gamma_lin, cache_files, cfg);
}
CoverageResult coverage_backhaul(double gamma_lin, const SystemConfig& cfg) {
  return coverage(CoverageKind::Backhaul, gamma_lin, 0, cfg);
}

double coverage_noise_limited(Tier tier, double gamma_lin, int cache_files,
                              const SystemConfig& cfg) {
  if (!(gamma_lin > 0.0)) throw DomainError("coverage_noise_limited: gamma must be > 0");
  const double lambda = tier == Tier::SBS ? cfg.lambda_s : cfg.lambda_m;
  if (lambda <= 0.0) return 0.0;
  const double pb = tier == Tier::SBS ? transmit_power_sbs(cache_files, cfg) * cfg.bias_s
                                      : transmit_power_mbs(cfg) * cfg.bias_m;
  const double xi0 = pb * cfg.gain_main * cfg.gain_main / (cfg.noise_w * gamma_lin);
  if (!(xi0 > 0.0)) return 0.0;

  const double e_nl = 2.0 / cfg.alpha_nlos;
  const double term1 =
      kPi * lambda * std::pow(cfg.a_nlos, e_nl) * std::tgamma(e_nl + 1.0) * std::pow(xi0, e_nl);

  QuadratureOptions opt{cfg.numeric.quad_rel_tol, cfg.numeric.quad_abs_tol, 2000};
  const double beta = cfg.beta_blockage;
  // H_i(xi) over the blockage-thinned propagation process, phi = r^alpha / A.
  auto h_term = [&](double a, double alpha, double xi) {
    const double e = 2.0 / alpha;
    auto inner = [&](double phi) {
      return std::pow(phi, e) * std::exp(-beta * std::pow(a * phi, 1.0 / alpha) - phi / xi);
    };
    double scale = xi * (e + 1.0);
    if (beta > 0.0) scale = std::min(scale, std::pow(1.0 / beta, alpha) / a);
    QuadratureResult q = integrate_semi_infinite(inner, 0.0, scale, opt);
    return std::pow(a, e) / alpha * q.value;
  };
  // xi = xi0 t^2 flattens the xi^(2/alpha - 1) endpoint behaviour.
  auto outer = [&](double t) {
    const double xi = xi0 * t * t;
    if (!(xi > 0.0)) return 0.0;
    const double hl = h_term(cfg.a_los, cfg.alpha_los, xi);
    const double hn = h_term(cfg.a_nlos, cfg.alpha_nlos, xi);
    return (hl - hn) / (xi * xi) * 2.0 * xi0 * t;
  };
  QuadratureResult y = integrate(outer, 0.0, 1.0, opt);
  const double expo = term1 + 2.0 * kPi * lambda * y.value;
  return 1.0 - std::exp(-expo);
}

double coverage_snr_only_integral(Tier tier, double gamma_lin, int cache_files,
                                  const SystemConfig& cfg) {
  if (!(gamma_lin > 0.0)) throw DomainError("coverage_snr_only_integral: gamma must be > 0");
  const double lambda = tier == Tier::SBS ? cfg.lambda_s : cfg.lambda_m;
  if (lambda <= 0.0) return 0.0;
  const double pb = tier == Tier::SBS ? transmit_power_sbs(cache_files, cfg) * cfg.bias_s
                                      : transmit_power_mbs(cfg) * cfg.bias_m;
  const double xi0 = pb * cfg.gain_main * cfg.gain_main / (cfg.noise_w * gamma_lin);
  const double beta = cfg.beta_blockage;
  auto f = [&](double u) {
    const double plos = std::exp(-beta * u);
    const double cl = std::exp(-std::pow(u, cfg.alpha_los) / (cfg.a_los * xi0));
    const double cn = std::exp(-std::pow(u, cfg.alpha_nlos) / (cfg.a_nlos * xi0));
    return 2.0 * kPi * lambda * u * (plos * cl + (1.0 - plos) * cn);
  };
  double scale = std::pow(cfg.a_los * xi0, 1.0 / cfg.alpha_los);
  if (beta > 0.0) scale = std::min(scale, 20.0 / beta);
  scale = std::max(scale, 1.0);
  QuadratureOptions opt{cfg.numeric.quad_rel_tol, cfg.numeric.quad_abs_tol, 4000};
  QuadratureResult q = integrate_semi_infinite(f, 0.0, scale, opt);
  return 1.0 - std::exp(-q.value);
}

// ---------------------------------------------------------------------------
// Coverage memo

CoverageMemo::CoverageMemo(SystemConfig cfg) : cfg_(std::move(cfg)) {}

std::size_t CoverageMemo::KeyHash::operator()(const Key& k) const noexcept {
  std::uint64_t h = static_cast<std::uint64_t>(k.kind) * 0x9E3779B97F4A7C15ULL;
  h ^= k.gamma_bits + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  h ^= static_cast<std::uint64_t>(k.cache) * 0xBF58476D1CE4E5B9ULL + (h << 6) + (h >> 2);
  return static_cast<std::size_t>(h);
}

namespace {
std::uint64_t bits_of(double x) {
  std::uint64_t b;
  static_assert(sizeof b == sizeof x);
  std::memcpy(&b, &x, sizeof b);
  return b;
}
}  // namespace

CoverageResult CoverageMemo::get(CoverageKind kind, double gamma_lin, int cache_files) const {
  // Backhaul coverage carries no cache dependence.
  if (kind == CoverageKind::Backhaul) cache_files = 0;
  const Key key{static_cast<int>(kind), bits_of(gamma_lin), cache_files};
  {
    std::shared_lock lk(mu_);
    auto it = map_.find(key);
    if (it != map_.end()) return it->second;
  }
  CoverageResult r = coverage(kind, gamma_lin, cache_files, cfg_);
  std::unique_lock lk(mu_);
  auto [it, inserted] = map_.try_emplace(key, r);
  return it->second;
}

CoverageTriple CoverageMemo::triple(double gamma_lin, int cache_files) const {
  CoverageTriple t;
  t.sbs = get(CoverageKind::SbsAccess, gamma_lin, cache_files).value;
  t.mbs = get(CoverageKind::MbsAccess, gamma_lin, cache_files).value;
  t.backhaul = get(CoverageKind::Backhaul, gamma_lin, 0).value;
  return t;
}

void CoverageMemo::precompute(double gamma_lin, const std::vector<int>& cache_grid,
                              int workers) const {
  struct Task {
    CoverageKind kind;
    int cache;
  };
  std::vector<Task> tasks;
  tasks.push_back({CoverageKind::Backhaul, 0});
  for (int c : cache_grid) {
    tasks.push_back({CoverageKind::SbsAccess, c});
    tasks.push_back({CoverageKind::MbsAccess, c});
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      get(tasks[i].kind, gamma_lin, tasks[i].cache);
    }
  };
  if (workers <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

std::size_t CoverageMemo::size() const {
  std::shared_lock lk(mu_);
  return map_.size();
}

// ---------------------------------------------------------------------------
// APT

AptEvaluator::AptEvaluator(const SystemConfig& cfg, const CoverageProvider& provider,
                           HitModel hit_model)
    : cfg_(cfg), provider_(&provider), hit_model_(hit_model) {
  max_cache_ = max_feasible_cache(cfg_);
  const double rate = cfg_.bandwidth_hz * std::log2(1.0 + cfg_.gamma0_lin);
  a1_ = cfg_.lambda_m * rate;
  a2_ = cfg_.lambda_s * rate;
  a3_ = cfg_.lambda_m * rate;
  zipf_prefix_.resize(cfg_.library_files + 1);
  zipf_prefix_[0] = 0.0;
  for (int f = 1; f <= cfg_.library_files; ++f)
    zipf_prefix_[f] =
        zipf_prefix_[f - 1] + std::pow(static_cast<double>(f), -cfg_.zipf_gamma);
}

double AptEvaluator::hit(int cache_files) const {
  if (cache_files < 0 || cache_files > cfg_.library_files)
    throw DomainError("AptEvaluator::hit: cache size outside [0, F]");
  if (hit_model_ == HitModel::Uniform)
    return static_cast<double>(cache_files) / static_cast<double>(cfg_.library_files);
  return zipf_prefix_[cache_files] / zipf_prefix_[cfg_.library_files];
}

AptBreakdown AptEvaluator::apt(double eta, int cache_files) const {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("apt: eta must lie in [0, 1]");
  if (cache_files < 0) throw DomainError("apt: negative cache size");
  if (cache_files > max_cache_)
    throw InfeasibleCacheError("apt: cache of " + std::to_string(cache_files) +
                               " files is infeasible");
  const double ph = hit(cache_files);
  const CoverageTriple cov = provider_->at(cache_files);

  AptBreakdown b;
  b.access_sbs_uncached = (1.0 - ph) * a2_ * eta * cov.sbs;
  b.backhaul_uncached = (1.0 - ph) * a1_ * (1.0 - eta) * cov.backhaul;
  b.cached_sbs = ph * a2_ * eta * cov.sbs;
  b.mbs_term = a3_ * eta * cov.mbs;
  b.binding_side = b.access_sbs_uncached <= b.backhaul_uncached ? BindingSide::Access
                                                                : BindingSide::Backhaul;
  b.total = std::min(b.access_sbs_uncached, b.backhaul_uncached) + b.cached_sbs + b.mbs_term;
  return b;
}

AptBreakdown apt(double eta, int cache_files, const SystemConfig& cfg) {
  CoverageMemo memo(cfg);
  return apt(eta, cache_files, memo);
}

AptBreakdown apt(double eta, int cache_files, const CoverageMemo& memo) {
  MemoCoverageProvider provider(memo, memo.config().gamma0_lin);
  AptEvaluator eval(memo.config(), provider);
  return eval.apt(eta, cache_files);
}

}  // namespace iabnet::analytic
