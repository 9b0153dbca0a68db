#include "iabnet/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "iabnet/model.hpp"

namespace iabnet::mc {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile

double pow_neg(double u, double alpha) {
  if (alpha == 2.0) return 1.0 / (u * u);
  if (alpha == 4.0) {
    const double s = u * u;
    return 1.0 / (s * s);
  }
  return std::pow(u, -alpha);
}

void sample_tier(double lambda, double radius, const SystemConfig& cfg, RngStream& st,
                 std::vector<PointSample>& out) {
  out.clear();
  const double mean = lambda * kPi * radius * radius;
  const std::uint64_t count = mean > 0.0 ? st.poisson(mean) : 0;
  out.reserve(count);
  const GainDistribution gd = gain_distribution(cfg);
  const double p_mm = gd.entries[0].probability;
  const double p_mm_ms = p_mm + gd.entries[1].probability;
  for (std::uint64_t i = 0; i < count; ++i) {
    PointSample p;
    const double r = radius * std::sqrt(st.uniform01());
    const double phi = 2.0 * kPi * st.uniform01();
    p.r = std::max(r, 1e-9);  // probe sits at the origin; exclude it
    p.x = p.r * std::cos(phi);
    p.y = p.r * std::sin(phi);
    p.link = st.uniform01() < std::exp(-cfg.beta_blockage * p.r) ? LinkState::LOS
                                                                 : LinkState::NLOS;
    p.fading = st.exponential();
    const double ug = st.uniform01();
    p.gain = ug < p_mm ? GainClass::MainMain
                       : (ug < p_mm_ms ? GainClass::MainSide : GainClass::SideSide);
    p.mean_path_gain = p.link == LinkState::LOS ? cfg.a_los * pow_neg(p.r, cfg.alpha_los)
                                                : cfg.a_nlos * pow_neg(p.r, cfg.alpha_nlos);
    out.push_back(p);
  }
}

void sample_into(const SystemConfig& cfg, RngStream& st, NetworkRealization& net) {
  net.window_radius = cfg.numeric.mc_window_radius_m;
  sample_tier(cfg.lambda_s, net.window_radius, cfg, st, net.sbs);
  sample_tier(cfg.lambda_m, net.window_radius, cfg, st, net.mbs);
}

std::size_t argmax_biased(const std::vector<PointSample>& pts, double pb, double& best) {
  std::size_t arg = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double v = pb * pts[i].mean_path_gain;
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  return arg;
}

struct GainTable {
  double g[3];
  double of(GainClass c) const { return g[static_cast<int>(c)]; }
};

GainTable gain_table(const SystemConfig& cfg) {
  const GainDistribution gd = gain_distribution(cfg);
  GainTable t{};
  for (const auto& e : gd.entries) t.g[static_cast<int>(e.cls)] = e.gain;
  return t;
}

double interference_sum(const std::vector<PointSample>& pts, double pb, const GainTable& gt,
                        std::size_t exclude) {
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i == exclude) continue;
    s += pb * gt.of(pts[i].gain) * pts[i].fading * pts[i].mean_path_gain;
  }
  return s;
}

EmpiricalEstimate binomial_estimate(std::uint64_t successes, std::uint64_t n,
                                    std::uint64_t seed) {
  EmpiricalEstimate e;
  e.n = n;
  e.seed = seed;
  if (n == 0) return e;
  e.mean = static_cast<double>(successes) / static_cast<double>(n);
  e.ci_half_width_99 = kZ99 * std::sqrt(std::max(e.mean * (1.0 - e.mean), 0.0) /
                                        static_cast<double>(n));
  return e;
}

// Deterministic fan-out: realization i always uses substream(seed, i), so
// the counters are independent of the worker count.
template <typename Body>
void run_partitioned(std::uint64_t n, int workers, const Body& body) {
  if (workers <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (n + workers - 1) / static_cast<std::uint64_t>(workers);
  for (int w = 0; w < workers; ++w) {
    const std::uint64_t lo = static_cast<std::uint64_t>(w) * chunk;
    const std::uint64_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] { body(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

NetworkRealization sample_realization(const SystemConfig& cfg, RngStream& stream) {
  NetworkRealization net;
  sample_into(cfg, stream, net);
  return net;
}

Association associate(const NetworkRealization& net, ProbeKind probe, int cache_files,
                      const SystemConfig& cfg) {
  const double pb_m = transmit_power_mbs(cfg) * cfg.bias_m;
  Association a;
  double best = 0.0;
  const std::size_t im = argmax_biased(net.mbs, pb_m, best);
  if (im < net.mbs.size()) {
    a.served = true;
    a.tier = Tier::MBS;
    a.index = im;
    a.link = net.mbs[im].link;
  }
  if (probe == ProbeKind::User) {
    const double pb_s = transmit_power_sbs(cache_files, cfg) * cfg.bias_s;
    const std::size_t is = argmax_biased(net.sbs, pb_s, best);
    if (is < net.sbs.size()) {
      a.served = true;
      a.tier = Tier::SBS;
      a.index = is;
      a.link = net.sbs[is].link;
    }
  }
  return a;
}

double sinr(const NetworkRealization& net, const Association& assoc, ProbeKind probe,
            int cache_files, const SystemConfig& cfg) {
  if (!assoc.served) return 0.0;
  const GainTable gt = gain_table(cfg);
  const double m2 = cfg.gain_main * cfg.gain_main;
  const double pb_m = transmit_power_mbs(cfg) * cfg.bias_m;
  const std::size_t none = static_cast<std::size_t>(-1);

  const std::vector<PointSample>& serving_pts =
      assoc.tier == Tier::SBS ? net.sbs : net.mbs;
  const PointSample& serv = serving_pts[assoc.index];

  double interference = 0.0;
  double pb_serv = pb_m;
  if (probe == ProbeKind::BackhaulSbs) {
    interference = interference_sum(net.mbs, pb_m, gt, assoc.index);
  } else {
    const double pb_s = transmit_power_sbs(cache_files, cfg) * cfg.bias_s;
    pb_serv = assoc.tier == Tier::SBS ? pb_s : pb_m;
    interference =
        interference_sum(net.sbs, pb_s, gt, assoc.tier == Tier::SBS ? assoc.index : none) +
        interference_sum(net.mbs, pb_m, gt, assoc.tier == Tier::MBS ? assoc.index : none);
  }
  const double desired = pb_serv * m2 * serv.fading * serv.mean_path_gain;
  return desired / (interference + cfg.noise_w);
}

CoverageGrid empirical_coverage_grid(const std::vector<double>& gammas, int cache_files,
                                     std::uint64_t n, std::uint64_t seed,
                                     const SystemConfig& cfg, int workers) {
  const std::size_t ng = gammas.size();
  struct Counters {
    std::uint64_t assoc_sbs = 0, assoc_mbs = 0;
    std::vector<std::uint64_t> cov_sbs, cov_mbs, cov_bh;
  };
  std::vector<Counters> per_worker(std::max(workers, 1));
  for (auto& c : per_worker) {
    c.cov_sbs.assign(ng, 0);
    c.cov_mbs.assign(ng, 0);
    c.cov_bh.assign(ng, 0);
  }
  std::atomic<int> wid{0};
  run_partitioned(n, workers, [&](std::uint64_t lo, std::uint64_t hi) {
    Counters& c = per_worker[wid.fetch_add(1)];
    NetworkRealization net;
    for (std::uint64_t i = lo; i < hi; ++i) {
      RngStream st = RngStream::substream(seed, i);
      sample_into(cfg, st, net);
      const Association ua = associate(net, ProbeKind::User, cache_files, cfg);
      if (ua.served) {
        const double s = sinr(net, ua, ProbeKind::User, cache_files, cfg);
        if (ua.tier == Tier::SBS) {
          ++c.assoc_sbs;
          for (std::size_t g = 0; g < ng; ++g)
            if (s > gammas[g]) ++c.cov_sbs[g];
        } else {
          ++c.assoc_mbs;
          for (std::size_t g = 0; g < ng; ++g)
            if (s > gammas[g]) ++c.cov_mbs[g];
        }
      }
      const Association ba = associate(net, ProbeKind::BackhaulSbs, cache_files, cfg);
      if (ba.served) {
        const double s = sinr(net, ba, ProbeKind::BackhaulSbs, cache_files, cfg);
        for (std::size_t g = 0; g < ng; ++g)
          if (s > gammas[g]) ++c.cov_bh[g];
      }
    }
  });

  Counters total;
  total.cov_sbs.assign(ng, 0);
  total.cov_mbs.assign(ng, 0);
  total.cov_bh.assign(ng, 0);
  for (const auto& c : per_worker) {
    total.assoc_sbs += c.assoc_sbs;
    total.assoc_mbs += c.assoc_mbs;
    for (std::size_t g = 0; g < ng; ++g) {
      total.cov_sbs[g] += c.cov_sbs[g];
      total.cov_mbs[g] += c.cov_mbs[g];
      total.cov_bh[g] += c.cov_bh[g];
    }
  }

  CoverageGrid grid;
  grid.gammas = gammas;
  grid.joint.assign(3, std::vector<EmpiricalEstimate>(ng));
  for (std::size_t g = 0; g < ng; ++g) {
    grid.joint[0][g] = binomial_estimate(total.cov_sbs[g], n, seed);
    grid.joint[1][g] = binomial_estimate(total.cov_mbs[g], n, seed);
    grid.joint[2][g] = binomial_estimate(total.cov_bh[g], n, seed);
  }
  grid.assoc_sbs = n ? static_cast<double>(total.assoc_sbs) / static_cast<double>(n) : 0.0;
  grid.assoc_mbs = n ? static_cast<double>(total.assoc_mbs) / static_cast<double>(n) : 0.0;
  return grid;
}

CoverageEstimate empirical_coverage_detailed(CoverageEventKind kind, double gamma_lin,
                                             int cache_files, std::uint64_t n,
                                             std::uint64_t seed, const SystemConfig& cfg,
                                             int workers, const TraceSink* trace) {
  const ProbeKind probe =
      kind == CoverageEventKind::Backhaul ? ProbeKind::BackhaulSbs : ProbeKind::User;
  struct Counters {
    std::uint64_t associated = 0, covered = 0;
  };
  std::vector<Counters> per_worker(std::max(workers, 1));
  std::atomic<int> wid{0};
  if (trace) workers = 1;  // keep trace rows in realization order
  run_partitioned(n, workers, [&](std::uint64_t lo, std::uint64_t hi) {
    Counters& c = per_worker[wid.fetch_add(1)];
    NetworkRealization net;
    for (std::uint64_t i = lo; i < hi; ++i) {
      RngStream st = RngStream::substream(seed, i);
      sample_into(cfg, st, net);
      const Association a = associate(net, probe, cache_files, cfg);
      bool match = a.served;
      if (kind == CoverageEventKind::SbsAccess) match = a.served && a.tier == Tier::SBS;
      if (kind == CoverageEventKind::MbsAccess) match = a.served && a.tier == Tier::MBS;
      double s = 0.0;
      if (match) {
        ++c.associated;
        s = sinr(net, a, probe, cache_files, cfg);
        if (s > gamma_lin) ++c.covered;
      }
      if (trace) (*trace)(i, a, s);
    }
  });
  std::uint64_t associated = 0, covered = 0;
  for (const auto& c : per_worker) {
    associated += c.associated;
    covered += c.covered;
  }
  CoverageEstimate est;
  est.joint = binomial_estimate(covered, n, seed);
  est.conditional = binomial_estimate(covered, std::max<std::uint64_t>(associated, 1), seed);
  est.conditional.n = associated;
  est.association_frequency =
      n ? static_cast<double>(associated) / static_cast<double>(n) : 0.0;
  return est;
}

EmpiricalEstimate empirical_coverage(CoverageEventKind kind, double gamma_lin, int cache_files,
                                     std::uint64_t n, std::uint64_t seed,
                                     const SystemConfig& cfg, int workers) {
  return empirical_coverage_detailed(kind, gamma_lin, cache_files, n, seed, cfg, workers)
      .joint;
}

AssociationFrequencies empirical_association(int cache_files, std::uint64_t n,
                                             std::uint64_t seed, const SystemConfig& cfg,
                                             int workers) {
  CoverageGrid g = empirical_coverage_grid({1.0}, cache_files, n, seed, cfg, workers);
  AssociationFrequencies f;
  f.sbs = g.assoc_sbs;
  f.mbs = g.assoc_mbs;
  f.unserved = std::max(0.0, 1.0 - f.sbs - f.mbs);
  return f;
}

std::vector<EmpiricalEstimate> empirical_noise_limited_grid(Tier tier,
                                                            const std::vector<double>& gammas,
                                                            int cache_files, std::uint64_t n,
                                                            std::uint64_t seed,
                                                            const SystemConfig& cfg,
                                                            int workers) {
  const double pb = tier == Tier::SBS ? transmit_power_sbs(cache_files, cfg) * cfg.bias_s
                                      : transmit_power_mbs(cfg) * cfg.bias_m;
  const double m2 = cfg.gain_main * cfg.gain_main;
  const std::size_t ng = gammas.size();
  std::vector<std::vector<std::uint64_t>> per_worker(std::max(workers, 1),
                                                     std::vector<std::uint64_t>(ng, 0));
  std::atomic<int> wid{0};
  run_partitioned(n, workers, [&](std::uint64_t lo, std::uint64_t hi) {
    auto& c = per_worker[wid.fetch_add(1)];
    NetworkRealization net;
    for (std::uint64_t i = lo; i < hi; ++i) {
      RngStream st = RngStream::substream(seed, i);
      sample_into(cfg, st, net);
      const auto& pts = tier == Tier::SBS ? net.sbs : net.mbs;
      double best = 0.0;
      for (const auto& p : pts)
        best = std::max(best, p.fading * pb * m2 * p.mean_path_gain);
      const double snr_scale = best / cfg.noise_w;
      for (std::size_t g = 0; g < ng; ++g)
        if (snr_scale > gammas[g]) ++c[g];
    }
  });
  std::vector<EmpiricalEstimate> out(ng);
  for (std::size_t g = 0; g < ng; ++g) {
    std::uint64_t covered = 0;
    for (const auto& c : per_worker) covered += c[g];
    out[g] = binomial_estimate(covered, n, seed);
  }
  return out;
}

EmpiricalEstimate empirical_noise_limited(Tier tier, double gamma_lin, int cache_files,
                                          std::uint64_t n, std::uint64_t seed,
                                          const SystemConfig& cfg, int workers) {
  return empirical_noise_limited_grid(tier, {gamma_lin}, cache_files, n, seed, cfg,
                                      workers)[0];
}

namespace {

class FixedTripleProvider final : public analytic::CoverageProvider {
public:
  explicit FixedTripleProvider(analytic::CoverageTriple t) : t_(t) {}
  analytic::CoverageTriple at(int) const override { return t_; }

private:
  analytic::CoverageTriple t_;
};

}  // namespace

AptEmpirical empirical_apt(double eta, int cache_files, double gamma0_lin, std::uint64_t n,
                           std::uint64_t seed, const SystemConfig& cfg, int workers) {
  CoverageGrid grid = empirical_coverage_grid({gamma0_lin}, cache_files, n, seed, cfg, workers);
  analytic::CoverageTriple t;
  t.sbs = grid.joint[0][0].mean;
  t.mbs = grid.joint[1][0].mean;
  t.backhaul = grid.joint[2][0].mean;

  SystemConfig local = cfg;
  local.gamma0_lin = gamma0_lin;
  FixedTripleProvider provider(t);
  analytic::AptEvaluator eval(local, provider);
  AptEmpirical out;
  out.coverage = t;
  out.breakdown = eval.apt(eta, cache_files);
  out.total.mean = out.breakdown.total;
  out.total.n = n;
  out.total.seed = seed;

  // First-order CI: the binding branch plus the cached and MBS terms.
  const double ph = eval.hit(cache_files);
  const double hw_s = grid.joint[0][0].ci_half_width_99;
  const double hw_m = grid.joint[1][0].ci_half_width_99;
  const double hw_bh = grid.joint[2][0].ci_half_width_99;
  double hw = eval.coef_mbs() * eta * hw_m + ph * eval.coef_access() * eta * hw_s;
  if (out.breakdown.binding_side == analytic::BindingSide::Access)
    hw += (1.0 - ph) * eval.coef_access() * eta * hw_s;
  else
    hw += (1.0 - ph) * eval.coef_backhaul() * (1.0 - eta) * hw_bh;
  out.total.ci_half_width_99 = hw;
  return out;
}

}  // namespace iabnet::mc
