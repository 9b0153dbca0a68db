#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "iabnet/analytic.hpp"
#include "iabnet/config.hpp"
#include "iabnet/model.hpp"
#include "iabnet/montecarlo.hpp"
#include "iabnet/quadrature.hpp"

using namespace iabnet;
using namespace iabnet::mc;

namespace {

constexpr double kPi = 3.14159265358979323846;

bool same_points(const std::vector<PointSample>& a, const std::vector<PointSample>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].x != b[i].x || a[i].y != b[i].y || a[i].r != b[i].r) return false;
    if (a[i].link != b[i].link || a[i].gain != b[i].gain) return false;
    if (a[i].fading != b[i].fading || a[i].mean_path_gain != b[i].mean_path_gain) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("realization sampling") {
  SystemConfig cfg;

  SUBCASE("fixed substream reproduces the realization bit for bit") {
    RngStream s1 = RngStream::substream(7, 3);
    RngStream s2 = RngStream::substream(7, 3);
    const NetworkRealization a = sample_realization(cfg, s1);
    const NetworkRealization b = sample_realization(cfg, s2);
    CHECK(same_points(a.sbs, b.sbs));
    CHECK(same_points(a.mbs, b.mbs));
    CHECK(a.window_radius == cfg.numeric.mc_window_radius_m);
  }
  SUBCASE("distinct substreams differ") {
    RngStream s1 = RngStream::substream(7, 3);
    RngStream s2 = RngStream::substream(7, 4);
    const NetworkRealization a = sample_realization(cfg, s1);
    const NetworkRealization b = sample_realization(cfg, s2);
    CHECK_FALSE(same_points(a.sbs, b.sbs));
  }
  SUBCASE("zero density leaves the tier empty") {
    SystemConfig c2 = cfg;
    c2.lambda_s = 0.0;
    RngStream st(1);
    for (int i = 0; i < 20; ++i) CHECK(sample_realization(c2, st).sbs.empty());
  }
  SUBCASE("point counts track the PPP mean") {
    const int n = 2000;
    const double mean_expected = cfg.lambda_s * kPi * cfg.numeric.mc_window_radius_m *
                                 cfg.numeric.mc_window_radius_m;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      RngStream st = RngStream::substream(99, i);
      NetworkRealization net = sample_realization(cfg, st);
      total += static_cast<double>(net.sbs.size());
      for (const auto& p : net.sbs) {
        CHECK(p.r <= net.window_radius);
        CHECK(p.fading > 0.0);
      }
    }
    const double mean = total / n;
    const double sigma = std::sqrt(mean_expected / n);
    CHECK(std::fabs(mean - mean_expected) <= 3.0 * sigma);
  }
}

TEST_CASE("association") {
  SystemConfig cfg;
  NetworkRealization net;
  net.window_radius = 2000.0;
  auto mk = [&](double r, LinkState link) {
    PointSample p;
    p.r = r;
    p.x = r;
    p.link = link;
    p.fading = 1.0;
    p.gain = GainClass::SideSide;
    p.mean_path_gain = path_loss(r, link, cfg);
    return p;
  };

  SUBCASE("two-point argmax picks the stronger biased power") {
    net.sbs = {mk(10.0, LinkState::LOS)};
    net.mbs = {mk(100.0, LinkState::LOS)};
    const Association a = associate(net, ProbeKind::User, 0, cfg);
    REQUIRE(a.served);
    CHECK(a.tier == Tier::SBS);
    CHECK(a.link == LinkState::LOS);
    // move the MBS close enough and it wins
    net.mbs = {mk(20.0, LinkState::LOS)};
    CHECK(associate(net, ProbeKind::User, 0, cfg).tier == Tier::MBS);
  }
  SUBCASE("common power scaling leaves the argmax unchanged") {
    net.sbs = {mk(14.0, LinkState::LOS), mk(40.0, LinkState::NLOS)};
    net.mbs = {mk(95.0, LinkState::LOS)};
    const Association base = associate(net, ProbeKind::User, 0, cfg);
    SystemConfig scaled = cfg;
    scaled.bias_s *= 7.5;
    scaled.bias_m *= 7.5;
    const Association after = associate(net, ProbeKind::User, 0, scaled);
    CHECK(base.tier == after.tier);
    CHECK(base.index == after.index);
  }
  SUBCASE("backhaul probes ignore the SBS tier") {
    net.sbs = {mk(1.0, LinkState::LOS)};
    net.mbs = {mk(150.0, LinkState::LOS), mk(90.0, LinkState::LOS)};
    const Association a = associate(net, ProbeKind::BackhaulSbs, 0, cfg);
    REQUIRE(a.served);
    CHECK(a.tier == Tier::MBS);
    CHECK(a.index == 1);
  }
  SUBCASE("empty candidate set is a counted outcome, not an error") {
    net.sbs.clear();
    net.mbs.clear();
    CHECK_FALSE(associate(net, ProbeKind::User, 0, cfg).served);
  }
}

TEST_CASE("sinr evaluation") {
  SystemConfig cfg;
  NetworkRealization net;
  net.window_radius = 2000.0;

  PointSample serving;
  serving.r = 12.0;
  serving.link = LinkState::LOS;
  serving.fading = 0.7;
  serving.gain = GainClass::SideSide;  // overridden by main-lobe gain when serving
  serving.mean_path_gain = path_loss(12.0, LinkState::LOS, cfg);

  SUBCASE("no interferers: pure SNR, linear in noise") {
    net.sbs = {serving};
    const Association a = associate(net, ProbeKind::User, 0, cfg);
    REQUIRE(a.tier == Tier::SBS);
    const double m2 = cfg.gain_main * cfg.gain_main;
    const double expected = transmit_power_sbs(0, cfg) * cfg.bias_s * m2 * 0.7 *
                            serving.mean_path_gain / cfg.noise_w;
    CHECK(sinr(net, a, ProbeKind::User, 0, cfg) ==
          doctest::Approx(expected).epsilon(1e-14));
    SystemConfig noisy = cfg;
    noisy.noise_w *= 2.0;
    CHECK(sinr(net, a, ProbeKind::User, 0, noisy) ==
          doctest::Approx(expected / 2.0).epsilon(1e-14));
  }
  SUBCASE("single interferer uses its sampled gain class and fading") {
    PointSample interferer;
    interferer.r = 80.0;
    interferer.link = LinkState::LOS;
    interferer.fading = 1.9;
    interferer.gain = GainClass::MainSide;
    interferer.mean_path_gain = path_loss(80.0, LinkState::LOS, cfg);
    net.sbs = {serving, interferer};
    const Association a = associate(net, ProbeKind::User, 0, cfg);
    REQUIRE(a.index == 0);
    const double m2 = cfg.gain_main * cfg.gain_main;
    const double pb_s = transmit_power_sbs(0, cfg) * cfg.bias_s;
    const double desired = pb_s * m2 * 0.7 * serving.mean_path_gain;
    const double mm_gain = cfg.gain_main * cfg.gain_side;
    const double interf = pb_s * mm_gain * 1.9 * interferer.mean_path_gain;
    CHECK(sinr(net, a, ProbeKind::User, 0, cfg) ==
          doctest::Approx(desired / (interf + cfg.noise_w)).epsilon(1e-14));
  }
  SUBCASE("backhaul interference is MBS-only and excludes the server") {
    PointSample mbs1 = serving;
    mbs1.r = 90.0;
    mbs1.mean_path_gain = path_loss(90.0, LinkState::LOS, cfg);
    PointSample mbs2 = serving;
    mbs2.r = 200.0;
    mbs2.fading = 1.3;
    mbs2.gain = GainClass::MainMain;
    mbs2.mean_path_gain = path_loss(200.0, LinkState::LOS, cfg);
    net.sbs = {serving};  // must not contribute to backhaul interference
    net.mbs = {mbs1, mbs2};
    const Association a = associate(net, ProbeKind::BackhaulSbs, 0, cfg);
    REQUIRE(a.index == 0);
    const double pb_m = transmit_power_mbs(cfg) * cfg.bias_m;
    const double m2 = cfg.gain_main * cfg.gain_main;
    const double desired = pb_m * m2 * mbs1.fading * mbs1.mean_path_gain;
    const double interf = pb_m * m2 * 1.3 * mbs2.mean_path_gain;  // MainMain class
    CHECK(sinr(net, a, ProbeKind::BackhaulSbs, 0, cfg) ==
          doctest::Approx(desired / (interf + cfg.noise_w)).epsilon(1e-14));
  }
}

TEST_CASE("empirical coverage estimators") {
  SystemConfig cfg;

  SUBCASE("deterministic given (seed, n) and independent of the worker count") {
    const EmpiricalEstimate a =
        empirical_coverage(CoverageEventKind::SbsAccess, 10.0, 200, 400, 5, cfg, 1);
    const EmpiricalEstimate b =
        empirical_coverage(CoverageEventKind::SbsAccess, 10.0, 200, 400, 5, cfg, 1);
    const EmpiricalEstimate c =
        empirical_coverage(CoverageEventKind::SbsAccess, 10.0, 200, 400, 5, cfg, 3);
    CHECK(a.mean == b.mean);
    CHECK(a.mean == c.mean);
    CHECK(a.ci_half_width_99 == c.ci_half_width_99);
    CHECK(a.n == 400);
    CHECK(a.seed == 5);
  }
  SUBCASE("tiny threshold recovers the association frequency") {
    const CoverageEstimate d = empirical_coverage_detailed(CoverageEventKind::MbsAccess, 1e-12,
                                                           0, 500, 11, cfg, 1);
    CHECK(d.joint.mean == doctest::Approx(d.association_frequency).epsilon(1e-12));
    CHECK(empirical_coverage(CoverageEventKind::SbsAccess, 1e9, 0, 500, 11, cfg).mean <= 0.01);
  }
  SUBCASE("confidence interval shrinks like 1/sqrt(n)") {
    const EmpiricalEstimate small =
        empirical_coverage(CoverageEventKind::MbsAccess, 10.0, 200, 2000, 21, cfg, 1);
    const EmpiricalEstimate big =
        empirical_coverage(CoverageEventKind::MbsAccess, 10.0, 200, 8000, 21, cfg, 1);
    const double ratio = big.ci_half_width_99 / small.ci_half_width_99;
    CHECK(ratio >= 0.45);
    CHECK(ratio <= 0.55);
  }
  SUBCASE("grid pass equals the single-threshold estimator") {
    const CoverageGrid grid = empirical_coverage_grid({1.0, 10.0}, 200, 400, 5, cfg, 2);
    const EmpiricalEstimate single =
        empirical_coverage(CoverageEventKind::SbsAccess, 10.0, 200, 400, 5, cfg, 1);
    CHECK(grid.joint[0][1].mean == single.mean);
    CHECK(grid.gammas.size() == 2);
  }
  SUBCASE("association frequencies agree with the analytic integral") {
    const AssociationFrequencies f = empirical_association(0, 10000, 42, cfg, 2);
    QuadratureOptions opt;
    double analytic_sbs = 0.0;
    for (LinkState k : {LinkState::LOS, LinkState::NLOS})
      analytic_sbs += integrate(
                          [&](double r) {
                            return analytic::association_density(
                                analytic::AssocDest::UserToSbs, k, r, 0, cfg);
                          },
                          1e-9, 600.0, opt)
                          .value;
    CHECK(std::fabs(f.sbs - analytic_sbs) < 0.02);
    CHECK(f.sbs + f.mbs + f.unserved == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("larger windows do not move the estimate beyond its interval") {
    const EmpiricalEstimate base =
        empirical_coverage(CoverageEventKind::SbsAccess, 10.0, 200, 1500, 33, cfg, 1);
    SystemConfig wide = cfg;
    wide.numeric.mc_window_radius_m = 4000.0;
    const EmpiricalEstimate far =
        empirical_coverage(CoverageEventKind::SbsAccess, 10.0, 200, 1500, 33, wide, 1);
    CHECK(std::fabs(base.mean - far.mean) <= base.ci_half_width_99);
  }
}

TEST_CASE("noise-limited oracle") {
  SystemConfig cfg;
  const EmpiricalEstimate e =
      empirical_noise_limited(Tier::SBS, db_to_linear(15.0), 200, 3000, 3, cfg, 1);
  const double closed =
      analytic::coverage_noise_limited(Tier::SBS, db_to_linear(15.0), 200, cfg);
  CHECK(std::fabs(e.mean - closed) <= std::max(0.02, 2.0 * e.ci_half_width_99));
}

TEST_CASE("empirical apt") {
  SystemConfig cfg;

  SUBCASE("eta = 0 gives zero throughput") {
    const AptEmpirical r = empirical_apt(0.0, 100, cfg.gamma0_lin, 300, 9, cfg, 1);
    CHECK(r.total.mean == 0.0);
  }
  SUBCASE("empty cache has no cached term") {
    const AptEmpirical r = empirical_apt(0.9, 0, cfg.gamma0_lin, 300, 9, cfg, 1);
    CHECK(r.breakdown.cached_sbs == 0.0);
    CHECK(r.total.mean >= 0.0);
  }
  SUBCASE("deterministic") {
    const AptEmpirical a = empirical_apt(0.9, 200, cfg.gamma0_lin, 400, 13, cfg, 1);
    const AptEmpirical b = empirical_apt(0.9, 200, cfg.gamma0_lin, 400, 13, cfg, 2);
    CHECK(a.total.mean == b.total.mean);
  }
}
