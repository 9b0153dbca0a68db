// Command-line front end: analyze | sweep | optimize | validate over a
// key=value config file, emitting CSV data plus a JSON run manifest.
// Outputs are byte-reproducible from (config, seed, version); manifest
// timestamps honor SOURCE_DATE_EPOCH.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "iabnet/analytic.hpp"
#include "iabnet/config.hpp"
#include "iabnet/model.hpp"
#include "iabnet/montecarlo.hpp"
#include "iabnet/optimize.hpp"
#include "iabnet/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace iabnet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitValidation = 4;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string iso_utc(std::time_t t) {
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::time_t now_or_epoch_override() {
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH"))
    return static_cast<std::time_t>(std::strtoll(e, nullptr, 10));
  return std::time(nullptr);
}

class RunWriter {
public:
  RunWriter(std::string command, fs::path out_dir, const SystemConfig& cfg, std::uint64_t seed)
      : command_(std::move(command)), out_dir_(std::move(out_dir)), seed_(seed) {
    fs::create_directories(out_dir_);
    config_hash_ = hex64(config_hash(cfg));
    started_ = now_or_epoch_override();
  }

  void write_file(const std::string& name, const std::string& bytes) {
    const fs::path p = out_dir_ / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << bytes;
    out.close();
    outputs_.push_back({name, bytes.size(), hex64(fnv64(bytes))});
  }

  void finish() {
    json m;
    m["command"] = command_;
    m["version"] = kVersion;
    m["config_hash"] = config_hash_;
    m["seed"] = seed_;
    m["started_at"] = iso_utc(started_);
    m["finished_at"] = iso_utc(now_or_epoch_override());
    json outs = json::array();
    for (const auto& o : outputs_)
      outs.push_back({{"path", o.name}, {"bytes", o.bytes}, {"fnv64", o.hash}});
    m["outputs"] = outs;
    std::ofstream out(out_dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
    out << m.dump(2) << "\n";
  }

private:
  struct OutFile {
    std::string name;
    std::size_t bytes;
    std::string hash;
  };
  std::string command_;
  fs::path out_dir_;
  std::uint64_t seed_;
  std::string config_hash_;
  std::time_t started_;
  std::vector<OutFile> outputs_;
};

std::vector<double> parse_range(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double start, step, stop;
    char c1, c2;
    std::istringstream ss(text);
    if (!(ss >> start >> c1 >> step >> c2 >> stop) || c1 != ':' || c2 != ':' || step == 0.0)
      throw ConfigError("", "range must be start:step:stop with nonzero step");
    const double n = std::floor((stop - start) / step + 1e-9);
    for (int i = 0; i <= static_cast<int>(n); ++i) out.push_back(start + i * step);
  } else {
    std::istringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      out.push_back(std::stod(tok));
    }
  }
  if (out.empty()) throw ConfigError("", "empty range");
  return out;
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int workers = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file")->required();
  cmd->add_option("--out-dir", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "RNG seed (default: seed key from the config)");
  cmd->add_option("--workers", args.workers, "worker threads for grids and estimators")
      ->check(CLI::PositiveNumber);
}

struct LoadedRun {
  SystemConfig cfg;
  std::uint64_t seed;
};

LoadedRun load_run(const CommonArgs& args) {
  SystemConfig cfg = load_config_file(args.config_path);
  return {cfg, args.seed.value_or(cfg.numeric.seed)};
}

// --------------------------------------------------------------------------
// analyze

int cmd_analyze(const CommonArgs& common, const std::vector<double>& gamma_db, int cache,
                double eta, const std::string& dump_integrands) {
  LoadedRun run = load_run(common);
  RunWriter writer("analyze", common.out_dir, run.cfg, run.seed);

  std::string dump;
  if (!dump_integrands.empty()) {
    dump = "kind,link,r,integrand\n";
    analytic::set_integrand_sink([&dump](analytic::CoverageKind k, LinkState l, double r,
                                         double v) {
      const char* kn = k == analytic::CoverageKind::SbsAccess   ? "sbs"
                       : k == analytic::CoverageKind::MbsAccess ? "mbs"
                                                                : "backhaul";
      dump += kn;
      dump += ',';
      dump += to_string(l);
      dump += ',';
      dump += fmt17(r);
      dump += ',';
      dump += fmt17(v);
      dump += '\n';
    });
  }

  analytic::CoverageMemo memo(run.cfg);
  std::string csv = "gamma_db,cov_sbs,cov_mbs,cov_bh,apt_total,binding_side\n";
  std::vector<double> sorted = gamma_db;
  std::sort(sorted.begin(), sorted.end());
  for (double gdb : sorted) {
    const double g = db_to_linear(gdb);
    const analytic::CoverageTriple t = memo.triple(g, cache);
    SystemConfig row_cfg = run.cfg;
    row_cfg.gamma0_lin = g;
    analytic::MemoCoverageProvider provider(memo, g);
    analytic::AptEvaluator eval(row_cfg, provider);
    const analytic::AptBreakdown b = eval.apt(eta, cache);
    csv += fmt17(gdb) + "," + fmt17(t.sbs) + "," + fmt17(t.mbs) + "," + fmt17(t.backhaul) +
           "," + fmt17(b.total) + "," +
           (b.binding_side == analytic::BindingSide::Access ? "access" : "backhaul") + "\n";
  }
  writer.write_file("analyze.csv", csv);
  if (!dump_integrands.empty()) {
    analytic::set_integrand_sink(nullptr);
    writer.write_file(dump_integrands, dump);
  }
  writer.finish();
  return kExitOk;
}

// --------------------------------------------------------------------------
// sweep

enum class Axis { Cache, Eta, Gamma0, GammaP, OmegaCa };

Axis parse_axis(const std::string& s) {
  if (s == "C") return Axis::Cache;
  if (s == "eta") return Axis::Eta;
  if (s == "gamma0") return Axis::Gamma0;
  if (s == "gamma_p") return Axis::GammaP;
  if (s == "omega_ca") return Axis::OmegaCa;
  throw ConfigError("", "axis must be one of C|eta|gamma0|gamma_p|omega_ca");
}

const char* axis_name(Axis a) {
  switch (a) {
    case Axis::Cache: return "C";
    case Axis::Eta: return "eta";
    case Axis::Gamma0: return "gamma0_db";
    case Axis::GammaP: return "gamma_p";
    case Axis::OmegaCa: return "omega_ca";
  }
  return "?";
}

SystemConfig apply_axis(const SystemConfig& base, Axis axis, double value) {
  SystemConfig cfg = base;
  switch (axis) {
    case Axis::Gamma0: cfg.gamma0_lin = db_to_linear(value); break;
    case Axis::GammaP: cfg.zipf_gamma = value; break;
    case Axis::OmegaCa: cfg.omega_ca_w_per_bit = value; break;
    default: break;
  }
  cfg.validate();
  return cfg;
}

bool axis_changes_coverage(Axis a) { return a == Axis::Gamma0 || a == Axis::OmegaCa; }

int cmd_sweep(const CommonArgs& common, const std::string& axis_s, const std::string& range_s,
              const std::string& axis2_s, const std::string& range2_s,
              const std::string& solver, int cache, double eta) {
  LoadedRun run = load_run(common);
  const Axis axis = parse_axis(axis_s);
  std::vector<double> grid = parse_range(range_s);
  std::sort(grid.begin(), grid.end());

  std::optional<Axis> axis2;
  std::vector<double> grid2{0.0};
  if (!axis2_s.empty()) {
    axis2 = parse_axis(axis2_s);
    if (range2_s.empty()) throw ConfigError("", "--range2 required with --axis2");
    grid2 = parse_range(range2_s);
    std::sort(grid2.begin(), grid2.end());
    if (solver != "apt") throw ConfigError("", "two-axis sweeps support --solver apt only");
    if (axis_changes_coverage(*axis2) || axis_changes_coverage(axis))
      throw ConfigError("", "two-axis sweeps support the C and eta axes only");
  }

  RunWriter writer("sweep", common.out_dir, run.cfg, run.seed);
  std::string csv;

  // A memo is shared wherever the axis leaves the coverage integrals
  // untouched (C, eta, gamma_p); gamma0 and omega_ca rebuild per point.
  std::optional<analytic::CoverageMemo> shared_memo;
  if (!axis_changes_coverage(axis)) shared_memo.emplace(run.cfg);

  if (solver == "apt") {
    csv = std::string(axis_name(axis)) +
          (axis2 ? std::string(",") + axis_name(*axis2) : std::string()) +
          ",apt_total,access_sbs_uncached,backhaul_uncached,cached_sbs,mbs_term,binding_side\n";
    if (shared_memo && (axis == Axis::Cache || (axis2 && *axis2 == Axis::Cache))) {
      std::vector<int> cs;
      if (axis == Axis::Cache)
        for (double v : grid) cs.push_back(static_cast<int>(std::lround(v)));
      else
        for (double v : grid2) cs.push_back(static_cast<int>(std::lround(v)));
      shared_memo->precompute(run.cfg.gamma0_lin, cs, common.workers);
    } else if (shared_memo) {
      shared_memo->precompute(run.cfg.gamma0_lin, {cache}, common.workers);
    }
    for (double v : grid) {
      for (double v2 : grid2) {
        SystemConfig cfg = apply_axis(run.cfg, axis, v);
        if (axis2) cfg = apply_axis(cfg, *axis2, v2);
        int row_cache = cache;
        double row_eta = eta;
        auto assign = [&](Axis a, double value) {
          if (a == Axis::Cache) row_cache = static_cast<int>(std::lround(value));
          if (a == Axis::Eta) row_eta = value;
        };
        assign(axis, v);
        if (axis2) assign(*axis2, v2);

        std::optional<analytic::CoverageMemo> local;
        const analytic::CoverageMemo& memo =
            shared_memo ? *shared_memo : local.emplace(cfg);
        analytic::MemoCoverageProvider provider(memo, cfg.gamma0_lin);
        analytic::AptEvaluator eval(cfg, provider);
        const analytic::AptBreakdown b = eval.apt(row_eta, row_cache);
        csv += fmt17(v);
        if (axis2) csv += "," + fmt17(v2);
        csv += "," + fmt17(b.total) + "," + fmt17(b.access_sbs_uncached) + "," +
               fmt17(b.backhaul_uncached) + "," + fmt17(b.cached_sbs) + "," +
               fmt17(b.mbs_term) + "," +
               (b.binding_side == analytic::BindingSide::Access ? "access" : "backhaul") +
               "\n";
      }
    }
  } else if (solver == "jcspa") {
    csv = std::string(axis_name(axis)) +
          ",apt_star,c_star,eta_star,p_s_tr_star,iterations,converged\n";
    for (double v : grid) {
      SystemConfig cfg = apply_axis(run.cfg, axis, v);
      std::optional<analytic::CoverageMemo> local;
      const analytic::CoverageMemo& memo = shared_memo ? *shared_memo : local.emplace(cfg);
      if (!shared_memo) {
        std::vector<int> cs;
        for (int c = 0; c <= max_feasible_cache(cfg); ++c) cs.push_back(c);
        memo.precompute(cfg.gamma0_lin, cs, common.workers);
      }
      analytic::MemoCoverageProvider provider(memo, cfg.gamma0_lin);
      analytic::AptEvaluator eval(cfg, provider);
      opt::JcspaParams params;
      params.seed = run.seed;
      const opt::SolveResult r = opt::jcspa(eval, params);
      csv += fmt17(v) + "," + fmt17(r.apt_star) + "," + std::to_string(r.c_star) + "," +
             fmt17(r.eta_star) + "," + fmt17(r.p_s_tr_star) + "," +
             std::to_string(r.trace.size()) + "," + (r.converged ? "1" : "0") + "\n";
    }
  } else {
    throw ConfigError("", "--solver must be apt or jcspa");
  }

  writer.write_file("sweep.csv", csv);
  writer.finish();
  return kExitOk;
}

// --------------------------------------------------------------------------
// optimize

json trace_json(const opt::SolveResult& r) {
  json steps = json::array();
  for (const auto& s : r.trace)
    steps.push_back({{"iteration", s.iteration},
                     {"eta", s.eta},
                     {"C", s.cache},
                     {"apt_after_spectrum", s.apt_after_spectrum},
                     {"apt_after_cache", s.apt_after_cache}});
  return {{"c_star", r.c_star},
          {"eta_star", r.eta_star},
          {"p_s_tr_star", r.p_s_tr_star},
          {"apt_star", r.apt_star},
          {"converged", r.converged},
          {"restarts_disagree", r.restarts_disagree},
          {"trace", steps}};
}

int cmd_optimize(const CommonArgs& common, const std::string& algorithm, int restarts) {
  LoadedRun run = load_run(common);
  RunWriter writer("optimize", common.out_dir, run.cfg, run.seed);

  analytic::CoverageMemo memo(run.cfg);
  std::vector<int> cs;
  for (int c = 0; c <= max_feasible_cache(run.cfg); ++c) cs.push_back(c);
  memo.precompute(run.cfg.gamma0_lin, cs, common.workers);
  analytic::MemoCoverageProvider provider(memo, run.cfg.gamma0_lin);
  analytic::AptEvaluator eval(run.cfg, provider);

  opt::JcspaParams params;
  params.seed = run.seed;
  params.restarts = restarts;
  params.ga.seed = run.seed;

  std::string csv =
      "algorithm,apt,c_star,eta_star,p_s_tr_star,iterations,converged,restarts_disagree\n";
  json traces;
  auto add_row = [&](const std::string& name, const opt::SolveResult& r) {
    csv += name + "," + fmt17(r.apt_star) + "," + std::to_string(r.c_star) + "," +
           fmt17(r.eta_star) + "," + fmt17(r.p_s_tr_star) + "," +
           std::to_string(r.trace.size()) + "," + (r.converged ? "1" : "0") + "," +
           (r.restarts_disagree ? "1" : "0") + "\n";
    traces[name] = trace_json(r);
  };

  const bool want_jcspa = algorithm == "jcspa" || algorithm == "all";
  const bool want_baselines = algorithm == "baselines" || algorithm == "all";
  if (!want_jcspa && !want_baselines)
    throw ConfigError("", "--algorithm must be jcspa|baselines|all");

  if (want_jcspa) add_row("jcspa", opt::jcspa(eval, params));
  if (want_baselines)
    for (auto kind : {opt::BaselineKind::NoCacheDsa, opt::BaselineKind::OptCacheFsa,
                      opt::BaselineKind::FullCacheDsa, opt::BaselineKind::UniformCacheDsa})
      add_row(opt::to_string(kind), opt::baseline(kind, eval, params));

  writer.write_file("results.csv", csv);
  writer.write_file("trace.json", traces.dump(2) + "\n");
  writer.finish();
  return kExitOk;
}

// --------------------------------------------------------------------------
// validate

int cmd_validate(const CommonArgs& common, std::uint64_t n, int cache, bool trace) {
  if (n == 0) throw ConfigError("", "--n must be >= 1");
  LoadedRun run = load_run(common);
  RunWriter writer("validate", common.out_dir, run.cfg, run.seed);

  const double tol_cov = 0.03;
  const double tol_nl_mc = 0.02;
  const double tol_nl_integral = 1e-4;
  const double tol_apt_rel = 0.05;
  const std::vector<double> gamma_db = {0.0, 5.0, 10.0, 15.0};
  std::vector<double> gammas;
  for (double g : gamma_db) gammas.push_back(db_to_linear(g));

  std::string csv = "check,kind,gamma_db,C,analytic,empirical,ci99,delta,tolerance,pass\n";
  bool all_pass = true;
  auto row = [&](const std::string& check, const std::string& kind, double gdb, int c,
                 double ana, double emp, double ci, double tol) {
    const double delta = ana - emp;
    const bool pass = std::fabs(delta) <= tol;
    all_pass = all_pass && pass;
    csv += check + "," + kind + "," + fmt17(gdb) + "," + std::to_string(c) + "," + fmt17(ana) +
           "," + fmt17(emp) + "," + fmt17(ci) + "," + fmt17(delta) + "," + fmt17(tol) + "," +
           (pass ? "1" : "0") + "\n";
  };

  // analytic vs system-level Monte Carlo, joint and conditional forms
  const mc::CoverageGrid grid =
      mc::empirical_coverage_grid(gammas, cache, n, run.seed, run.cfg, common.workers);
  analytic::CoverageMemo memo(run.cfg);
  const char* kind_names[3] = {"sbs", "mbs", "backhaul"};
  const analytic::CoverageKind kinds[3] = {analytic::CoverageKind::SbsAccess,
                                           analytic::CoverageKind::MbsAccess,
                                           analytic::CoverageKind::Backhaul};
  // association probability = coverage in the gamma -> 0 limit
  double assoc_analytic[3] = {0.0, 0.0, 0.0};
  for (int k = 0; k < 3; ++k)
    assoc_analytic[k] = memo.get(kinds[k], 1e-9, cache).value;
  const double assoc_mc[3] = {grid.assoc_sbs, grid.assoc_mbs, 1.0};
  for (int k = 0; k < 3; ++k) {
    for (std::size_t g = 0; g < gammas.size(); ++g) {
      const double ana = memo.get(kinds[k], gammas[g], cache).value;
      const mc::EmpiricalEstimate& e = grid.joint[k][g];
      row("coverage_joint", kind_names[k], gamma_db[g], cache, ana, e.mean,
          e.ci_half_width_99, tol_cov);
      const double ana_cond = assoc_analytic[k] > 0 ? ana / assoc_analytic[k] : 0.0;
      const double emp_cond = assoc_mc[k] > 0 ? e.mean / assoc_mc[k] : 0.0;
      row("coverage_conditional", kind_names[k], gamma_db[g], cache, ana_cond, emp_cond,
          e.ci_half_width_99, tol_cov);
    }
  }

  // noise-limited closed form vs its quadrature route and the SNR-only oracle
  for (Tier tier : {Tier::SBS, Tier::MBS}) {
    const char* tn = tier == Tier::SBS ? "sbs" : "mbs";
    const auto nl_mc = mc::empirical_noise_limited_grid(tier, gammas, cache, n, run.seed + 1,
                                                        run.cfg, common.workers);
    for (std::size_t g = 0; g < gammas.size(); ++g) {
      const double closed = analytic::coverage_noise_limited(tier, gammas[g], cache, run.cfg);
      const double integral =
          analytic::coverage_snr_only_integral(tier, gammas[g], cache, run.cfg);
      row("noise_limited_integral", tn, gamma_db[g], cache, closed, integral, 0.0,
          tol_nl_integral);
      row("noise_limited_mc", tn, gamma_db[g], cache, closed, nl_mc[g].mean,
          nl_mc[g].ci_half_width_99, tol_nl_mc);
    }
  }

  // APT composition at (eta=0.9, C)
  {
    const double eta = 0.9;
    const mc::AptEmpirical ea =
        mc::empirical_apt(eta, cache, run.cfg.gamma0_lin, n, run.seed + 2, run.cfg,
                          common.workers);
    const analytic::AptBreakdown ana = analytic::apt(eta, cache, memo);
    const double rel = ana.total != 0.0 ? (ana.total - ea.total.mean) / ana.total : 0.0;
    row("apt_relative", "total", linear_to_db(run.cfg.gamma0_lin), cache, 0.0, -rel,
        ea.total.ci_half_width_99 / std::max(ana.total, 1e-300), tol_apt_rel);
  }

  if (trace) {
    std::string tr = "realization,served,tier,sinr\n";
    mc::TraceSink sink = [&tr](std::uint64_t i, const mc::Association& a, double s) {
      tr += std::to_string(i) + "," + (a.served ? "1" : "0") + "," +
            (a.served ? to_string(a.tier) : "none") + "," + fmt17(s) + "\n";
    };
    mc::empirical_coverage_detailed(mc::CoverageEventKind::SbsAccess, run.cfg.gamma0_lin,
                                    cache, std::min<std::uint64_t>(n, 2000), run.seed, run.cfg,
                                    1, &sink);
    writer.write_file("trace.csv", tr);
  }

  writer.write_file("validation.csv", csv);
  writer.finish();
  std::fputs(all_pass ? "validation: PASS\n" : "validation: FAIL (see validation.csv)\n",
             stdout);
  return all_pass ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cache-enabled mmWave IAB heterogeneous network analysis"};
  app.set_version_flag("--version", std::string(kVersion));

  std::string emit_path;
  app.add_option("--emit-default-config", emit_path,
                 "write the default configuration to PATH and exit");

  CommonArgs a_common, s_common, o_common, v_common;

  auto* analyze = app.add_subcommand("analyze", "coverage and APT at fixed (C, eta)");
  add_common(analyze, a_common);
  std::string gamma_list = "0,5,10,15";
  int a_cache = 200;
  double a_eta = 0.9;
  std::string a_dump;
  analyze->add_option("--gamma", gamma_list, "SINR thresholds, dB (comma list or a:b:c)");
  analyze->add_option("--C", a_cache, "cache size, files");
  analyze->add_option("--eta", a_eta, "access-link spectrum fraction");
  analyze->add_option("--dump-integrands", a_dump, "also write integrand samples to this file");

  auto* sweep = app.add_subcommand("sweep", "grid evaluation along one or two axes");
  add_common(sweep, s_common);
  std::string axis, range, axis2, range2, solver = "apt";
  int s_cache = 200;
  double s_eta = 0.9;
  sweep->add_option("--axis", axis, "C|eta|gamma0|gamma_p|omega_ca")->required();
  sweep->add_option("--range", range, "start:step:stop or comma list")->required();
  sweep->add_option("--axis2", axis2, "optional second axis (C or eta)");
  sweep->add_option("--range2", range2, "range of the second axis");
  sweep->add_option("--solver", solver, "apt (fixed point) or jcspa (optimize per point)");
  sweep->add_option("--C", s_cache, "cache size when not on an axis");
  sweep->add_option("--eta", s_eta, "spectrum fraction when not on an axis");

  auto* optimize = app.add_subcommand("optimize", "run JCSPA and the baselines");
  add_common(optimize, o_common);
  std::string algorithm = "all";
  int restarts = 3;
  optimize->add_option("--algorithm", algorithm, "jcspa|baselines|all");
  optimize->add_option("--restarts", restarts, "JCSPA multistart count")
      ->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "analytic vs Monte Carlo report");
  add_common(validate, v_common);
  std::uint64_t v_n = 20000;
  int v_cache = 200;
  bool v_trace = false;
  validate->add_option("--n", v_n, "Monte Carlo realizations");
  validate->add_option("--C", v_cache, "cache size, files");
  validate->add_flag("--trace", v_trace, "dump per-realization association/SINR CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (!emit_path.empty()) {
      std::ofstream out(emit_path, std::ios::binary | std::ios::trunc);
      if (!out) throw ConfigError("", "cannot write '" + emit_path + "'");
      out << default_config_text();
      return kExitOk;
    }
    if (analyze->parsed())
      return cmd_analyze(a_common, parse_range(gamma_list), a_cache, a_eta, a_dump);
    if (sweep->parsed())
      return cmd_sweep(s_common, axis, range, axis2, range2, solver, s_cache, s_eta);
    if (optimize->parsed()) return cmd_optimize(o_common, algorithm, restarts);
    if (validate->parsed()) return cmd_validate(v_common, v_n, v_cache, v_trace);
    std::fputs(app.help().c_str(), stdout);
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error%s%s: %s\n", e.key().empty() ? "" : " at key ",
                 e.key().c_str(), e.what());
    return kExitUsage;
  } catch (const InfeasibleCacheError& e) {
    std::fprintf(stderr, "infeasible cache: %s\n", e.what());
    return kExitUsage;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return kExitUsage;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s (partial=%g, err=%g)\n", e.what(),
                 e.partial_value(), e.error_estimate());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
}
