#include "iabnet/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace iabnet {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
double deg_to_rad(double deg) { return deg * 3.14159265358979323846 / 180.0; }

namespace {

constexpr double kPi = 3.14159265358979323846;

void fail(const char* key, const std::string& what) { throw ConfigError(key, what); }

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void SystemConfig::validate() const {
  if (!(lambda_m > 0)) fail("lambda_m", "lambda_m must be > 0");
  if (!(lambda_s > 0)) fail("lambda_s", "lambda_s must be > 0");
  if (!(bandwidth_hz > 0)) fail("W", "W must be > 0");
  if (!(p_m_max_w > 0)) fail("P_m_max", "P_m_max must be > 0");
  if (!(p_s_max_w > 0)) fail("P_s_max", "P_s_max must be > 0");
  if (!(p_m_fc_w > 0)) fail("P_m_fc", "P_m_fc must be > 0");
  if (!(p_s_fc_w > 0)) fail("P_s_fc", "P_s_fc must be > 0");
  if (!(rho_m > 0)) fail("rho_m", "rho_m must be > 0");
  if (!(rho_s > 0)) fail("rho_s", "rho_s must be > 0");
  if (!(bias_m > 0)) fail("B_m", "B_m must be > 0");
  if (!(bias_s > 0)) fail("B_s", "B_s must be > 0");
  if (!(gain_main > 0)) fail("M_gain", "M_gain must be positive (linear)");
  if (!(gain_side > 0)) fail("m_gain", "m_gain must be positive (linear)");
  if (!(a_los > 0)) fail("A_L", "A_L must be > 0");
  if (!(a_nlos > 0)) fail("A_NL", "A_NL must be > 0");
  if (!(alpha_los >= 2.0)) fail("alpha_L", "alpha_L must be >= 2");
  if (!(alpha_nlos >= alpha_los)) fail("alpha_NL", "alpha_NL must be >= alpha_L");
  if (!(beta_blockage >= 0)) fail("beta", "beta must be >= 0");
  if (!(noise_w > 0)) fail("N0", "N0 must be > 0");
  if (!(gamma0_lin > 0)) fail("gamma0", "gamma0 must be > 0");
  if (library_files < 1) fail("F", "F must be >= 1");
  if (cache_max < 0 || cache_max > library_files) fail("C_max", "C_max must lie in [0, F]");
  if (!(zipf_gamma > 0)) fail("gamma_p", "gamma_p must be > 0");
  if (!(file_size_bits > 0)) fail("s_bits", "s_bits must be > 0");
  if (!(omega_ca_w_per_bit >= 0)) fail("omega_ca", "omega_ca must be >= 0");
  if (!(theta_rad > 0 && theta_rad <= 2 * kPi)) fail("theta", "theta must lie in (0, 360] degrees");
  if (!(p_s_fc_w < p_s_max_w)) fail("P_s_fc", "P_s_fc must be < P_s_max");
  // MBS caches the full library and must retain positive transmit power.
  if (!(p_m_fc_w + omega_ca_w_per_bit * file_size_bits * library_files < p_m_max_w))
    fail("P_m_fc", "P_m_fc + omega_ca*s_bits*F must be < P_m_max");
  if (!(numeric.quad_rel_tol > 0)) fail("quad_rel_tol", "quad_rel_tol must be > 0");
  if (!(numeric.quad_abs_tol > 0)) fail("quad_abs_tol", "quad_abs_tol must be > 0");
  if (!(numeric.void_epsilon > 0 && numeric.void_epsilon < 1))
    fail("void_epsilon", "void_epsilon must lie in (0, 1)");
  if (!(numeric.inner_epsilon > 0 && numeric.inner_epsilon < 1))
    fail("inner_epsilon", "inner_epsilon must lie in (0, 1)");
  if (!(numeric.mc_window_radius_m > 0))
    fail("mc_window_radius", "mc_window_radius must be > 0");
}

SystemConfig default_config() { return SystemConfig{}; }

std::string default_config_text() {
  // Boundary units: powers in dBm, gains/thresholds in dB, theta in degrees.
  return
      "# iabnet configuration (defaults)\n"
      "lambda_s = 1e-4        # SBS density, 1/m^2\n"
      "lambda_m = 4e-5        # MBS density, 1/m^2\n"
      "W = 4e8                # total bandwidth, Hz\n"
      "P_s_max = 38.2         # max SBS power, dBm\n"
      "P_m_max = 60           # max MBS power, dBm\n"
      "P_s_fc = 20            # SBS fixed circuit power, dBm\n"
      "P_m_fc = 46            # MBS fixed circuit power, dBm\n"
      "rho_s = 1\n"
      "rho_m = 1.5\n"
      "B_s = 10               # association bias, linear\n"
      "B_m = 5\n"
      "M_gain = 10            # main-lobe gain, dB\n"
      "m_gain = -10           # side-lobe gain, dB\n"
      "theta = 30             # main-lobe beamwidth, degrees\n"
      "A_L = 1e-10            # LOS path-loss intercept\n"
      "A_NL = 1e-14           # NLOS path-loss intercept\n"
      "alpha_L = 2\n"
      "alpha_NL = 4\n"
      "beta = 2e-3            # blockage density, 1/m\n"
      "N0 = -90               # noise power, dBm\n"
      "gamma0 = 10            # SINR threshold, dB\n"
      "F = 1000               # library size, files\n"
      "C_max = 800            # max cache, files\n"
      "gamma_p = 1.0          # Zipf skewness\n"
      "s_bits = 8e8           # file size, bits (100 MB)\n"
      "omega_ca = 6.25e-12    # caching power, W/bit\n"
      "quad_rel_tol = 1e-8\n"
      "quad_abs_tol = 1e-12\n"
      "void_epsilon = 1e-12\n"
      "inner_epsilon = 1e-14\n"
      "mc_window_radius = 2000\n"
      "seed = 20240801\n";
}

namespace {

struct RawConfig {
  std::map<std::string, std::string> kv;
};

RawConfig parse_kv(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r\n");
    std::string body = line.substr(first, last - first + 1);
    auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    std::string key = trim(body.substr(0, eq));
    std::string val = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
    if (!raw.kv.emplace(key, val).second)
      throw ConfigError(key, "duplicate key '" + key + "'");
  }
  return raw;
}

double parse_number(const std::string& key, const std::string& val) {
  try {
    std::size_t pos = 0;
    double v = std::stod(val, &pos);
    if (pos != val.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "key '" + key + "': cannot parse value '" + val + "'");
  }
}

long long parse_integer(const std::string& key, const std::string& val) {
  double v = parse_number(key, val);
  long long n = static_cast<long long>(std::llround(v));
  if (std::fabs(v - static_cast<double>(n)) > 1e-9)
    throw ConfigError(key, "key '" + key + "': expected an integer, got '" + val + "'");
  return n;
}

}  // namespace

SystemConfig load_config_text(const std::string& text) {
  RawConfig raw = parse_kv(text);
  SystemConfig cfg;
  std::set<std::string> seen;
  auto take = [&](const char* key) -> const std::string* {
    auto it = raw.kv.find(key);
    if (it == raw.kv.end()) return nullptr;
    seen.insert(key);
    return &it->second;
  };
  auto num = [&](const char* key, double& field) {
    if (const std::string* v = take(key)) field = parse_number(key, *v);
  };
  auto num_dbm = [&](const char* key, double& field) {
    if (const std::string* v = take(key)) field = dbm_to_watt(parse_number(key, *v));
  };
  auto num_db = [&](const char* key, double& field) {
    if (const std::string* v = take(key)) field = db_to_linear(parse_number(key, *v));
  };
  auto num_int = [&](const char* key, int& field) {
    if (const std::string* v = take(key)) field = static_cast<int>(parse_integer(key, *v));
  };

  num("lambda_m", cfg.lambda_m);
  num("lambda_s", cfg.lambda_s);
  num("W", cfg.bandwidth_hz);
  num_dbm("P_m_max", cfg.p_m_max_w);
  num_dbm("P_s_max", cfg.p_s_max_w);
  num_dbm("P_m_fc", cfg.p_m_fc_w);
  num_dbm("P_s_fc", cfg.p_s_fc_w);
  num("rho_m", cfg.rho_m);
  num("rho_s", cfg.rho_s);
  num("B_m", cfg.bias_m);
  num("B_s", cfg.bias_s);
  num_db("M_gain", cfg.gain_main);
  num_db("m_gain", cfg.gain_side);
  if (const std::string* v = take("theta")) cfg.theta_rad = deg_to_rad(parse_number("theta", *v));
  num("A_L", cfg.a_los);
  num("A_NL", cfg.a_nlos);
  num("alpha_L", cfg.alpha_los);
  num("alpha_NL", cfg.alpha_nlos);
  num("beta", cfg.beta_blockage);
  num_dbm("N0", cfg.noise_w);
  num_db("gamma0", cfg.gamma0_lin);
  num_int("F", cfg.library_files);
  num_int("C_max", cfg.cache_max);
  num("gamma_p", cfg.zipf_gamma);
  num("s_bits", cfg.file_size_bits);
  num("omega_ca", cfg.omega_ca_w_per_bit);
  num("quad_rel_tol", cfg.numeric.quad_rel_tol);
  num("quad_abs_tol", cfg.numeric.quad_abs_tol);
  num("void_epsilon", cfg.numeric.void_epsilon);
  num("inner_epsilon", cfg.numeric.inner_epsilon);
  num("mc_window_radius", cfg.numeric.mc_window_radius_m);
  if (const std::string* v = take("seed"))
    cfg.numeric.seed = static_cast<std::uint64_t>(parse_integer("seed", *v));

  for (const auto& [key, value] : raw.kv) {
    (void)value;
    if (!seen.count(key)) throw ConfigError(key, "unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

SystemConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str());
}

std::map<std::string, double> config_key_values(const SystemConfig& cfg) {
  return {
      {"lambda_m", cfg.lambda_m},
      {"lambda_s", cfg.lambda_s},
      {"W", cfg.bandwidth_hz},
      {"P_m_max", watt_to_dbm(cfg.p_m_max_w)},
      {"P_s_max", watt_to_dbm(cfg.p_s_max_w)},
      {"P_m_fc", watt_to_dbm(cfg.p_m_fc_w)},
      {"P_s_fc", watt_to_dbm(cfg.p_s_fc_w)},
      {"rho_m", cfg.rho_m},
      {"rho_s", cfg.rho_s},
      {"B_m", cfg.bias_m},
      {"B_s", cfg.bias_s},
      {"M_gain", linear_to_db(cfg.gain_main)},
      {"m_gain", linear_to_db(cfg.gain_side)},
      {"theta", cfg.theta_rad * 180.0 / kPi},
      {"A_L", cfg.a_los},
      {"A_NL", cfg.a_nlos},
      {"alpha_L", cfg.alpha_los},
      {"alpha_NL", cfg.alpha_nlos},
      {"beta", cfg.beta_blockage},
      {"N0", watt_to_dbm(cfg.noise_w)},
      {"gamma0", linear_to_db(cfg.gamma0_lin)},
      {"F", static_cast<double>(cfg.library_files)},
      {"C_max", static_cast<double>(cfg.cache_max)},
      {"gamma_p", cfg.zipf_gamma},
      {"s_bits", cfg.file_size_bits},
      {"omega_ca", cfg.omega_ca_w_per_bit},
      {"quad_rel_tol", cfg.numeric.quad_rel_tol},
      {"quad_abs_tol", cfg.numeric.quad_abs_tol},
      {"void_epsilon", cfg.numeric.void_epsilon},
      {"inner_epsilon", cfg.numeric.inner_epsilon},
      {"mc_window_radius", cfg.numeric.mc_window_radius_m},
      {"seed", static_cast<double>(cfg.numeric.seed)},
  };
}

std::uint64_t config_hash(const SystemConfig& cfg) {
  std::uint64_t h = 14695981039346656037ULL;
  auto eat = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& [key, value] : config_key_values(cfg)) {
    eat(key);
    eat("=");
    eat(fmt17(value));
    eat("\n");
  }
  return h;
}

}  // namespace iabnet
