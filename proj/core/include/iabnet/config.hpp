#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "iabnet/types.hpp"

namespace iabnet {

// Unit conversions applied once at the configuration boundary.  All math
// inside the library is linear: watts, hertz, radians, ratios.
double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);
double db_to_linear(double db);
double linear_to_db(double lin);
double deg_to_rad(double deg);

struct NumericParams {
  double quad_rel_tol = 1e-8;     // per-integral relative tolerance
  double quad_abs_tol = 1e-12;    // per-integral absolute tolerance
  double void_epsilon = 1e-12;    // outer integrals cut where exp(-pi*lambda*r^2) < this
  double inner_epsilon = 1e-14;   // interference integrand cutoff vs running max
  double mc_window_radius_m = 2000.0;
  std::uint64_t seed = 20240801;
};

// Every physical, cache, and numeric parameter of the network model.
// Fields are stored in linear/SI units; the file loader accepts dBm / dB /
// degrees where noted in the key table (see default_config_text()).
struct SystemConfig {
  double lambda_m = 4e-5;   // MBS density, 1/m^2
  double lambda_s = 1e-4;   // SBS density, 1/m^2
  double bandwidth_hz = 400e6;  // W, total mmWave bandwidth

  double p_m_max_w = 1000.0;    // 60 dBm
  double p_s_max_w = 6.606934480075964;  // 38.2 dBm
  double p_m_fc_w = 39.810717055349734;  // 46 dBm, fixed circuit power
  double p_s_fc_w = 0.1;                 // 20 dBm
  double rho_m = 1.5;  // power amplifier coefficients
  double rho_s = 1.0;

  double bias_m = 5.0;  // association bias factors B_m, B_s
  double bias_s = 10.0;

  double gain_main = 10.0;  // M, linear (10 dB)
  double gain_side = 0.1;   // m, linear (-10 dB)
  double theta_rad = 0.5235987755982988;  // main-lobe beamwidth, 30 deg

  double a_los = 1e-10;   // path-loss intercepts
  double a_nlos = 1e-14;
  double alpha_los = 2.0;  // path-loss exponents
  double alpha_nlos = 4.0;
  double beta_blockage = 2e-3;  // 1/m

  double noise_w = 1e-12;     // N0, -90 dBm
  double gamma0_lin = 10.0;   // SINR threshold, 10 dB

  int library_files = 1000;   // F
  int cache_max = 800;        // C_max, file units
  double zipf_gamma = 1.0;    // gamma_p
  double file_size_bits = 8e8;          // s, 100 MB
  double omega_ca_w_per_bit = 6.25e-12;

  NumericParams numeric;

  // Throws ConfigError naming the first violated invariant's key.
  void validate() const;
};

// Table-default configuration (the values above).
SystemConfig default_config();

// Canonical key=value text of the default configuration, suitable for
// --emit-default-config.  Parsing it back yields default_config() exactly.
std::string default_config_text();

// Flat key=value parser.  '#' starts a comment; blank lines ignored.
// Unknown keys and malformed values raise ConfigError with the key name;
// the result is validated before being returned.
SystemConfig load_config_text(const std::string& text);
SystemConfig load_config_file(const std::string& path);

// FNV-1a over the canonical sorted key=value serialization of the parsed
// values, so the hash is stable across key ordering and comment changes.
std::uint64_t config_hash(const SystemConfig& cfg);

// The canonical serialization itself (sorted keys, boundary units).
std::map<std::string, double> config_key_values(const SystemConfig& cfg);

}  // namespace iabnet
