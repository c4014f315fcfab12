#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavsfl {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double norm2_sq(const Vec2& a, const Vec2& b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Global constants of the allocation problem. Powers in watts, times in
/// seconds, bandwidth in Hz; ref_gain_1m is the linear channel power ratio
/// at 1 m.
struct SystemParams {
  double bandwidth_hz = 20e6;
  double frame_s = 8.0;
  double altitude_m = 20.0;
  double placement_radius_m = 50.0;
  double harvest_eff = 0.9;         // in (0, 1]
  double ref_gain_1m = 0.1;         // linear, at d0 = 1 m
  double pathloss_exp = 2.0;        // >= 2 keeps the placement constraint convex
  double noise_psd_w_per_hz = 1e-13;
  double payload_bits = 1e5;
  double uav_pmax_w = 3.9811;
  double conv_eps = 1e-3;
  int max_outer_iters = 100;

  // beta0 folds the harvesting chain (efficiency, frame, reference gain)
  // into a single energy-per-(watt/u) constant; g0 is the rate-side SNR
  // constant so that SNR = p * g0 / (b * u).
  double beta0() const { return harvest_eff * frame_s * ref_gain_1m; }
  double g0() const { return ref_gain_1m / noise_psd_w_per_hz; }
};

struct UserProfile {
  Vec2 pos_m;
  double data_bits = 7.5e6;
  double cycles_per_bit = 15.0;
  double chip_coeff = 1e-28;   // J * s^2 / cycle^3 scale
  int local_iters = 4;
  double f_min_hz = 1e8;
  double f_max_hz = 1e9;
  double p_max_w = 0.01;

  double workload_cycles() const { return cycles_per_bit * data_bits; }
};

struct Scenario {
  SystemParams params;
  std::vector<UserProfile> users;
  std::uint64_t seed = 0;

  int num_users() const { return static_cast<int>(users.size()); }
};

/// Random-generation ranges for a scenario; users are placed uniformly on a
/// disc of the given radius.
struct GenerationSpec {
  int num_users = 25;
  double disc_radius_m = 50.0;
  double data_bits_lo = 5e6;
  double data_bits_hi = 1e7;
  double cycles_per_bit_lo = 10.0;
  double cycles_per_bit_hi = 20.0;
  double chip_coeff = 1e-28;
  int local_iters = 4;
  double f_min_hz = 1e8;
  double f_max_hz = 1e9;
  double user_pmax_w = 0.01;
  std::uint64_t seed = 0;
};

struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(const std::string& fld, const std::string& msg)
      : std::runtime_error("config field '" + fld + "': " + msg), field(fld) {}
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// Deterministic for a fixed spec (internal sampler, not std distributions).
Scenario generate_scenario(const SystemParams& params, const GenerationSpec& gen);

/// Per-user energy budget screening at a nominal transmission-time split.
/// Mirrors the optimizer's starting point, so PASS implies a feasible start
/// exists at full UAV power.
struct PrecheckUser {
  double harvest_j = 0.0;   // at P = uav_pmax, UAV at the user centroid
  double demand_j = 0.0;    // compute + transmit at the nominal split
  double margin = 0.0;      // harvest / demand
  bool schedulable = true;  // N*C*D/f_max < T
  bool pass = false;
};

struct PrecheckReport {
  std::vector<PrecheckUser> users;
  bool pass = true;  // vacuously true for K = 0
};

PrecheckReport precheck_feasibility(const Scenario& s, double tx_time_frac = 0.04,
                                    double p_margin = 2.0);

/// Throws ConfigError naming the offending field.
void validate(const SystemParams& p);
void validate(const UserProfile& u, int index);
void validate(const GenerationSpec& g);

// JSON config ingestion / emission (SI-unit field names).
struct Config {
  SystemParams params;
  GenerationSpec gen;
  std::vector<UserProfile> explicit_users;  // overrides gen when nonempty
  bool has_explicit_users = false;

  Scenario make_scenario() const;
  Scenario make_scenario(std::uint64_t seed_override) const;
};

Config load_config(const std::string& path);
Config parse_config(const std::string& json_text);
std::string config_to_json(const Config& c);

}  // namespace uavsfl
