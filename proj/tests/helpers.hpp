#pragma once

#include <random>

#include "uavsfl/scenario.hpp"

namespace uavsfl::test {

// Standard defaults used throughout the tests. The noise level is the
// library default (interference-limited effective density); unit tests that
// pin thermal-noise values pass their own constants explicitly.
inline SystemParams default_params() {
  SystemParams p;
  p.bandwidth_hz = 20e6;
  p.frame_s = 8.0;
  p.altitude_m = 20.0;
  p.placement_radius_m = 50.0;
  p.harvest_eff = 0.9;
  p.ref_gain_1m = 0.1;
  p.pathloss_exp = 2.0;
  p.noise_psd_w_per_hz = 1e-13;
  p.payload_bits = 1e5;
  p.uav_pmax_w = 3.9811;
  p.conv_eps = 1e-3;
  p.max_outer_iters = 100;
  return p;
}

inline GenerationSpec default_gen(std::uint64_t seed = 7) {
  GenerationSpec g;
  g.seed = seed;
  return g;
}

inline UserProfile user_at(double x, double y, double data_bits = 7.5e6,
                           double cycles_per_bit = 15.0) {
  UserProfile u;
  u.pos_m = {x, y};
  u.data_bits = data_bits;
  u.cycles_per_bit = cycles_per_bit;
  return u;
}

inline Scenario single_user_scenario(double x = 0.0, double y = 0.0) {
  Scenario s;
  s.params = default_params();
  s.users.push_back(user_at(x, y));
  return s;
}

// Deterministic test-local sampler.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double u01() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
  double range(double lo, double hi) { return lo + (hi - lo) * u01(); }
  double log_range(double lo, double hi) {
    return lo * std::exp(u01() * std::log(hi / lo));
  }
};

}  // namespace uavsfl::test
