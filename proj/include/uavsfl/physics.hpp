#pragma once

#include <vector>

#include "uavsfl/scenario.hpp"

namespace uavsfl {

/// One full decision vector. tx_time_s is the uplink time per user;
/// dist_alpha is the auxiliary upper bound on d^alpha that replaces the
/// channel gain inside the solver (gain = ref_gain_1m / dist_alpha when the
/// bound is tight).
struct Allocation {
  double uav_power_w = 0.0;
  Vec2 uav_pos_m;
  std::vector<double> tx_power_w;   // p_k
  std::vector<double> cpu_hz;       // f_k
  std::vector<double> bandwidth_hz; // b_k
  std::vector<double> tx_time_s;    // t_k
  std::vector<double> dist_alpha;   // u_k >= d_k^alpha

  static Allocation zeros(int k);
  int num_users() const { return static_cast<int>(tx_power_w.size()); }
};

/// Normalized so that <= 0 means satisfied; each entry is scaled by its
/// constraint's right-hand side.
struct ConstraintResiduals {
  std::vector<double> rate;    // (s - t*R)/s
  std::vector<double> energy;  // (E_used - E_harvest)/E_harvest
  std::vector<double> time;    // (N*t_cp + t - T)/T
  double bandwidth = 0.0;      // (sum b - B)/B
  double uav_power = 0.0;      // box on P, scaled by uav_pmax
  double user_power = 0.0;     // worst box violation on p, scaled by p_max
  double cpu_bounds = 0.0;     // worst box violation on f, scaled by f_max
  double placement = 0.0;      // (|q|^2 - C^2)/C^2
  double max_violation = 0.0;
};

double distance_3d(const Vec2& q, const Vec2& q_user, double altitude_m);
double channel_gain(double dist_m, const SystemParams& p);
double harvested_energy(double uav_power_w, double gain, const SystemParams& p);

/// Per local iteration; callers multiply by local_iters for a round.
double comp_time(const UserProfile& u, double cpu_hz);
double comp_energy(const UserProfile& u, double cpu_hz);

/// Shannon FDMA rate in bits/s; continuous extension 0 at p = 0 or b = 0.
double tx_rate(double bandwidth_hz, double tx_power_w, double gain, double noise_psd);

ConstraintResiduals residuals(const Allocation& a, const Scenario& s);

}  // namespace uavsfl
