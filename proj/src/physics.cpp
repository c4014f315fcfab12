#include "uavsfl/physics.hpp"

#include <algorithm>
#include <cmath>

namespace uavsfl {

Allocation Allocation::zeros(int k) {
  Allocation a;
  a.tx_power_w.assign(k, 0.0);
  a.cpu_hz.assign(k, 0.0);
  a.bandwidth_hz.assign(k, 0.0);
  a.tx_time_s.assign(k, 0.0);
  a.dist_alpha.assign(k, 0.0);
  return a;
}

double distance_3d(const Vec2& q, const Vec2& q_user, double altitude_m) {
  return std::sqrt(altitude_m * altitude_m + norm2_sq(q, q_user));
}

double channel_gain(double dist_m, const SystemParams& p) {
  return p.ref_gain_1m * std::pow(dist_m, -p.pathloss_exp);
}

double harvested_energy(double uav_power_w, double gain, const SystemParams& p) {
  return p.harvest_eff * p.frame_s * uav_power_w * gain;
}

double comp_time(const UserProfile& u, double cpu_hz) {
  return u.workload_cycles() / cpu_hz;
}

double comp_energy(const UserProfile& u, double cpu_hz) {
  return u.chip_coeff * u.workload_cycles() * cpu_hz * cpu_hz;
}

double tx_rate(double bandwidth_hz, double tx_power_w, double gain, double noise_psd) {
  if (bandwidth_hz <= 0.0 || tx_power_w <= 0.0) return 0.0;
  const double snr = tx_power_w * gain / (bandwidth_hz * noise_psd);
  return bandwidth_hz * std::log2(1.0 + snr);
}

ConstraintResiduals residuals(const Allocation& a, const Scenario& s) {
  const auto& P = s.params;
  const int K = s.num_users();
  ConstraintResiduals r;
  r.rate.resize(K);
  r.energy.resize(K);
  r.time.resize(K);

  double sum_b = 0.0;
  double worst_p = 0.0, worst_f = 0.0;
  for (int k = 0; k < K; ++k) {
    const auto& u = s.users[k];
    const double gain = channel_gain(distance_3d(a.uav_pos_m, u.pos_m, P.altitude_m), P);
    const double rate = tx_rate(a.bandwidth_hz[k], a.tx_power_w[k], gain, P.noise_psd_w_per_hz);
    r.rate[k] = (P.payload_bits - a.tx_time_s[k] * rate) / P.payload_bits;

    const double used = u.local_iters * comp_energy(u, a.cpu_hz[k]) +
                        a.tx_time_s[k] * a.tx_power_w[k];
    const double harvest = harvested_energy(a.uav_power_w, gain, P);
    r.energy[k] = (used - harvest) / std::max(harvest, 1e-30);

    r.time[k] = (u.local_iters * comp_time(u, a.cpu_hz[k]) + a.tx_time_s[k] - P.frame_s) /
                P.frame_s;

    sum_b += a.bandwidth_hz[k];
    worst_p = std::max(worst_p,
                       std::max(a.tx_power_w[k] - u.p_max_w, -a.tx_power_w[k]) / u.p_max_w);
    worst_f = std::max(worst_f, std::max(a.cpu_hz[k] - u.f_max_hz, u.f_min_hz - a.cpu_hz[k]) /
                                    u.f_max_hz);
  }
  r.bandwidth = (sum_b - P.bandwidth_hz) / P.bandwidth_hz;
  r.uav_power =
      std::max(a.uav_power_w - P.uav_pmax_w, -a.uav_power_w) / P.uav_pmax_w;
  r.user_power = worst_p;
  r.cpu_bounds = worst_f;
  const double qn2 = a.uav_pos_m.x * a.uav_pos_m.x + a.uav_pos_m.y * a.uav_pos_m.y;
  const double C2 = P.placement_radius_m * P.placement_radius_m;
  r.placement = (qn2 - C2) / C2;

  double mv = std::max({r.bandwidth, r.uav_power, r.user_power, r.cpu_bounds, r.placement});
  for (int k = 0; k < K; ++k)
    mv = std::max({mv, r.rate[k], r.energy[k], r.time[k]});
  r.max_violation = mv;
  return r;
}

}  // namespace uavsfl
