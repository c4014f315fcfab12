#include "uavsfl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavsfl {

namespace {

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> v;
  if (n <= 1 || hi <= lo) {
    v.push_back(lo);
    return v;
  }
  const double llo = std::log(lo), lhi = std::log(hi);
  v.reserve(n);
  for (int i = 0; i < n; ++i)
    v.push_back(std::exp(llo + (lhi - llo) * i / (n - 1)));
  return v;
}

struct UserBest {
  bool feasible = false;
  double power = 0.0;  // per-user broadcast-power floor
  double t = 0.0, f = 0.0, p = 0.0;
};

// Given q (through u) and this user's bandwidth share, scan the (t, f, p)
// grid for the cheapest feasible combo. Users decouple once q and b are
// fixed, so the joint grid minimum is the max of per-user minima.
UserBest best_for_user(const UserProfile& u, double b, double dist_alpha,
                       const SystemParams& P, const GridSpec& g, long long& evals) {
  UserBest best;
  const double work = u.local_iters * u.workload_cycles();
  const double t_cap = P.frame_s - work / u.f_max_hz;
  if (t_cap <= g.t_floor_s) return best;

  const auto t_grid = log_spaced(g.t_floor_s, 0.98 * t_cap, g.t_points);
  auto f_grid = log_spaced(u.f_min_hz, u.f_max_hz, g.f_points);
  for (double t : t_grid) {
    const double f_closed =
        std::min(u.f_max_hz, std::max(u.f_min_hz, work / (P.frame_s - t) * (1.0 + 1e-12)));
    f_grid.push_back(f_closed);
  }
  const auto p_grid_base = log_spaced(1e-9, u.p_max_w, g.p_points);

  const double g0 = P.g0();
  for (double t : t_grid) {
    for (double f : f_grid) {
      if (work / f + t > P.frame_s) continue;
      const double e_cp = u.local_iters * u.chip_coeff * u.workload_cycles() * f * f;
      auto p_grid = p_grid_base;
      // the exact rate-minimal power for this (t, b) is the cheapest corner
      const double z = P.payload_bits / (t * b);
      const double p_min_rate = (std::pow(2.0, z) - 1.0) * b * dist_alpha / g0;
      if (p_min_rate <= u.p_max_w) p_grid.push_back(p_min_rate * (1.0 + 1e-9));
      for (double p : p_grid) {
        ++evals;
        if (p > u.p_max_w) continue;
        const double rate = b * std::log2(1.0 + p * g0 / (b * dist_alpha));
        if (t * rate < P.payload_bits) continue;
        const double power = dist_alpha * (e_cp + t * p) / P.beta0();
        if (!best.feasible || power < best.power) {
          best.feasible = true;
          best.power = power;
          best.t = t;
          best.f = f;
          best.p = p;
        }
      }
    }
  }
  return best;
}

}  // namespace

BruteForceResult brute_force_min_power(const Scenario& s, const GridSpec& g) {
  const int K = s.num_users();
  if (K > 2) throw std::invalid_argument("brute force oracle handles K <= 2 only");
  const auto& P = s.params;

  BruteForceResult res;
  const double C = P.placement_radius_m;

  std::vector<double> splits;
  if (K == 2) {
    for (int j = 1; j <= g.b_split; ++j)
      splits.push_back(static_cast<double>(j) / (g.b_split + 1));
  } else {
    splits.push_back(1.0);
  }

  // rough budget check before scanning
  {
    const long long per_user =
        static_cast<long long>(g.t_points) * (g.f_points + g.t_points) * (g.p_points + 1);
    const long long total = static_cast<long long>(g.q_axis) * g.q_axis *
                            static_cast<long long>(splits.size()) * K * per_user;
    if (total > g.max_evals)
      throw std::invalid_argument("grid exceeds the evaluation budget");
  }

  for (int iy = 0; iy < g.q_axis; ++iy) {
    for (int ix = 0; ix < g.q_axis; ++ix) {
      Vec2 q{-C + 2.0 * C * ix / (g.q_axis - 1), -C + 2.0 * C * iy / (g.q_axis - 1)};
      if (q.x * q.x + q.y * q.y > C * C) continue;
      std::vector<double> ua(K);
      for (int k = 0; k < K; ++k)
        ua[k] = std::pow(P.altitude_m * P.altitude_m + norm2_sq(q, s.users[k].pos_m),
                         P.pathloss_exp / 2.0);

      for (double frac : splits) {
        std::vector<double> b(K);
        b[0] = P.bandwidth_hz * frac;
        if (K == 2) b[1] = P.bandwidth_hz * (1.0 - frac);

        double point_power = 0.0;
        std::vector<UserBest> chosen(K);
        bool ok = true;
        for (int k = 0; k < K; ++k) {
          chosen[k] = best_for_user(s.users[k], b[k], ua[k], P, g, res.evaluated);
          if (!chosen[k].feasible) {
            ok = false;
            break;
          }
          point_power = std::max(point_power, chosen[k].power);
        }
        if (!ok || point_power > P.uav_pmax_w * (1.0 + 1e-12)) continue;
        if (!res.found || point_power < res.uav_power_w) {
          res.found = true;
          res.uav_power_w = point_power;
          res.argmin = Allocation::zeros(K);
          res.argmin.uav_power_w = point_power;
          res.argmin.uav_pos_m = q;
          for (int k = 0; k < K; ++k) {
            res.argmin.tx_power_w[k] = chosen[k].p;
            res.argmin.cpu_hz[k] = chosen[k].f;
            res.argmin.bandwidth_hz[k] = b[k];
            res.argmin.tx_time_s[k] = chosen[k].t;
            res.argmin.dist_alpha[k] = ua[k];
          }
        }
      }
    }
  }
  return res;
}

double finite_diff_check(const std::function<double(const std::vector<double>&)>& fn,
                         const std::vector<double>& grad_analytic,
                         const std::vector<double>& point, double h) {
  double worst = 0.0;
  std::vector<double> x = point;
  for (size_t i = 0; i < point.size(); ++i) {
    // steps scale with the coordinate so mixed-magnitude variables (watts
    // next to meters^alpha) difference cleanly
    const double hi = point[i] != 0.0 ? h * std::abs(point[i]) : h;
    x[i] = point[i] + hi;
    const double fp = fn(x);
    x[i] = point[i] - hi;
    const double fm = fn(x);
    x[i] = point[i];
    const double fd = (fp - fm) / (2.0 * hi);
    const double denom = std::max({1.0, std::abs(fd), std::abs(grad_analytic[i])});
    worst = std::max(worst, std::abs(fd - grad_analytic[i]) / denom);
  }
  return worst;
}

}  // namespace uavsfl
