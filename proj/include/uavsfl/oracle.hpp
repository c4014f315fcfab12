#pragma once

#include <functional>
#include <vector>

#include "uavsfl/physics.hpp"
#include "uavsfl/scenario.hpp"

namespace uavsfl {

/// Exhaustive-search resolution for the small-instance verifier. Evaluates
/// the TRUE model quantities only (never the surrogates).
struct GridSpec {
  int q_axis = 15;       // points per axis over the placement square
  int b_split = 5;       // interior bandwidth fractions (K = 2 only)
  int t_points = 9;
  int f_points = 7;
  int p_points = 6;
  double t_floor_s = 1e-3;
  long long max_evals = 10'000'000;
};

struct BruteForceResult {
  bool found = false;
  double uav_power_w = 0.0;
  Allocation argmin;
  long long evaluated = 0;
};

/// Grid minimum of the broadcast power over (q, b-split, t, f, p) for
/// K <= 2 users; per grid point the power is the exact per-user floor
/// with u at its bound. Throws std::invalid_argument for K > 2.
BruteForceResult brute_force_min_power(const Scenario& s, const GridSpec& g);

/// Max relative error between an analytic gradient and central differences.
double finite_diff_check(const std::function<double(const std::vector<double>&)>& fn,
                         const std::vector<double>& grad_analytic,
                         const std::vector<double>& point, double h);

}  // namespace uavsfl
