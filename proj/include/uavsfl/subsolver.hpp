#pragma once

#include <vector>

#include "uavsfl/sca.hpp"
#include "uavsfl/scenario.hpp"

namespace uavsfl {

/// The convexified feasibility problem over (p, b, q, u) for fixed
/// (t, f, P): surrogate rate >= payload/t, linearized harvest covers the
/// energy demand, u dominates the placement power term, plus the hard
/// box/sum/disc constraints.
struct SubproblemSpec {
  SurrogateCoeffs coeffs;
  std::vector<double> tx_time_s;  // fixed t_k
  std::vector<double> cpu_hz;     // fixed f_k
  const Scenario* scenario = nullptr;
  bool fix_uav_pos = false;       // FUP: q frozen at warm-start value
};

struct SubPoint {
  std::vector<double> tx_power_w;
  std::vector<double> bandwidth_hz;
  std::vector<double> dist_alpha;
  Vec2 uav_pos_m;
};

enum class SubStatus { Feasible, Infeasible, MaxIters };

struct SubproblemResult {
  SubStatus status = SubStatus::Infeasible;
  SubPoint point;
  double slack_sigma = 0.0;  // best max normalized residual reached
  int inner_iters = 0;
  std::vector<double> slack_path;  // best slack after each accepted step
};

struct SolverOptions {
  double feas_tol = 1e-8;
  double sigma_margin = 1e-9;
  int max_inner_iters = 500;      // total across barrier stages
  double mu_initial = 1.0;
  double mu_final = 1e-7;
  double mu_shrink = 0.1;
  double grad_tol = 1e-9;
  // Proximal weight on log(p): the feasibility problem has a continuum of
  // solutions; anchoring p near the warm start keeps the transmit-energy
  // block from drifting between outer iterations.
  double prox_p = 1.0;
};

/// Normalized subproblem constraint values (<= 0 feasible), exposed for
/// gradient checks and convexity certificates in the tests.
/// Layout: per user [rate, energy, placement], so 3K entries.
std::vector<double> subproblem_constraints(const SubproblemSpec& spec, const SubPoint& z);

/// Gradient of constraint i w.r.t. the flat variable vector
/// [p_0..p_{K-1}, b_0.., u_0.., qx, qy] in the original (non-log) variables.
std::vector<double> subproblem_constraint_grad(const SubproblemSpec& spec, const SubPoint& z,
                                               int constraint_index);

double max_hard_residual(const SubproblemSpec& spec, const SubPoint& z);

SubproblemResult solve_feasibility(const SubproblemSpec& spec, const SubPoint& warm_start,
                                   const SolverOptions& opt = {});

/// Lowers each u_k to its placement bound at the point's q; keeps the
/// subproblem feasible since both the surrogate rate and the linearized
/// harvest improve as u decreases.
void clamp_u_to_bound(SubPoint& z, const Scenario& s);

}  // namespace uavsfl
