#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "uavsfl/physics.hpp"
#include "uavsfl/scenario.hpp"
#include "uavsfl/subsolver.hpp"

namespace uavsfl {

struct InfeasibleStartError : std::runtime_error {
  std::string constraint;
  InfeasibleStartError(const std::string& c, const std::string& detail)
      : std::runtime_error("infeasible start: constraint " + c + " (" + detail + ")"),
        constraint(c) {}
};

struct OuterState {
  Allocation iterate;
  std::vector<double> t_max;  // shrinking per-user upper brackets
  std::vector<double> t_min;
  double p_bracket_hi = 0.0;
  double p_bracket_lo = 0.0;
  int iteration = 0;
  bool t_bracket_collapsed = false;
  bool p_bracket_collapsed = false;
};

struct TraceRow {
  int iter = 0;
  double uav_power_w = 0.0;
  double max_residual = 0.0;
  SubStatus sub_status = SubStatus::Feasible;
  int sub_iters = 0;
  double wall_ms = 0.0;
};

using RunTrace = std::vector<TraceRow>;

enum class RunStatus { Converged, MaxOuterIters, SubproblemInfeasible };

struct RunOptions {
  double init_tx_frac = 0.04;   // nominal uplink share of the schedulable window
  double init_p_margin = 2.0;   // transmit-power headroom over the rate minimum
  double feas_tol = 1e-6;       // on the normalized residuals of the original problem
  SolverOptions solver;
  // Baseline pins (unset for the unrestricted algorithm).
  bool pin_cpu_to_max = false;      // FF
  bool pin_tx_time = false;         // FT: t frozen at the schedulability bound
  bool pin_uav_pos_origin = false;  // FUP
};

struct RunResult {
  Allocation allocation;  // last fully feasible iterate
  RunTrace trace;
  RunStatus status = RunStatus::Converged;
  int iterations = 0;
  double final_max_residual = 0.0;
};

/// Builds a feasible starting point: UAV at the user centroid (projected
/// into the placement disc), u at its bound, equal bandwidth split, a small
/// nominal uplink time, the energy-minimal schedulable CPU speed, transmit
/// power sized for the payload with margin, and full UAV power. Throws
/// InfeasibleStartError naming the violated constraint otherwise.
OuterState initialize(const Scenario& s, const RunOptions& opt = {});

/// Bisection-style update of t within [t_min, t_max]; shrinks the bracket
/// top to the chosen point. Flags (without failing) if the bracket inverts.
void update_time(OuterState& st, const Scenario& s, const RunOptions& opt);

/// Closed-form energy-minimal CPU speed for the current t, clamped to the
/// CPU box.
void update_frequency(OuterState& st, const Scenario& s, const RunOptions& opt);

/// Midpoint between the bracket top and the exact per-user power floor;
/// bracket top then drops to the floor. Everything is clamped to the global
/// cap so the iterate never violates the UAV power box.
void update_uav_power(OuterState& st, const Scenario& s, const RunOptions& opt);

RunResult run(const Scenario& s, const RunOptions& opt = {});

const char* to_string(RunStatus s);
const char* to_string(SubStatus s);

}  // namespace uavsfl
