#pragma once

#include <vector>

#include "uavsfl/physics.hpp"
#include "uavsfl/scenario.hpp"

namespace uavsfl {

/// Coefficients of the concave rate minorant and the linearized harvest
/// bound, both expanded at the previous iterate (b_bar, p_bar, u_bar).
/// lambda/mu/nu live in the natural-log domain; a single 1/ln2 factor is
/// applied at the rate boundary.
struct SurrogateCoeffs {
  std::vector<double> lambda;
  std::vector<double> mu;
  std::vector<double> nu;
  std::vector<double> b_bar;
  std::vector<double> p_bar;
  std::vector<double> u_bar;
  double uav_power_w = 0.0;  // snapshot used by the harvest linearization
  double beta0 = 0.0;
  double g0 = 0.0;

  int num_users() const { return static_cast<int>(lambda.size()); }
};

/// Right-hand side of the logarithmic lower bound
///   tau*ln(1 + 1/(x*y)) >= rhs(x, y, tau; xb, yb, tb),
/// tight when (x, y, tau) = (xb, yb, tb). Throws on nonpositive input.
double log_bound_rhs(double x, double y, double tau, double x_bar, double y_bar, double tau_bar);

/// Quadratic upper bound on (u/u_bar)*(p_bar/p); equals 1 at the expansion
/// point.
double pi_bound(double p, double u, double p_bar, double u_bar);

/// Expansion points are clamped to the solver floors (b >= 1 kHz,
/// p >= 1e-6 W, u >= H^alpha) before the coefficients are computed.
SurrogateCoeffs make_coeffs(const Allocation& prev, double uav_power_w,
                            const SystemParams& params);

/// Concave minorant of the true rate b*log2(1 + p*g0/(b*u)), in bits/s.
double surrogate_rate(double b, double p, double u, const SurrogateCoeffs& c, int k);

/// d(surrogate_rate)/d(b, p, u).
void surrogate_rate_grad(double b, double p, double u, const SurrogateCoeffs& c, int k,
                         double* db, double* dp, double* du);

/// Linear under-estimator of uav_power*beta0/u, tangent at u_bar (joules).
double phi_linearize(double u, double u_bar, double uav_power_w, double beta0);

/// d(phi)/du = -uav_power*beta0/u_bar^2.
double phi_linearize_grad(double u_bar, double uav_power_w, double beta0);

// Solver domain floors shared with the subproblem.
inline constexpr double kBandwidthFloorHz = 1e3;
inline constexpr double kTxPowerFloorW = 1e-6;

}  // namespace uavsfl
