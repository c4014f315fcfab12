#include "uavsfl/sca.hpp"

#include <cmath>
#include <stdexcept>

namespace uavsfl {

namespace {
constexpr double kInvLn2 = 1.4426950408889634;  // 1/ln(2)

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw std::domain_error(std::string(name) + " must be > 0");
}
}  // namespace

double log_bound_rhs(double x, double y, double tau, double x_bar, double y_bar,
                  double tau_bar) {
  require_positive(x, "x");
  require_positive(y, "y");
  require_positive(tau, "tau");
  require_positive(x_bar, "x_bar");
  require_positive(y_bar, "y_bar");
  require_positive(tau_bar, "tau_bar");
  const double l = std::log1p(1.0 / (x_bar * y_bar));
  return 2.0 * tau_bar * l +
         tau_bar / (1.0 + x_bar * y_bar) * (2.0 - x / x_bar - y / y_bar) -
         tau_bar * tau_bar * l / tau;
}

double pi_bound(double p, double u, double p_bar, double u_bar) {
  require_positive(p, "p");
  require_positive(u, "u");
  require_positive(p_bar, "p_bar");
  require_positive(u_bar, "u_bar");
  const double a = u / u_bar + p_bar / p;
  return 0.25 * a * a;
}

SurrogateCoeffs make_coeffs(const Allocation& prev, double uav_power_w,
                            const SystemParams& params) {
  const int K = prev.num_users();
  SurrogateCoeffs c;
  c.lambda.resize(K);
  c.mu.resize(K);
  c.nu.resize(K);
  c.b_bar.resize(K);
  c.p_bar.resize(K);
  c.u_bar.resize(K);
  c.uav_power_w = uav_power_w;
  c.beta0 = params.beta0();
  c.g0 = params.g0();

  const double u_floor = std::pow(params.altitude_m, params.pathloss_exp);
  for (int k = 0; k < K; ++k) {
    const double b = std::max(prev.bandwidth_hz[k], kBandwidthFloorHz);
    const double p = std::max(prev.tx_power_w[k], kTxPowerFloorW);
    const double u = std::max(prev.dist_alpha[k], u_floor);
    const double snr = p * c.g0 / (b * u);
    const double l = std::log1p(snr);
    c.b_bar[k] = b;
    c.p_bar[k] = p;
    c.u_bar[k] = u;
    c.lambda[k] = 2.0 * b * l;
    c.mu[k] = b / (1.0 + b * u / (p * c.g0));
    c.nu[k] = b * b * l;
  }
  return c;
}

double surrogate_rate(double b, double p, double u, const SurrogateCoeffs& c, int k) {
  require_positive(b, "b");
  const double pi = pi_bound(p, u, c.p_bar[k], c.u_bar[k]);
  return kInvLn2 *
         (c.lambda[k] + c.mu[k] * (2.0 - pi - b / c.b_bar[k]) - c.nu[k] / b);
}

void surrogate_rate_grad(double b, double p, double u, const SurrogateCoeffs& c, int k,
                         double* db, double* dp, double* du) {
  const double a = u / c.u_bar[k] + c.p_bar[k] / p;
  // d(pi)/dp = -(a/2) * p_bar/p^2,  d(pi)/du = (a/2) / u_bar
  *db = kInvLn2 * (-c.mu[k] / c.b_bar[k] + c.nu[k] / (b * b));
  *dp = kInvLn2 * c.mu[k] * 0.5 * a * c.p_bar[k] / (p * p);
  *du = -kInvLn2 * c.mu[k] * 0.5 * a / c.u_bar[k];
}

double phi_linearize(double u, double u_bar, double uav_power_w, double beta0) {
  if (!(u_bar > 0.0)) throw std::domain_error("u_bar must be > 0");
  const double h = uav_power_w * beta0;
  return h / u_bar - h / (u_bar * u_bar) * (u - u_bar);
}

double phi_linearize_grad(double u_bar, double uav_power_w, double beta0) {
  return -uav_power_w * beta0 / (u_bar * u_bar);
}

}  // namespace uavsfl
