#include "uavsfl/subsolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavsfl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Flat solver vector: [xp(K), xb(K), xu(K), qx, qy, sigma] with
// xp = ln p, xb = ln b, xu = ln u. Positivity is built into the
// parametrization; boxes become barriers on the log coordinates.
struct Workspace {
  const SubproblemSpec* spec;
  int K;
  int dim;
  double payload;
  double bandwidth_total;
  double disc_r2;
  double q_scale;  // meters per solver unit; q coordinates solve as q/C
  double altitude2;
  double alpha;
  std::vector<double> demand_const;  // N*zeta*C*D*f^2 per user
  std::vector<double> e_ref;
  std::vector<double> lo_p, hi_p;    // log-space p box
  double lo_b, hi_b;
  double lo_u, hi_u;
  std::vector<double> xp_warm;
  double prox_p;

  int ip(int k) const { return k; }
  int ib(int k) const { return K + k; }
  int iu(int k) const { return 2 * K + k; }
  int iqx() const { return 3 * K; }
  int iqy() const { return 3 * K + 1; }
  int isig() const { return 3 * K + 2; }
};

Workspace make_workspace(const SubproblemSpec& spec) {
  const Scenario& s = *spec.scenario;
  const auto& P = s.params;
  Workspace w;
  w.spec = &spec;
  w.K = s.num_users();
  w.dim = 3 * w.K + 3;
  w.payload = P.payload_bits;
  w.bandwidth_total = P.bandwidth_hz;
  w.disc_r2 = P.placement_radius_m * P.placement_radius_m;
  w.q_scale = P.placement_radius_m;
  w.altitude2 = P.altitude_m * P.altitude_m;
  w.alpha = P.pathloss_exp;
  w.demand_const.resize(w.K);
  w.e_ref.resize(w.K);
  w.lo_p.resize(w.K);
  w.hi_p.resize(w.K);
  double max_user_r = 0.0;
  for (int k = 0; k < w.K; ++k) {
    const auto& u = s.users[k];
    w.demand_const[k] =
        u.local_iters * u.chip_coeff * u.workload_cycles() * spec.cpu_hz[k] * spec.cpu_hz[k];
    const double harvest_ref = spec.coeffs.uav_power_w * spec.coeffs.beta0 / spec.coeffs.u_bar[k];
    w.e_ref[k] = std::max({harvest_ref,
                           w.demand_const[k] + spec.tx_time_s[k] * kTxPowerFloorW, 1e-18});
    w.lo_p[k] = std::log(kTxPowerFloorW);
    w.hi_p[k] = std::log(u.p_max_w);
    max_user_r = std::max(max_user_r, std::hypot(u.pos_m.x, u.pos_m.y));
  }
  w.lo_b = std::log(kBandwidthFloorHz);
  w.hi_b = std::log(P.bandwidth_hz);
  const double u_floor = std::pow(P.altitude_m, P.pathloss_exp);
  const double reach = P.placement_radius_m + max_user_r + 10.0;
  const double u_cap = 10.0 * std::pow(w.altitude2 + reach * reach, P.pathloss_exp / 2.0);
  w.lo_u = std::log(0.5 * u_floor);
  w.hi_u = std::log(u_cap);
  w.xp_warm.assign(w.K, 0.0);
  w.prox_p = 0.0;
  return w;
}

// Normalized sigma-coupled constraints at a point in original coordinates.
// Layout per user: [rate, energy, placement].
void eval_constraints(const Workspace& w, const std::vector<double>& p,
                      const std::vector<double>& b, const std::vector<double>& u,
                      const Vec2& q, std::vector<double>& c) {
  const auto& spec = *w.spec;
  const Scenario& s = *spec.scenario;
  c.resize(3 * w.K);
  for (int k = 0; k < w.K; ++k) {
    const double rhat = surrogate_rate(b[k], p[k], u[k], spec.coeffs, k);
    c[3 * k + 0] = 1.0 - spec.tx_time_s[k] * rhat / w.payload;
    const double phi =
        phi_linearize(u[k], spec.coeffs.u_bar[k], spec.coeffs.uav_power_w, spec.coeffs.beta0);
    c[3 * k + 1] =
        (w.demand_const[k] + spec.tx_time_s[k] * p[k] - phi) / w.e_ref[k];
    const double r2 = norm2_sq(q, s.users[k].pos_m);
    c[3 * k + 2] =
        (std::pow(w.altitude2 + r2, w.alpha / 2.0) - u[k]) / spec.coeffs.u_bar[k];
  }
}

struct EvalResult {
  double f = kInf;          // barrier objective
  double sigma_true = kInf; // max sigma-coupled constraint
  bool in_domain = false;
};

// Evaluates the phase-I barrier objective
//   sigma + prox/2 |xp - xp_warm|^2 + mu * (coupled + hard barriers)
// and, when grad != nullptr, its gradient. Out-of-domain points return
// in_domain = false with f = inf.
EvalResult eval_objective(const Workspace& w, const std::vector<double>& x, double mu,
                          std::vector<double>* grad, std::vector<double>& cbuf,
                          std::vector<double>& pbuf, std::vector<double>& bbuf,
                          std::vector<double>& ubuf) {
  const auto& spec = *w.spec;
  const Scenario& s = *spec.scenario;
  EvalResult res;
  const int K = w.K;
  const double sigma = x[w.isig()];

  pbuf.resize(K);
  bbuf.resize(K);
  ubuf.resize(K);
  double sum_b = 0.0;
  for (int k = 0; k < K; ++k) {
    if (x[w.ip(k)] <= w.lo_p[k] || x[w.ip(k)] >= w.hi_p[k]) return res;
    if (x[w.ib(k)] <= w.lo_b || x[w.ib(k)] >= w.hi_b) return res;
    if (x[w.iu(k)] <= w.lo_u || x[w.iu(k)] >= w.hi_u) return res;
    pbuf[k] = std::exp(x[w.ip(k)]);
    bbuf[k] = std::exp(x[w.ib(k)]);
    ubuf[k] = std::exp(x[w.iu(k)]);
    sum_b += bbuf[k];
  }
  const double b_slack = (w.bandwidth_total - sum_b) / w.bandwidth_total;
  if (b_slack <= 0.0) return res;
  const Vec2 q{w.q_scale * x[w.iqx()], w.q_scale * x[w.iqy()]};
  const double q_slack = (w.disc_r2 - (q.x * q.x + q.y * q.y)) / w.disc_r2;
  if (q_slack <= 0.0) return res;

  eval_constraints(w, pbuf, bbuf, ubuf, q, cbuf);
  double sig_true = -kInf;
  for (double c : cbuf) sig_true = std::max(sig_true, c);
  res.sigma_true = sig_true;
  if (sigma <= sig_true) return res;  // sigma barrier domain

  double f = sigma;
  double barrier = 0.0;
  for (double c : cbuf) barrier -= std::log(sigma - c);
  for (int k = 0; k < K; ++k) {
    barrier -= std::log(x[w.ip(k)] - w.lo_p[k]) + std::log(w.hi_p[k] - x[w.ip(k)]);
    barrier -= std::log(x[w.ib(k)] - w.lo_b) + std::log(w.hi_b - x[w.ib(k)]);
    barrier -= std::log(x[w.iu(k)] - w.lo_u) + std::log(w.hi_u - x[w.iu(k)]);
  }
  barrier -= std::log(b_slack) + std::log(q_slack);
  f += mu * barrier;
  double prox = 0.0;
  for (int k = 0; k < K; ++k) {
    const double d = x[w.ip(k)] - w.xp_warm[k];
    prox += d * d;
  }
  f += 0.5 * w.prox_p * prox;

  if (!std::isfinite(f)) throw std::runtime_error("subsolver: non-finite objective");
  res.f = f;
  res.in_domain = true;
  if (!grad) return res;

  std::vector<double>& g = *grad;
  g.assign(w.dim, 0.0);
  g[w.isig()] = 1.0;

  for (int k = 0; k < K; ++k) {
    const double p = pbuf[k], b = bbuf[k], u = ubuf[k];
    const double wc_rate = mu / (sigma - cbuf[3 * k + 0]);
    const double wc_energy = mu / (sigma - cbuf[3 * k + 1]);
    const double wc_place = mu / (sigma - cbuf[3 * k + 2]);
    g[w.isig()] -= wc_rate + wc_energy + wc_place;

    // rate constraint: c = 1 - (t/s) * Rhat
    double dRb, dRp, dRu;
    surrogate_rate_grad(b, p, u, spec.coeffs, k, &dRb, &dRp, &dRu);
    const double ts = spec.tx_time_s[k] / w.payload;
    g[w.ip(k)] += wc_rate * (-ts * dRp * p);
    g[w.ib(k)] += wc_rate * (-ts * dRb * b);
    g[w.iu(k)] += wc_rate * (-ts * dRu * u);

    // energy constraint: c = (const + t*p - phi(u)) / e_ref
    g[w.ip(k)] += wc_energy * (spec.tx_time_s[k] * p / w.e_ref[k]);
    const double dphi = phi_linearize_grad(spec.coeffs.u_bar[k], spec.coeffs.uav_power_w,
                                           spec.coeffs.beta0);
    g[w.iu(k)] += wc_energy * (-dphi * u / w.e_ref[k]);

    // placement constraint: c = ((H^2 + r^2)^{a/2} - u)/u_bar
    const double r2 = norm2_sq(q, s.users[k].pos_m);
    const double pw = std::pow(w.altitude2 + r2, w.alpha / 2.0 - 1.0);
    const double scale = w.alpha * pw / spec.coeffs.u_bar[k];
    g[w.iu(k)] += wc_place * (-u / spec.coeffs.u_bar[k]);
    if (!spec.fix_uav_pos) {
      g[w.iqx()] += wc_place * scale * (q.x - s.users[k].pos_m.x) * w.q_scale;
      g[w.iqy()] += wc_place * scale * (q.y - s.users[k].pos_m.y) * w.q_scale;
    }

    // hard boxes on the log coordinates
    g[w.ip(k)] += mu * (-1.0 / (x[w.ip(k)] - w.lo_p[k]) + 1.0 / (w.hi_p[k] - x[w.ip(k)]));
    g[w.ib(k)] += mu * (-1.0 / (x[w.ib(k)] - w.lo_b) + 1.0 / (w.hi_b - x[w.ib(k)]));
    g[w.iu(k)] += mu * (-1.0 / (x[w.iu(k)] - w.lo_u) + 1.0 / (w.hi_u - x[w.iu(k)]));

    // bandwidth sum barrier
    g[w.ib(k)] += mu * b / (w.bandwidth_total * b_slack);

    // proximal anchor on log p
    g[w.ip(k)] += w.prox_p * (x[w.ip(k)] - w.xp_warm[k]);
  }
  if (!spec.fix_uav_pos) {
    g[w.iqx()] += mu * 2.0 * q.x * w.q_scale / (w.disc_r2 * q_slack);
    g[w.iqy()] += mu * 2.0 * q.y * w.q_scale / (w.disc_r2 * q_slack);
  }
  return res;
}

SubPoint point_from_x(const Workspace& w, const std::vector<double>& x) {
  SubPoint z;
  z.tx_power_w.resize(w.K);
  z.bandwidth_hz.resize(w.K);
  z.dist_alpha.resize(w.K);
  for (int k = 0; k < w.K; ++k) {
    z.tx_power_w[k] = std::exp(x[w.ip(k)]);
    z.bandwidth_hz[k] = std::exp(x[w.ib(k)]);
    z.dist_alpha[k] = std::exp(x[w.iu(k)]);
  }
  z.uav_pos_m = {w.q_scale * x[w.iqx()], w.q_scale * x[w.iqy()]};
  return z;
}

// Projects the warm start strictly inside every hard constraint.
std::vector<double> interior_start(const Workspace& w, const SubPoint& warm) {
  std::vector<double> x(w.dim, 0.0);
  const double nudge = 1e-6;
  double sum_b = 0.0;
  for (int k = 0; k < w.K; ++k) sum_b += std::max(warm.bandwidth_hz[k], kBandwidthFloorHz);
  double b_scale = 1.0;
  if (sum_b >= w.bandwidth_total * (1.0 - 1e-9))
    b_scale = w.bandwidth_total * (1.0 - 1e-6) / sum_b;

  for (int k = 0; k < w.K; ++k) {
    const double span_p = w.hi_p[k] - w.lo_p[k];
    x[w.ip(k)] = std::clamp(std::log(std::max(warm.tx_power_w[k], kTxPowerFloorW)),
                            w.lo_p[k] + nudge * span_p, w.hi_p[k] - nudge * span_p);
    const double span_b = w.hi_b - w.lo_b;
    x[w.ib(k)] =
        std::clamp(std::log(b_scale * std::max(warm.bandwidth_hz[k], kBandwidthFloorHz)),
                   w.lo_b + nudge * span_b, w.hi_b - nudge * span_b);
    const double span_u = w.hi_u - w.lo_u;
    x[w.iu(k)] = std::clamp(std::log(std::max(warm.dist_alpha[k], 1e-30)),
                            w.lo_u + nudge * span_u, w.hi_u - nudge * span_u);
  }
  Vec2 q = warm.uav_pos_m;
  const double qr = std::hypot(q.x, q.y);
  const double rmax = std::sqrt(w.disc_r2) * (1.0 - 1e-6);
  if (qr > rmax) {
    q.x *= rmax / qr;
    q.y *= rmax / qr;
  }
  x[w.iqx()] = q.x / w.q_scale;
  x[w.iqy()] = q.y / w.q_scale;
  return x;
}

}  // namespace

std::vector<double> subproblem_constraints(const SubproblemSpec& spec, const SubPoint& z) {
  Workspace w = make_workspace(spec);
  std::vector<double> c;
  eval_constraints(w, z.tx_power_w, z.bandwidth_hz, z.dist_alpha, z.uav_pos_m, c);
  return c;
}

std::vector<double> subproblem_constraint_grad(const SubproblemSpec& spec, const SubPoint& z,
                                               int ci) {
  Workspace w = make_workspace(spec);
  const int K = w.K;
  const int k = ci / 3;
  const int kind = ci % 3;
  std::vector<double> g(3 * K + 2, 0.0);
  const double p = z.tx_power_w[k], b = z.bandwidth_hz[k], u = z.dist_alpha[k];
  switch (kind) {
    case 0: {  // rate
      double dRb, dRp, dRu;
      surrogate_rate_grad(b, p, u, spec.coeffs, k, &dRb, &dRp, &dRu);
      const double ts = spec.tx_time_s[k] / w.payload;
      g[k] = -ts * dRp;
      g[K + k] = -ts * dRb;
      g[2 * K + k] = -ts * dRu;
      break;
    }
    case 1: {  // energy
      g[k] = spec.tx_time_s[k] / w.e_ref[k];
      g[2 * K + k] = -phi_linearize_grad(spec.coeffs.u_bar[k], spec.coeffs.uav_power_w,
                                         spec.coeffs.beta0) /
                     w.e_ref[k];
      break;
    }
    case 2: {  // placement
      const auto& pos = spec.scenario->users[k].pos_m;
      const double r2 = norm2_sq(z.uav_pos_m, pos);
      const double pw = std::pow(w.altitude2 + r2, w.alpha / 2.0 - 1.0);
      g[2 * K + k] = -1.0 / spec.coeffs.u_bar[k];
      g[3 * K] = w.alpha * pw * (z.uav_pos_m.x - pos.x) / spec.coeffs.u_bar[k];
      g[3 * K + 1] = w.alpha * pw * (z.uav_pos_m.y - pos.y) / spec.coeffs.u_bar[k];
      break;
    }
  }
  return g;
}

double max_hard_residual(const SubproblemSpec& spec, const SubPoint& z) {
  const Scenario& s = *spec.scenario;
  const auto& P = s.params;
  double worst = -kInf;
  double sum_b = 0.0;
  for (int k = 0; k < s.num_users(); ++k) {
    worst = std::max(worst, (z.tx_power_w[k] - s.users[k].p_max_w) / s.users[k].p_max_w);
    worst = std::max(worst, -z.tx_power_w[k] / s.users[k].p_max_w);
    sum_b += z.bandwidth_hz[k];
  }
  worst = std::max(worst, (sum_b - P.bandwidth_hz) / P.bandwidth_hz);
  const double C2 = P.placement_radius_m * P.placement_radius_m;
  const double q2 = z.uav_pos_m.x * z.uav_pos_m.x + z.uav_pos_m.y * z.uav_pos_m.y;
  worst = std::max(worst, (q2 - C2) / C2);
  return worst;
}

void clamp_u_to_bound(SubPoint& z, const Scenario& s) {
  const double H2 = s.params.altitude_m * s.params.altitude_m;
  for (int k = 0; k < s.num_users(); ++k) {
    const double r2 = norm2_sq(z.uav_pos_m, s.users[k].pos_m);
    z.dist_alpha[k] = std::pow(H2 + r2, s.params.pathloss_exp / 2.0);
  }
}

SubproblemResult solve_feasibility(const SubproblemSpec& spec, const SubPoint& warm_start,
                                   const SolverOptions& opt) {
  if (!spec.scenario) throw std::invalid_argument("subproblem spec without scenario");
  const int K = spec.scenario->num_users();
  if (spec.coeffs.num_users() != K || static_cast<int>(spec.tx_time_s.size()) != K ||
      static_cast<int>(spec.cpu_hz.size()) != K)
    throw std::invalid_argument("subproblem spec arrays must all have length K");
  for (int k = 0; k < K; ++k)
    if (!(spec.tx_time_s[k] > 0.0)) throw std::invalid_argument("tx_time must be > 0");

  Workspace w = make_workspace(spec);
  w.prox_p = opt.prox_p;

  std::vector<double> x = interior_start(w, warm_start);
  for (int k = 0; k < K; ++k) w.xp_warm[k] = x[w.ip(k)];

  // Seed sigma from the worst constraint at the projected start point.
  std::vector<double> cbuf, pbuf, bbuf, ubuf;
  {
    std::vector<double> p(K), b(K), u(K);
    for (int k = 0; k < K; ++k) {
      p[k] = std::exp(x[w.ip(k)]);
      b[k] = std::exp(x[w.ib(k)]);
      u[k] = std::exp(x[w.iu(k)]);
    }
    eval_constraints(w, p, b, u,
                     Vec2{w.q_scale * x[w.iqx()], w.q_scale * x[w.iqy()]}, cbuf);
  }
  double sig0 = -kInf;
  for (double c : cbuf) sig0 = std::max(sig0, c);

  SubproblemResult result;
  result.point = point_from_x(w, x);
  result.slack_sigma = sig0;

  // Fast path: a warm start already strictly feasible is returned as is.
  if (sig0 <= -opt.sigma_margin) {
    result.status = SubStatus::Feasible;
    result.inner_iters = 0;
    return result;
  }

  x[w.isig()] = sig0 + std::max(0.1, 0.1 * std::abs(sig0));

  // L-BFGS with backtracking over the barrier stages.
  const int dim = w.dim;
  const int hist = 8;
  std::vector<std::vector<double>> s_hist, y_hist;
  std::vector<double> rho_hist;

  std::vector<double> g(dim), g_new(dim), d(dim), x_new(dim);
  std::vector<double> best_x = x;
  double best_sigma = sig0;
  int total_iters = 0;

  int stages = 0;
  for (double m = opt.mu_initial; m >= opt.mu_final * (1.0 - 1e-12); m *= opt.mu_shrink)
    ++stages;
  const int per_stage_cap = std::max(40, opt.max_inner_iters / std::max(stages, 1));

  bool hit_cap = false;
  double mu = opt.mu_initial;
  for (int stage = 0; stage < stages && !hit_cap; ++stage, mu *= opt.mu_shrink) {
    s_hist.clear();
    y_hist.clear();
    rho_hist.clear();
    EvalResult cur = eval_objective(w, x, mu, &g, cbuf, pbuf, bbuf, ubuf);
    if (!cur.in_domain) {
      // sigma may sit below the stage's barrier needs after mu changes
      x[w.isig()] = best_sigma + std::max(0.1, 0.1 * std::abs(best_sigma));
      cur = eval_objective(w, x, mu, &g, cbuf, pbuf, bbuf, ubuf);
      if (!cur.in_domain) break;
    }

    for (int it = 0; it < per_stage_cap; ++it) {
      if (total_iters >= opt.max_inner_iters) {
        hit_cap = true;
        break;
      }
      double gmax = 0.0;
      for (double v : g) gmax = std::max(gmax, std::abs(v));
      if (gmax <= opt.grad_tol * std::max(1.0, std::abs(cur.f))) break;

      // two-loop recursion
      d = g;
      const int hsz = static_cast<int>(s_hist.size());
      std::vector<double> alpha_buf(hsz);
      for (int i = hsz - 1; i >= 0; --i) {
        double si_d = 0.0;
        for (int j = 0; j < dim; ++j) si_d += s_hist[i][j] * d[j];
        alpha_buf[i] = rho_hist[i] * si_d;
        for (int j = 0; j < dim; ++j) d[j] -= alpha_buf[i] * y_hist[i][j];
      }
      if (hsz > 0) {
        double yy = 0.0, sy = 0.0;
        for (int j = 0; j < dim; ++j) {
          yy += y_hist.back()[j] * y_hist.back()[j];
          sy += s_hist.back()[j] * y_hist.back()[j];
        }
        const double scale = sy / std::max(yy, 1e-300);
        for (int j = 0; j < dim; ++j) d[j] *= scale;
      }
      for (int i = 0; i < hsz; ++i) {
        double yi_d = 0.0;
        for (int j = 0; j < dim; ++j) yi_d += y_hist[i][j] * d[j];
        const double beta = rho_hist[i] * yi_d;
        for (int j = 0; j < dim; ++j) d[j] += (alpha_buf[i] - beta) * s_hist[i][j];
      }
      for (int j = 0; j < dim; ++j) d[j] = -d[j];

      double dg = 0.0;
      for (int j = 0; j < dim; ++j) dg += d[j] * g[j];
      if (dg >= 0.0) {  // not a descent direction; reset to steepest
        dg = 0.0;
        for (int j = 0; j < dim; ++j) {
          d[j] = -g[j];
          dg -= g[j] * g[j];
        }
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
      }

      // backtracking line search with domain guard
      double step = 1.0;
      EvalResult trial;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        for (int j = 0; j < dim; ++j) x_new[j] = x[j] + step * d[j];
        trial = eval_objective(w, x_new, mu, nullptr, cbuf, pbuf, bbuf, ubuf);
        if (trial.in_domain && trial.f <= cur.f + 1e-4 * step * dg) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;  // stage stalls

      trial = eval_objective(w, x_new, mu, &g_new, cbuf, pbuf, bbuf, ubuf);
      ++total_iters;

      // curvature update
      std::vector<double> sv(dim), yv(dim);
      double sy = 0.0;
      for (int j = 0; j < dim; ++j) {
        sv[j] = x_new[j] - x[j];
        yv[j] = g_new[j] - g[j];
        sy += sv[j] * yv[j];
      }
      if (sy > 1e-12) {
        if (static_cast<int>(s_hist.size()) == hist) {
          s_hist.erase(s_hist.begin());
          y_hist.erase(y_hist.begin());
          rho_hist.erase(rho_hist.begin());
        }
        s_hist.push_back(std::move(sv));
        y_hist.push_back(std::move(yv));
        rho_hist.push_back(1.0 / sy);
      }

      x.swap(x_new);
      g.swap(g_new);
      cur = trial;
      if (cur.sigma_true < best_sigma) {
        best_sigma = cur.sigma_true;
        best_x = x;
      }
      result.slack_path.push_back(best_sigma);
    }
  }

  result.point = point_from_x(w, best_x);
  result.slack_sigma = best_sigma;
  result.inner_iters = total_iters;
  if (best_sigma <= opt.feas_tol)
    result.status = SubStatus::Feasible;
  else if (hit_cap)
    result.status = SubStatus::MaxIters;
  else
    result.status = SubStatus::Infeasible;
  return result;
}

}  // namespace uavsfl
