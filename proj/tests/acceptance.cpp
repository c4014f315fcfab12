// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run a single criterion with `acceptance <number>`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "uavsfl/baselines.hpp"
#include "uavsfl/harness.hpp"
#include "uavsfl/optimizer.hpp"
#include "uavsfl/oracle.hpp"
#include "uavsfl/subsolver.hpp"

using namespace uavsfl;
using namespace uavsfl::test;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
  void note(const std::string& what) {
    if (ok) detail = what;
  }
};

double now_s() {
  using clock = std::chrono::steady_clock;
  static const auto t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

// ---------------------------------------------------------------------- 1
Check surrogate_correctness() {
  Check chk;
  const auto t0 = std::chrono::steady_clock::now();
  SystemParams params = default_params();
  Rng rng(1001);

  for (int i = 0; i < 100000; ++i) {
    // log bound
    const double x = rng.log_range(1e-2, 1e2), y = rng.log_range(1e-2, 1e2);
    const double t = rng.log_range(1e-2, 1e2);
    const double xb = rng.log_range(1e-2, 1e2), yb = rng.log_range(1e-2, 1e2);
    const double tb = rng.log_range(1e-2, 1e2);
    const double lhs = t * std::log1p(1.0 / (x * y));
    if (lhs < log_bound_rhs(x, y, t, xb, yb, tb) - 1e-12 * std::abs(lhs) - 1e-15) {
      chk.fail("log bound violated");
      break;
    }

    // rate minorant + tightness
    Allocation prev = Allocation::zeros(1);
    prev.bandwidth_hz[0] = rng.log_range(1e4, 2e7);
    prev.tx_power_w[0] = rng.log_range(1e-6, 1e-2);
    prev.dist_alpha[0] = rng.log_range(400.0, 5e3);
    const double uav_p = rng.log_range(0.1, 100.0);
    const auto c = make_coeffs(prev, uav_p, params);
    const double b2 = c.b_bar[0] * rng.log_range(0.2, 5.0);
    const double p2 = c.p_bar[0] * rng.log_range(0.2, 5.0);
    const double u2 = c.u_bar[0] * rng.log_range(0.2, 5.0);
    const double truth = b2 * std::log2(1.0 + p2 * params.g0() / (b2 * u2));
    if (surrogate_rate(b2, p2, u2, c, 0) > truth + 1e-9 * std::abs(truth) + 1e-12) {
      chk.fail("rate surrogate exceeded the true rate");
      break;
    }
    const double at_exp = surrogate_rate(c.b_bar[0], c.p_bar[0], c.u_bar[0], c, 0);
    const double true_exp =
        c.b_bar[0] * std::log2(1.0 + c.p_bar[0] * params.g0() / (c.b_bar[0] * c.u_bar[0]));
    if (std::abs(at_exp - true_exp) > 1e-9 * std::abs(true_exp)) {
      chk.fail("rate surrogate not tight at the expansion point");
      break;
    }

    // harvest linearization + tangency
    const double u3 = c.u_bar[0] * rng.log_range(0.2, 5.0);
    const double exact = uav_p * params.beta0() / u3;
    if (phi_linearize(u3, c.u_bar[0], uav_p, params.beta0()) > exact * (1.0 + 1e-12)) {
      chk.fail("harvest linearization exceeded the exact value");
      break;
    }
    const double at_bar = phi_linearize(c.u_bar[0], c.u_bar[0], uav_p, params.beta0());
    const double exact_bar = uav_p * params.beta0() / c.u_bar[0];
    if (std::abs(at_bar - exact_bar) > 1e-9 * exact_bar) {
      chk.fail("harvest linearization not tight at the expansion point");
      break;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= 5.0) chk.fail(fmt("runtime %.2f s exceeds 5 s", secs));
  if (chk.ok) chk.note(fmt("3x100000 samples in %.2f s", secs));
  return chk;
}

// ---------------------------------------------------------------------- 2
Check gradient_correctness() {
  Check chk;
  const auto t0 = std::chrono::steady_clock::now();
  Scenario sc;
  sc.params = default_params();
  sc.users = {user_at(15.0, 0.0), user_at(-10.0, 8.0)};
  const int K = 2;

  Allocation prev = Allocation::zeros(K);
  prev.uav_pos_m = {0, 0};
  for (int k = 0; k < K; ++k) {
    prev.bandwidth_hz[k] = sc.params.bandwidth_hz / K;
    prev.tx_power_w[k] = 1e-3;
    prev.dist_alpha[k] = 600.0;
    prev.tx_time_s[k] = 0.3;
    prev.cpu_hz[k] = 1.1e8;
  }
  SubproblemSpec spec;
  spec.coeffs = make_coeffs(prev, 2.0, sc.params);
  spec.tx_time_s = prev.tx_time_s;
  spec.cpu_hz = prev.cpu_hz;
  spec.scenario = &sc;

  Rng rng(1002);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    SubPoint z;
    for (int k = 0; k < K; ++k) {
      z.tx_power_w.push_back(rng.log_range(1e-5, 9e-3));
      z.bandwidth_hz.push_back(rng.log_range(1e5, 8e6));
      z.dist_alpha.push_back(rng.log_range(450.0, 5e3));
    }
    z.uav_pos_m = {rng.range(-30, 30), rng.range(-30, 30)};
    std::vector<double> flat(3 * K + 2);
    for (int k = 0; k < K; ++k) {
      flat[k] = z.tx_power_w[k];
      flat[K + k] = z.bandwidth_hz[k];
      flat[2 * K + k] = z.dist_alpha[k];
    }
    flat[3 * K] = z.uav_pos_m.x;
    flat[3 * K + 1] = z.uav_pos_m.y;

    for (int ci = 0; ci < 3 * K; ++ci) {
      auto value = [&](const std::vector<double>& v) {
        SubPoint zz;
        for (int k = 0; k < K; ++k) {
          zz.tx_power_w.push_back(v[k]);
          zz.bandwidth_hz.push_back(v[K + k]);
          zz.dist_alpha.push_back(v[2 * K + k]);
        }
        zz.uav_pos_m = {v[3 * K], v[3 * K + 1]};
        return subproblem_constraints(spec, zz)[ci];
      };
      const auto grad = subproblem_constraint_grad(spec, z, ci);
      worst = std::max(worst, finite_diff_check(value, grad, flat, 1e-6));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (worst > 1e-5) chk.fail(fmt("max relative gradient error %.3g", worst));
  if (secs >= 5.0) chk.fail(fmt("runtime %.2f s exceeds 5 s", secs));
  if (chk.ok) chk.note(fmt("max error %.2g in %.2f s", worst, secs));
  return chk;
}

// ------------------------------------------------------------------- 3, 4
struct E2EResults {
  std::vector<RunResult> runs;
  int precheck_failures = 0;
};

E2EResults& e2e_runs() {
  static E2EResults cache;
  if (!cache.runs.empty()) return cache;
  const SystemParams params = default_params();  // strict 36 dBm cap
  std::uint64_t seed = 0;
  while (cache.runs.size() < 50 && seed < 500) {
    const Scenario s = generate_scenario(params, default_gen(seed++));
    if (!precheck_feasibility(s).pass) {
      ++cache.precheck_failures;
      continue;
    }
    cache.runs.push_back(run(s));
  }
  return cache;
}

Check end_to_end_feasibility() {
  Check chk;
  const auto& res = e2e_runs();
  if (res.runs.size() < 50) {
    chk.fail("could not collect 50 precheck-passing scenarios");
    return chk;
  }
  double worst_wall = 0.0, worst_resid = 0.0;
  int worst_iters = 0;
  for (const auto& r : res.runs) {
    if (r.status != RunStatus::Converged) chk.fail("a run failed to converge");
    if (r.iterations > 100) chk.fail("a run exceeded 100 outer iterations");
    if (r.final_max_residual > 1e-6)
      chk.fail(fmt("final residual %.3g exceeds 1e-6", r.final_max_residual));
    const double wall = r.trace.back().wall_ms / 1e3;
    if (wall > 10.0) chk.fail(fmt("a run took %.2f s (> 10 s)", wall));
    worst_wall = std::max(worst_wall, wall);
    worst_resid = std::max(worst_resid, r.final_max_residual);
    worst_iters = std::max(worst_iters, r.iterations);
  }
  if (chk.ok)
    chk.note(fmt("50 runs converged; worst: %.2f s, %.0f iters, residual %.2g", worst_wall,
                 static_cast<double>(worst_iters), worst_resid) +
             fmt(" (%.0f precheck rejects)", static_cast<double>(res.precheck_failures)));
  return chk;
}

Check convergence_shape() {
  Check chk;
  const auto& res = e2e_runs();
  if (res.runs.size() < 50) {
    chk.fail("no e2e runs available");
    return chk;
  }
  int within_30 = 0;
  for (const auto& r : res.runs) {
    for (size_t i = 1; i < r.trace.size(); ++i)
      if (r.trace[i].uav_power_w > r.trace[i - 1].uav_power_w + 1e-9)
        chk.fail("a power trace increased");
    if (r.status == RunStatus::Converged && r.iterations <= 30) ++within_30;
  }
  const double frac = within_30 / static_cast<double>(res.runs.size());
  if (frac < 0.9) chk.fail(fmt("only %.0f%% of seeds converged within 30 iterations", 100 * frac));
  if (chk.ok) chk.note(fmt("all traces nonincreasing; %.0f%% within 30 iterations", 100 * frac));
  return chk;
}

// ------------------------------------------------------------------ 5-8
Config headroom_config() {
  Config c;
  c.params = default_params();
  c.params.uav_pmax_w = 1000.0;  // keeps the pinned baselines energy-feasible
  c.gen = default_gen(0);
  return c;
}

std::vector<SweepAggregate> sweep_means(SweepParam param, const std::vector<double>& values,
                                        int seeds) {
  SweepSpec spec;
  spec.base = headroom_config();
  spec.param = param;
  spec.values = values;
  spec.seeds = seeds;
  spec.methods = {Method::SFL};
  return run_sweep(spec).aggregates;
}

Check trend_local_iters() {
  Check chk;
  const auto agg = sweep_means(SweepParam::LocalIters, {2, 4, 6, 8}, 20);
  for (size_t i = 1; i < agg.size(); ++i) {
    if (agg[i].mean_power_w <= agg[i - 1].mean_power_w)
      chk.fail(fmt("mean P not strictly increasing at value %.0f", agg[i].value));
    if (agg[i].mean_comp_time_s <= agg[i - 1].mean_comp_time_s)
      chk.fail(fmt("mean computation time not increasing at value %.0f", agg[i].value));
    if (agg[i].mean_tx_time_s >= agg[i - 1].mean_tx_time_s)
      chk.fail(fmt("mean transmission time not decreasing at value %.0f", agg[i].value));
  }
  if (chk.ok)
    chk.note(fmt("P %.3g -> %.3g W across N 2..8", agg.front().mean_power_w,
                 agg.back().mean_power_w));
  return chk;
}

Check trend_payload() {
  Check chk;
  const auto agg = sweep_means(SweepParam::Payload, {5e4, 1e5, 1.5e5, 2e5}, 20);
  for (size_t i = 1; i < agg.size(); ++i)
    if (agg[i].mean_power_w <= agg[i - 1].mean_power_w)
      chk.fail(fmt("mean P not strictly increasing at payload %.3g", agg[i].value));
  if (chk.ok)
    chk.note(fmt("P %.3g -> %.3g W across s 50..200 Kbit", agg.front().mean_power_w,
                 agg.back().mean_power_w));
  return chk;
}

Check trend_bandwidth() {
  Check chk;
  const auto agg = sweep_means(SweepParam::Bandwidth, {1e7, 1.5e7, 2e7, 2.5e7, 3e7}, 20);
  for (size_t i = 1; i < agg.size(); ++i)
    if (agg[i].mean_power_w > agg[i - 1].mean_power_w * (1.0 + 1e-9))
      chk.fail(fmt("mean P increased at bandwidth %.3g", agg[i].value));
  const double total_change =
      std::abs(agg.back().mean_power_w - agg.front().mean_power_w) / agg.front().mean_power_w;
  if (total_change > 0.20)
    chk.fail(fmt("total relative change %.1f%% exceeds 20%%", 100 * total_change));
  if (chk.ok)
    chk.note(fmt("P %.4g -> %.4g W (change %.1f%%)", agg.front().mean_power_w,
                 agg.back().mean_power_w, -100 * total_change));
  return chk;
}

Check baseline_dominance() {
  Check chk;
  const Config cfg = headroom_config();
  const int seeds = 20;
  const CompareOutput out = run_compare(cfg, seeds);

  // per-seed dominance
  for (int sd = 0; sd < seeds; ++sd) {
    const std::uint64_t seed = cfg.gen.seed + static_cast<std::uint64_t>(sd);
    double sfl = -1.0;
    for (const auto& r : out.rows)
      if (r.seed == seed && r.method == "sfl") sfl = r.uav_power_w;
    for (const auto& r : out.rows) {
      if (r.seed != seed || r.method == "sfl") continue;
      if (r.status != "converged") chk.fail("a baseline run failed: " + r.method);
      if (sfl > r.uav_power_w + 1e-6)
        chk.fail(fmt("seed %0.f: sfl %.6g exceeds ", static_cast<double>(sd), sfl) + r.method +
                 fmt(" %.6g", r.uav_power_w));
    }
  }

  double mean_ft = 0, mean_ff = 0, mean_fup = 0;
  for (const auto& s : out.summary) {
    if (s.mean_reduction_pct <= 0.0)
      chk.fail("mean reduction not strictly positive for " + s.method);
    if (s.method == "ft") mean_ft = s.mean_power_w;
    if (s.method == "ff") mean_ff = s.mean_power_w;
    if (s.method == "fup") mean_fup = s.mean_power_w;
  }
  if (!(mean_ft >= mean_ff && mean_ff >= mean_fup))
    chk.fail(fmt("mean-P ordering broken: ft %.4g, ff %.4g, fup %.4g", mean_ft, mean_ff,
                 mean_fup));
  if (chk.ok)
    chk.note(fmt("mean P: ft %.4g >= ff %.4g >= fup %.4g W", mean_ft, mean_ff, mean_fup));
  return chk;
}

// ---------------------------------------------------------------------- 9
Check oracle_equivalence() {
  Check chk;
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1009);
  double worst_ratio = 0.0;

  auto check_case = [&](const Scenario& s, const GridSpec& g) {
    const RunResult alg = run(s);
    if (alg.status != RunStatus::Converged) {
      chk.fail("optimizer failed on an oracle scenario");
      return;
    }
    const auto oracle = brute_force_min_power(s, g);
    if (!oracle.found) {
      chk.fail("oracle found no feasible grid point");
      return;
    }
    if (residuals(oracle.argmin, s).max_violation > 1e-9) {
      chk.fail("oracle argmin violates the true constraints");
      return;
    }
    const double ratio = alg.allocation.uav_power_w / oracle.uav_power_w;
    worst_ratio = std::max(worst_ratio, ratio);
    if (ratio > 1.15)
      chk.fail(fmt("optimizer %.4g vs oracle %.4g (ratio %.3f)", alg.allocation.uav_power_w,
                   oracle.uav_power_w, ratio));
  };

  for (int i = 0; i < 10; ++i) {
    Scenario s;
    s.params = default_params();
    const double r = 40.0 * std::sqrt(rng.u01());
    const double th = 2 * M_PI * rng.u01();
    s.users = {user_at(r * std::cos(th), r * std::sin(th), rng.range(5e6, 1e7),
                       rng.range(10, 20))};
    GridSpec g;
    g.q_axis = 21;
    g.t_points = 12;
    g.f_points = 8;
    g.p_points = 8;
    check_case(s, g);
  }
  for (int i = 0; i < 5; ++i) {
    Scenario s;
    s.params = default_params();
    for (int k = 0; k < 2; ++k) {
      const double r = 40.0 * std::sqrt(rng.u01());
      const double th = 2 * M_PI * rng.u01();
      s.users.push_back(user_at(r * std::cos(th), r * std::sin(th), rng.range(5e6, 1e7),
                                rng.range(10, 20)));
    }
    GridSpec g;
    g.q_axis = 15;
    g.b_split = 7;
    g.t_points = 10;
    g.f_points = 7;
    g.p_points = 6;
    check_case(s, g);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > 120.0) chk.fail(fmt("runtime %.1f s exceeds 2 min", secs));
  if (chk.ok) chk.note(fmt("worst optimizer/oracle ratio %.3f in %.1f s", worst_ratio, secs));
  return chk;
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    const char* name;
    std::function<Check()> fn;
  };
  const std::vector<Criterion> criteria = {
      {"surrogate correctness", surrogate_correctness},
      {"gradient correctness", gradient_correctness},
      {"end-to-end feasibility", end_to_end_feasibility},
      {"convergence shape", convergence_shape},
      {"trend vs local iterations", trend_local_iters},
      {"trend vs payload size", trend_payload},
      {"trend vs bandwidth", trend_bandwidth},
      {"baseline dominance and ordering", baseline_dominance},
      {"oracle equivalence", oracle_equivalence},
  };

  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && static_cast<int>(i + 1) != only) continue;
    const double t0 = now_s();
    const Check chk = criteria[i].fn();
    const double dt = now_s() - t0;
    std::printf("[%s] criterion %zu: %s (%.1f s)%s%s\n", chk.ok ? "PASS" : "FAIL", i + 1,
                criteria[i].name, dt, chk.detail.empty() ? "" : " - ",
                chk.detail.c_str());
    std::fflush(stdout);
    if (!chk.ok) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
