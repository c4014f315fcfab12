#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uavsfl/harness.hpp"
#include "uavsfl/optimizer.hpp"

using namespace uavsfl;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRun = 1;

struct CommonFlags {
  std::string config_path;
  double uav_pmax_dbm = 0.0;
  bool has_uav_pmax_dbm = false;
  double noise_dbm_hz = 0.0;
  bool has_noise_dbm_hz = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "scenario config (JSON)")->required();
  cmd->add_option("--uav-pmax-dbm", f.uav_pmax_dbm, "override UAV power cap (dBm)")
      ->each([&f](const std::string&) { f.has_uav_pmax_dbm = true; });
  cmd->add_option("--noise-dbm-per-hz", f.noise_dbm_hz, "override noise PSD (dBm/Hz)")
      ->each([&f](const std::string&) { f.has_noise_dbm_hz = true; });
}

Config load_with_overrides(const CommonFlags& f) {
  Config cfg = load_config(f.config_path);
  if (f.has_uav_pmax_dbm) cfg.params.uav_pmax_w = dbm_to_watts(f.uav_pmax_dbm);
  if (f.has_noise_dbm_hz) cfg.params.noise_psd_w_per_hz = dbm_to_watts(f.noise_dbm_hz);
  validate(cfg.params);
  return cfg;
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> vals;
  std::string cur;
  for (char c : csv + ",") {
    if (c == ',') {
      if (!cur.empty()) vals.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return vals;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV broadcast-power minimization for wirelessly powered federated learning"};
  app.require_subcommand(1);

  // run
  auto* c_run = app.add_subcommand("run", "single optimization run, trace CSV out");
  CommonFlags run_flags;
  add_common(c_run, run_flags);
  std::uint64_t run_seed = 0;
  bool has_run_seed = false;
  c_run->add_option("--seed", run_seed, "scenario seed (overrides config)")
      ->each([&](const std::string&) { has_run_seed = true; });
  std::string run_out = "trace.csv";
  c_run->add_option("--out", run_out, "trace CSV path");

  // sweep
  auto* c_sweep = app.add_subcommand("sweep", "parameter sweep, CSV out");
  CommonFlags sweep_flags;
  add_common(c_sweep, sweep_flags);
  std::string sweep_param = "nk", sweep_values_csv, sweep_methods_csv = "sfl";
  int sweep_seeds = 20;
  std::string sweep_out = "sweep.csv";
  c_sweep->add_option("--param", sweep_param, "nk|payload|bandwidth")->required();
  c_sweep->add_option("--values", sweep_values_csv, "comma-separated values")->required();
  c_sweep->add_option("--seeds", sweep_seeds, "seeds per value");
  c_sweep->add_option("--methods", sweep_methods_csv, "comma-separated: sfl,ff,ft,fup");
  c_sweep->add_option("--out", sweep_out, "sweep CSV path");

  // compare
  auto* c_cmp = app.add_subcommand("compare", "all methods on matched seeds");
  CommonFlags cmp_flags;
  add_common(c_cmp, cmp_flags);
  int cmp_seeds = 20;
  std::string cmp_out = "compare.csv";
  c_cmp->add_option("--seeds", cmp_seeds, "matched seeds");
  c_cmp->add_option("--out", cmp_out, "comparison CSV path");

  // check
  auto* c_check = app.add_subcommand("check", "feasibility precheck for a config");
  CommonFlags check_flags;
  add_common(c_check, check_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_run->parsed()) {
      const Config cfg = load_with_overrides(run_flags);
      std::optional<std::uint64_t> seed;
      if (has_run_seed) seed = run_seed;
      const RunResult res = cmd_run(cfg, seed, run_out);
      std::printf("status=%s iterations=%d P=%.6g W max_residual=%.3g trace=%s\n",
                  to_string(res.status), res.iterations, res.allocation.uav_power_w,
                  res.final_max_residual, run_out.c_str());
      return res.status == RunStatus::Converged ? 0 : kExitRun;
    }
    if (c_sweep->parsed()) {
      SweepSpec spec;
      spec.base = load_with_overrides(sweep_flags);
      spec.param = parse_sweep_param(sweep_param);
      spec.values = parse_values(sweep_values_csv);
      spec.seeds = sweep_seeds;
      spec.methods.clear();
      std::string cur;
      for (char ch : sweep_methods_csv + ",") {
        if (ch == ',') {
          if (!cur.empty()) spec.methods.push_back(parse_method(cur));
          cur.clear();
        } else {
          cur += ch;
        }
      }
      const SweepOutput out = run_sweep(spec);
      write_sweep_csv(out, sweep_out);
      std::printf("wrote %zu rows + %zu aggregates to %s\n", out.rows.size(),
                  out.aggregates.size(), sweep_out.c_str());
      return 0;
    }
    if (c_cmp->parsed()) {
      const Config cfg = load_with_overrides(cmp_flags);
      const CompareOutput out = run_compare(cfg, cmp_seeds);
      write_compare_csv(out, cmp_out);
      for (const auto& s : out.summary)
        std::printf("%s: mean P=%.6g W, mean reduction vs sfl=%.2f%%\n", s.method.c_str(),
                    s.mean_power_w, s.mean_reduction_pct);
      std::printf("wrote %s\n", cmp_out.c_str());
      return 0;
    }
    if (c_check->parsed()) {
      const Config cfg = load_with_overrides(check_flags);
      const Scenario s = cfg.make_scenario();
      const PrecheckReport rep = precheck_feasibility(s);
      std::fputs(format_precheck(s, rep).c_str(), stdout);
      return rep.pass ? 0 : kExitRun;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const InfeasibleStartError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitRun;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRun;
  }
  return 0;
}
