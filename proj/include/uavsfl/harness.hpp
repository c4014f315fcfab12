#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uavsfl/baselines.hpp"
#include "uavsfl/scenario.hpp"

namespace uavsfl {

enum class SweepParam { LocalIters, Payload, Bandwidth };

SweepParam parse_sweep_param(const std::string& tag);  // nk | payload | bandwidth
std::string sweep_param_tag(SweepParam p);

struct SweepSpec {
  SweepParam param = SweepParam::LocalIters;
  std::vector<double> values;
  int seeds = 20;
  std::vector<Method> methods{Method::SFL};
  Config base;
};

struct SweepRow {
  std::string param;
  double value = 0.0;
  std::uint64_t seed = 0;
  std::string method;
  double uav_power_w = 0.0;
  double mean_tx_time_s = 0.0;
  double mean_comp_time_s = 0.0;  // N*C*D/f averaged over users
  int outer_iters = 0;
  double wall_ms = 0.0;
  std::string status;
};

struct SweepAggregate {
  std::string param;
  double value = 0.0;
  std::string method;
  double mean_power_w = 0.0;
  double mean_tx_time_s = 0.0;
  double mean_comp_time_s = 0.0;
  int rows = 0;
};

struct SweepOutput {
  std::vector<SweepRow> rows;
  std::vector<SweepAggregate> aggregates;
};

struct CompareSummary {
  std::string method;
  double mean_power_w = 0.0;
  double mean_reduction_pct = 0.0;  // 100*(P_m - P_sfl)/P_m averaged over seeds
};

struct CompareOutput {
  std::vector<SweepRow> rows;
  std::vector<CompareSummary> summary;
};

/// Applies a sweep override to a config (local iterations, payload bits, or
/// system bandwidth).
Config apply_override(const Config& base, SweepParam p, double value);

int worker_pool_width();  // honors UAVSFL_THREADS

/// Runs one scenario and writes the per-iteration trace CSV
/// (iter,P_watts,max_residual,subproblem_status,wall_ms).
RunResult cmd_run(const Config& cfg, std::optional<std::uint64_t> seed,
                  const std::string& out_path, const RunOptions& opt = {});

SweepOutput run_sweep(const SweepSpec& spec, const RunOptions& opt = {});
void write_sweep_csv(const SweepOutput& out, const std::string& path);

CompareOutput run_compare(const Config& cfg, int seeds, const RunOptions& opt = {});
void write_compare_csv(const CompareOutput& out, const std::string& path);

/// Precheck report for a config (the `check` subcommand).
std::string format_precheck(const Scenario& s, const PrecheckReport& rep);

/// Data files are deterministic; creation time goes in a sidecar
/// "<path>.meta.json" instead.
void write_sidecar_metadata(const std::string& data_path, const std::string& tool_line);

}  // namespace uavsfl
