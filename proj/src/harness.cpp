#include "uavsfl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "uavsfl/physics.hpp"

namespace uavsfl {

namespace {

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double mean_tx_time(const Allocation& a) {
  if (a.num_users() == 0) return 0.0;
  double s = 0.0;
  for (double t : a.tx_time_s) s += t;
  return s / a.num_users();
}

double mean_comp_time(const Allocation& a, const Scenario& sc) {
  const int K = a.num_users();
  if (K == 0) return 0.0;
  double s = 0.0;
  for (int k = 0; k < K; ++k)
    s += sc.users[k].local_iters * comp_time(sc.users[k], a.cpu_hz[k]);
  return s / K;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  return out;
}

}  // namespace

SweepParam parse_sweep_param(const std::string& tag) {
  if (tag == "nk") return SweepParam::LocalIters;
  if (tag == "payload") return SweepParam::Payload;
  if (tag == "bandwidth") return SweepParam::Bandwidth;
  throw std::invalid_argument("unknown sweep parameter '" + tag +
                              "' (expected nk|payload|bandwidth)");
}

std::string sweep_param_tag(SweepParam p) {
  switch (p) {
    case SweepParam::LocalIters: return "nk";
    case SweepParam::Payload: return "payload";
    case SweepParam::Bandwidth: return "bandwidth";
  }
  return "?";
}

Config apply_override(const Config& base, SweepParam p, double value) {
  Config c = base;
  switch (p) {
    case SweepParam::LocalIters: {
      const int n = static_cast<int>(std::lround(value));
      c.gen.local_iters = n;
      for (auto& u : c.explicit_users) u.local_iters = n;
      break;
    }
    case SweepParam::Payload:
      c.params.payload_bits = value;
      break;
    case SweepParam::Bandwidth:
      c.params.bandwidth_hz = value;
      break;
  }
  return c;
}

int worker_pool_width() {
  if (const char* env = std::getenv("UAVSFL_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return std::min(v, 64);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return std::max(1u, std::min(hw, 16u));
}

RunResult cmd_run(const Config& cfg, std::optional<std::uint64_t> seed,
                  const std::string& out_path, const RunOptions& opt) {
  const Scenario s = seed ? cfg.make_scenario(*seed) : cfg.make_scenario();
  RunResult res = run(s, opt);
  if (!out_path.empty()) {
    auto out = open_out(out_path);
    out << "iter,P_watts,max_residual,subproblem_status,wall_ms\n";
    for (const auto& row : res.trace)
      out << row.iter << ',' << fmt_g(row.uav_power_w) << ',' << fmt_g(row.max_residual)
          << ',' << to_string(row.sub_status) << ',' << fmt_g(row.wall_ms) << '\n';
    write_sidecar_metadata(out_path, "uavsfl run");
  }
  return res;
}

namespace {

struct Cell {
  const Config* config;  // fully resolved; overrides already applied
  std::string param;
  double value;
  std::uint64_t seed;
  Method method;
};

SweepRow run_cell(const Cell& cell, const RunOptions& opt) {
  using clock = std::chrono::steady_clock;
  SweepRow row;
  row.param = cell.param;
  row.value = cell.value;
  row.seed = cell.seed;
  row.method = method_tag(cell.method);
  const Config& cfg = *cell.config;
  const auto t0 = clock::now();
  try {
    const Scenario s = cfg.make_scenario(cell.seed);
    const RunResult res = run_baseline(s, cell.method, opt);
    row.uav_power_w = res.allocation.uav_power_w;
    row.mean_tx_time_s = mean_tx_time(res.allocation);
    row.mean_comp_time_s = mean_comp_time(res.allocation, s);
    row.outer_iters = res.iterations;
    row.status = to_string(res.status);
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  return row;
}

std::vector<SweepRow> run_cells(const std::vector<Cell>& cells, const RunOptions& opt) {
  std::vector<SweepRow> rows(cells.size());
  const int width = worker_pool_width();
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      rows[i] = run_cell(cells[i], opt);
    }
  };
  if (width <= 1 || cells.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < width; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

}  // namespace

SweepOutput run_sweep(const SweepSpec& spec, const RunOptions& opt) {
  if (spec.values.empty()) throw std::invalid_argument("sweep needs a nonempty value list");
  if (spec.seeds < 1) throw std::invalid_argument("sweep needs seeds >= 1");
  for (double v : spec.values)
    if (!(v > 0.0)) throw std::invalid_argument("sweep values must be positive");

  // one resolved config per swept value; rows ordered (value, seed, method)
  std::vector<Config> configs;
  configs.reserve(spec.values.size());
  for (double v : spec.values) configs.push_back(apply_override(spec.base, spec.param, v));
  std::vector<Cell> cells;
  for (size_t vi = 0; vi < spec.values.size(); ++vi)
    for (int sd = 0; sd < spec.seeds; ++sd)
      for (Method m : spec.methods)
        cells.push_back({&configs[vi], sweep_param_tag(spec.param), spec.values[vi],
                         spec.base.gen.seed + static_cast<std::uint64_t>(sd), m});

  SweepOutput out;
  out.rows = run_cells(cells, opt);

  for (double v : spec.values) {
    for (Method m : spec.methods) {
      SweepAggregate agg;
      agg.param = sweep_param_tag(spec.param);
      agg.value = v;
      agg.method = method_tag(m);
      for (const auto& r : out.rows) {
        if (r.value != v || r.method != method_tag(m)) continue;
        agg.mean_power_w += r.uav_power_w;
        agg.mean_tx_time_s += r.mean_tx_time_s;
        agg.mean_comp_time_s += r.mean_comp_time_s;
        ++agg.rows;
      }
      if (agg.rows > 0) {
        agg.mean_power_w /= agg.rows;
        agg.mean_tx_time_s /= agg.rows;
        agg.mean_comp_time_s /= agg.rows;
      }
      out.aggregates.push_back(agg);
    }
  }
  return out;
}

void write_sweep_csv(const SweepOutput& res, const std::string& path) {
  auto out = open_out(path);
  out << "kind,param,value,seed,method,P_watts,mean_tcm_s,mean_tcp_s,outer_iters,wall_ms,"
         "status\n";
  for (const auto& r : res.rows)
    out << "row," << r.param << ',' << fmt_g(r.value) << ',' << r.seed << ',' << r.method
        << ',' << fmt_g(r.uav_power_w) << ',' << fmt_g(r.mean_tx_time_s) << ','
        << fmt_g(r.mean_comp_time_s) << ',' << r.outer_iters << ',' << fmt_g(r.wall_ms)
        << ',' << r.status << '\n';
  for (const auto& a : res.aggregates)
    out << "aggregate," << a.param << ',' << fmt_g(a.value) << ",," << a.method << ','
        << fmt_g(a.mean_power_w) << ',' << fmt_g(a.mean_tx_time_s) << ','
        << fmt_g(a.mean_comp_time_s) << ',' << a.rows << ",,\n";
  write_sidecar_metadata(path, "uavsfl sweep");
}

CompareOutput run_compare(const Config& cfg, int seeds, const RunOptions& opt) {
  if (seeds < 1) throw std::invalid_argument("compare needs seeds >= 1");
  const std::vector<Method> methods{Method::SFL, Method::FUP, Method::FF, Method::FT};
  std::vector<Cell> cells;
  for (int sd = 0; sd < seeds; ++sd)
    for (Method m : methods)
      cells.push_back({&cfg, "compare", static_cast<double>(cfg.gen.local_iters),
                       cfg.gen.seed + static_cast<std::uint64_t>(sd), m});

  CompareOutput out;
  out.rows = run_cells(cells, opt);

  for (Method m : {Method::FUP, Method::FF, Method::FT}) {
    CompareSummary sum;
    sum.method = method_tag(m);
    int n = 0;
    for (int sd = 0; sd < seeds; ++sd) {
      const std::uint64_t seed = cfg.gen.seed + static_cast<std::uint64_t>(sd);
      const SweepRow* base_row = nullptr;
      const SweepRow* m_row = nullptr;
      for (const auto& r : out.rows) {
        if (r.seed != seed || r.status != "converged") continue;
        if (r.method == "sfl") base_row = &r;
        if (r.method == method_tag(m)) m_row = &r;
      }
      if (!base_row || !m_row || base_row->uav_power_w <= 0.0 || m_row->uav_power_w <= 0.0)
        continue;
      sum.mean_power_w += m_row->uav_power_w;
      sum.mean_reduction_pct +=
          100.0 * (m_row->uav_power_w - base_row->uav_power_w) / m_row->uav_power_w;
      ++n;
    }
    if (n > 0) {
      sum.mean_power_w /= n;
      sum.mean_reduction_pct /= n;
    }
    out.summary.push_back(sum);
  }
  return out;
}

void write_compare_csv(const CompareOutput& res, const std::string& path) {
  auto out = open_out(path);
  out << "kind,value,seed,method,P_watts,mean_tcm_s,mean_tcp_s,outer_iters,wall_ms,status,"
         "mean_reduction_pct\n";
  for (const auto& r : res.rows)
    out << "row," << fmt_g(r.value) << ',' << r.seed << ',' << r.method << ','
        << fmt_g(r.uav_power_w) << ',' << fmt_g(r.mean_tx_time_s) << ','
        << fmt_g(r.mean_comp_time_s) << ',' << r.outer_iters << ',' << fmt_g(r.wall_ms)
        << ',' << r.status << ",\n";
  for (const auto& s : res.summary)
    out << "summary,,," << s.method << ',' << fmt_g(s.mean_power_w) << ",,,,,,"
        << fmt_g(s.mean_reduction_pct) << '\n';
  write_sidecar_metadata(path, "uavsfl compare");
}

std::string format_precheck(const Scenario& s, const PrecheckReport& rep) {
  std::ostringstream out;
  out << "precheck: " << (rep.pass ? "PASS" : "FAIL") << " (" << s.num_users()
      << " users)\n";
  for (size_t k = 0; k < rep.users.size(); ++k) {
    const auto& u = rep.users[k];
    out << "  user " << k << ": " << (u.pass ? "PASS" : "FAIL");
    if (!u.schedulable) {
      out << " [not schedulable: compute alone exceeds the frame]\n";
      continue;
    }
    out << " harvest=" << fmt_g(u.harvest_j) << " J demand=" << fmt_g(u.demand_j)
        << " J margin=" << fmt_g(u.margin) << "\n";
  }
  return out.str();
}

void write_sidecar_metadata(const std::string& data_path, const std::string& tool_line) {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch());
  std::ofstream out(data_path + ".meta.json");
  if (!out) return;  // metadata is best-effort
  out << "{\n  \"tool\": \"" << tool_line << "\",\n  \"created_unix_s\": " << secs.count()
      << "\n}\n";
}

}  // namespace uavsfl
