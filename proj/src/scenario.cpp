#include "uavsfl/scenario.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "uavsfl/physics.hpp"

namespace uavsfl {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

namespace {

// std::uniform_real_distribution is implementation-defined; mt19937_64's raw
// stream is not. Scaling the top 53 bits keeps scenarios byte-identical
// across standard libraries.
double next_u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double next_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * next_u01(rng);
}

}  // namespace

void validate(const SystemParams& p) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(name, "must be finite and > 0");
  };
  positive(p.bandwidth_hz, "bandwidth_hz");
  positive(p.frame_s, "frame_s");
  positive(p.altitude_m, "altitude_m");
  positive(p.placement_radius_m, "placement_radius_m");
  positive(p.harvest_eff, "harvest_efficiency");
  if (p.harvest_eff > 1.0) throw ConfigError("harvest_efficiency", "must be <= 1");
  positive(p.ref_gain_1m, "ref_gain_1m");
  if (!(p.pathloss_exp >= 2.0))
    throw ConfigError("pathloss_exponent", "must be >= 2 (placement constraint convexity)");
  positive(p.noise_psd_w_per_hz, "noise_psd_w_per_hz");
  positive(p.payload_bits, "payload_bits");
  positive(p.uav_pmax_w, "uav_pmax_w");
  positive(p.conv_eps, "conv_eps");
  if (p.max_outer_iters < 1) throw ConfigError("max_outer_iters", "must be >= 1");
}

void validate(const UserProfile& u, int index) {
  const std::string where = "users[" + std::to_string(index) + "].";
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(where + name, "must be finite and > 0");
  };
  positive(u.data_bits, "data_bits");
  positive(u.cycles_per_bit, "cycles_per_bit");
  positive(u.chip_coeff, "chip_coefficient");
  if (u.local_iters < 1) throw ConfigError(where + "local_iterations", "must be >= 1");
  positive(u.f_min_hz, "f_min_hz");
  positive(u.f_max_hz, "f_max_hz");
  if (u.f_min_hz > u.f_max_hz) throw ConfigError(where + "f_min_hz", "must be <= f_max_hz");
  positive(u.p_max_w, "p_max_w");
}

void validate(const GenerationSpec& g) {
  if (g.num_users < 1) throw ConfigError("num_users", "must be >= 1");
  if (!(g.disc_radius_m > 0.0)) throw ConfigError("disc_radius_m", "must be > 0");
  auto range = [](double lo, double hi, const char* name) {
    if (!(lo > 0.0) || !(hi >= lo)) throw ConfigError(name, "invalid range");
  };
  range(g.data_bits_lo, g.data_bits_hi, "data_bits_range");
  range(g.cycles_per_bit_lo, g.cycles_per_bit_hi, "cycles_per_bit_range");
  if (!(g.chip_coeff > 0.0)) throw ConfigError("chip_coefficient", "must be > 0");
  if (g.local_iters < 1) throw ConfigError("local_iterations", "must be >= 1");
  if (!(g.f_min_hz > 0.0) || g.f_min_hz > g.f_max_hz)
    throw ConfigError("f_min_hz", "must be in (0, f_max_hz]");
  if (!(g.user_pmax_w > 0.0)) throw ConfigError("user_pmax_w", "must be > 0");
}

Scenario generate_scenario(const SystemParams& params, const GenerationSpec& gen) {
  validate(params);
  validate(gen);

  Scenario s;
  s.params = params;
  s.seed = gen.seed;
  s.users.reserve(gen.num_users);

  std::mt19937_64 rng(gen.seed);
  for (int k = 0; k < gen.num_users; ++k) {
    UserProfile u;
    // sqrt(U) radius gives exact area-uniformity on the disc
    const double r = gen.disc_radius_m * std::sqrt(next_u01(rng));
    const double theta = 2.0 * M_PI * next_u01(rng);
    u.pos_m = {r * std::cos(theta), r * std::sin(theta)};
    u.data_bits = next_range(rng, gen.data_bits_lo, gen.data_bits_hi);
    u.cycles_per_bit = next_range(rng, gen.cycles_per_bit_lo, gen.cycles_per_bit_hi);
    u.chip_coeff = gen.chip_coeff;
    u.local_iters = gen.local_iters;
    u.f_min_hz = gen.f_min_hz;
    u.f_max_hz = gen.f_max_hz;
    u.p_max_w = gen.user_pmax_w;
    s.users.push_back(u);
  }
  return s;
}

PrecheckReport precheck_feasibility(const Scenario& s, double tx_time_frac, double p_margin) {
  PrecheckReport rep;
  const auto& P = s.params;
  const int K = s.num_users();
  rep.users.resize(K);
  if (K == 0) return rep;  // vacuous PASS

  Vec2 centroid{0.0, 0.0};
  for (const auto& u : s.users) {
    centroid.x += u.pos_m.x;
    centroid.y += u.pos_m.y;
  }
  centroid.x /= K;
  centroid.y /= K;
  const double cn = std::hypot(centroid.x, centroid.y);
  if (cn > P.placement_radius_m) {
    centroid.x *= P.placement_radius_m / cn;
    centroid.y *= P.placement_radius_m / cn;
  }

  const double b_each = P.bandwidth_hz / K;
  for (int k = 0; k < K; ++k) {
    const auto& u = s.users[k];
    auto& chk = rep.users[k];
    const double work = u.local_iters * u.workload_cycles();
    chk.schedulable = work / u.f_max_hz < P.frame_s;
    if (!chk.schedulable) {
      chk.pass = false;
      rep.pass = false;
      continue;
    }
    const double t_cap = P.frame_s - work / u.f_max_hz;
    const double t_nom = tx_time_frac * t_cap;
    const double f_need = work / (P.frame_s - t_nom);
    const double f = std::min(u.f_max_hz, std::max(u.f_min_hz, f_need));
    const double gain = channel_gain(distance_3d(centroid, u.pos_m, P.altitude_m), P);

    // minimal transmit power meeting the payload in t_nom over b_each
    const double snr_req =
        std::pow(2.0, P.payload_bits / (t_nom * b_each)) - 1.0;
    const double p_min = snr_req * b_each * P.noise_psd_w_per_hz / gain;
    const double p = std::min(u.p_max_w, p_margin * p_min);
    const bool rate_ok = p_min <= u.p_max_w;

    chk.demand_j = u.local_iters * comp_energy(u, f) + t_nom * p;
    chk.harvest_j = harvested_energy(P.uav_pmax_w, gain, P);
    chk.margin = chk.harvest_j / chk.demand_j;
    chk.pass = rate_ok && chk.margin >= 1.0;
    if (!chk.pass) rep.pass = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// JSON config

namespace {

using nlohmann::json;

template <typename T>
T get_field(const json& j, const std::string& name, T fallback) {
  if (!j.contains(name)) return fallback;
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(name, e.what());
  }
}

void get_range(const json& j, const std::string& name, double& lo, double& hi) {
  if (!j.contains(name)) return;
  try {
    const auto arr = j.at(name);
    if (!arr.is_array() || arr.size() != 2) throw ConfigError(name, "expected [lo, hi]");
    lo = arr[0].get<double>();
    hi = arr[1].get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(name, e.what());
  }
}

}  // namespace

Config parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError("<document>", e.what());
  }

  Config c;
  if (j.contains("system")) {
    const auto& js = j.at("system");
    auto& p = c.params;
    p.bandwidth_hz = get_field(js, "bandwidth_hz", p.bandwidth_hz);
    p.frame_s = get_field(js, "frame_s", p.frame_s);
    p.altitude_m = get_field(js, "altitude_m", p.altitude_m);
    p.placement_radius_m = get_field(js, "placement_radius_m", p.placement_radius_m);
    p.harvest_eff = get_field(js, "harvest_efficiency", p.harvest_eff);
    p.ref_gain_1m = get_field(js, "ref_gain_1m", p.ref_gain_1m);
    p.pathloss_exp = get_field(js, "pathloss_exponent", p.pathloss_exp);
    p.noise_psd_w_per_hz = get_field(js, "noise_psd_w_per_hz", p.noise_psd_w_per_hz);
    p.payload_bits = get_field(js, "payload_bits", p.payload_bits);
    p.uav_pmax_w = get_field(js, "uav_pmax_w", p.uav_pmax_w);
    p.conv_eps = get_field(js, "conv_eps", p.conv_eps);
    p.max_outer_iters = get_field(js, "max_outer_iters", p.max_outer_iters);
  }
  if (j.contains("generation")) {
    const auto& jg = j.at("generation");
    auto& g = c.gen;
    g.num_users = get_field(jg, "num_users", g.num_users);
    g.disc_radius_m = get_field(jg, "disc_radius_m", g.disc_radius_m);
    get_range(jg, "data_bits_range", g.data_bits_lo, g.data_bits_hi);
    get_range(jg, "cycles_per_bit_range", g.cycles_per_bit_lo, g.cycles_per_bit_hi);
    g.chip_coeff = get_field(jg, "chip_coefficient", g.chip_coeff);
    g.local_iters = get_field(jg, "local_iterations", g.local_iters);
    g.f_min_hz = get_field(jg, "f_min_hz", g.f_min_hz);
    g.f_max_hz = get_field(jg, "f_max_hz", g.f_max_hz);
    g.user_pmax_w = get_field(jg, "user_pmax_w", g.user_pmax_w);
    g.seed = get_field(jg, "seed", g.seed);
  }
  if (j.contains("users")) {
    const auto& ju = j.at("users");
    if (!ju.is_array()) throw ConfigError("users", "expected an array");
    int idx = 0;
    for (const auto& e : ju) {
      UserProfile u;
      u.pos_m.x = get_field(e, "x_m", 0.0);
      u.pos_m.y = get_field(e, "y_m", 0.0);
      u.data_bits = get_field(e, "data_bits", u.data_bits);
      u.cycles_per_bit = get_field(e, "cycles_per_bit", u.cycles_per_bit);
      u.chip_coeff = get_field(e, "chip_coefficient", u.chip_coeff);
      u.local_iters = get_field(e, "local_iterations", u.local_iters);
      u.f_min_hz = get_field(e, "f_min_hz", u.f_min_hz);
      u.f_max_hz = get_field(e, "f_max_hz", u.f_max_hz);
      u.p_max_w = get_field(e, "p_max_w", u.p_max_w);
      validate(u, idx++);
      c.explicit_users.push_back(u);
    }
    c.has_explicit_users = !c.explicit_users.empty();
  }
  validate(c.params);
  if (!c.has_explicit_users) validate(c.gen);
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const Config& c) {
  json j;
  const auto& p = c.params;
  j["system"] = {{"bandwidth_hz", p.bandwidth_hz},
                 {"frame_s", p.frame_s},
                 {"altitude_m", p.altitude_m},
                 {"placement_radius_m", p.placement_radius_m},
                 {"harvest_efficiency", p.harvest_eff},
                 {"ref_gain_1m", p.ref_gain_1m},
                 {"pathloss_exponent", p.pathloss_exp},
                 {"noise_psd_w_per_hz", p.noise_psd_w_per_hz},
                 {"payload_bits", p.payload_bits},
                 {"uav_pmax_w", p.uav_pmax_w},
                 {"conv_eps", p.conv_eps},
                 {"max_outer_iters", p.max_outer_iters}};
  const auto& g = c.gen;
  j["generation"] = {{"num_users", g.num_users},
                     {"disc_radius_m", g.disc_radius_m},
                     {"data_bits_range", {g.data_bits_lo, g.data_bits_hi}},
                     {"cycles_per_bit_range", {g.cycles_per_bit_lo, g.cycles_per_bit_hi}},
                     {"chip_coefficient", g.chip_coeff},
                     {"local_iterations", g.local_iters},
                     {"f_min_hz", g.f_min_hz},
                     {"f_max_hz", g.f_max_hz},
                     {"user_pmax_w", g.user_pmax_w},
                     {"seed", g.seed}};
  if (c.has_explicit_users) {
    json arr = json::array();
    for (const auto& u : c.explicit_users) {
      arr.push_back({{"x_m", u.pos_m.x},
                     {"y_m", u.pos_m.y},
                     {"data_bits", u.data_bits},
                     {"cycles_per_bit", u.cycles_per_bit},
                     {"chip_coefficient", u.chip_coeff},
                     {"local_iterations", u.local_iters},
                     {"f_min_hz", u.f_min_hz},
                     {"f_max_hz", u.f_max_hz},
                     {"p_max_w", u.p_max_w}});
    }
    j["users"] = arr;
  }
  return j.dump(2);
}

Scenario Config::make_scenario() const { return make_scenario(gen.seed); }

Scenario Config::make_scenario(std::uint64_t seed_override) const {
  if (has_explicit_users) {
    Scenario s;
    s.params = params;
    s.users = explicit_users;
    s.seed = seed_override;
    validate(s.params);
    return s;
  }
  GenerationSpec g = gen;
  g.seed = seed_override;
  return generate_scenario(params, g);
}

}  // namespace uavsfl
