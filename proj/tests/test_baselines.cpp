#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "uavsfl/baselines.hpp"

using namespace uavsfl;
using namespace uavsfl::test;

namespace {

// Comparison runs need power headroom: pinning the CPU block at f_max makes
// the restricted schemes demand far more than the strict 36 dBm cap.
Scenario compare_scenario(std::uint64_t seed) {
  SystemParams p = default_params();
  p.uav_pmax_w = 1000.0;
  GenerationSpec g = default_gen(seed);
  return generate_scenario(p, g);
}

}  // namespace

TEST_CASE("method tags round trip") {
  for (Method m : {Method::SFL, Method::FF, Method::FT, Method::FUP})
    CHECK(parse_method(method_tag(m)) == m);
  CHECK(parse_method("SFL") == Method::SFL);
  CHECK_THROWS_AS(parse_method("nope"), std::invalid_argument);
}

TEST_CASE("sfl tag reproduces the unrestricted run bit for bit") {
  const Scenario s = compare_scenario(2);
  const RunResult a = run(s);
  const RunResult b = run_baseline(s, Method::SFL);
  CHECK(a.allocation.uav_power_w == b.allocation.uav_power_w);
  CHECK(a.iterations == b.iterations);
  CHECK(a.allocation.uav_pos_m.x == b.allocation.uav_pos_m.x);
  CHECK(a.allocation.uav_pos_m.y == b.allocation.uav_pos_m.y);
}

TEST_CASE("pins hold on the returned allocations") {
  const Scenario s = compare_scenario(4);

  const RunResult ff = run_baseline(s, Method::FF);
  REQUIRE(ff.status == RunStatus::Converged);
  for (int k = 0; k < s.num_users(); ++k)
    CHECK(ff.allocation.cpu_hz[k] == s.users[k].f_max_hz);

  const RunResult ft = run_baseline(s, Method::FT);
  REQUIRE(ft.status == RunStatus::Converged);
  for (int k = 0; k < s.num_users(); ++k) {
    const double cap = s.params.frame_s -
                       s.users[k].local_iters * s.users[k].workload_cycles() /
                           s.users[k].f_max_hz;
    CHECK(ft.allocation.tx_time_s[k] == doctest::Approx(cap).epsilon(1e-12));
  }

  const RunResult fup = run_baseline(s, Method::FUP);
  REQUIRE(fup.status == RunStatus::Converged);
  CHECK(fup.allocation.uav_pos_m.x == 0.0);
  CHECK(fup.allocation.uav_pos_m.y == 0.0);
}

TEST_CASE("restriction dominance on matched scenarios") {
  for (std::uint64_t seed : {1ull, 8ull, 21ull}) {
    const Scenario s = compare_scenario(seed);
    const double sfl = run_baseline(s, Method::SFL).allocation.uav_power_w;
    for (Method m : {Method::FF, Method::FT, Method::FUP}) {
      const RunResult r = run_baseline(s, m);
      REQUIRE(r.status == RunStatus::Converged);
      CHECK(sfl <= r.allocation.uav_power_w + 1e-6);
    }
  }
}

TEST_CASE("off-centroid cluster makes fixed placement strictly worse") {
  // users clustered far from the origin: FUP must pay for the offset
  Scenario s;
  s.params = default_params();
  s.params.uav_pmax_w = 1000.0;
  s.users = {user_at(30, 20), user_at(40, 25), user_at(35, 30), user_at(28, 27)};
  const double sfl = run_baseline(s, Method::SFL).allocation.uav_power_w;
  const double fup = run_baseline(s, Method::FUP).allocation.uav_power_w;
  CHECK(fup > sfl * 1.05);
}

TEST_CASE("pinned CPU forces the f_max compute energy into the power floor") {
  // at f_max the per-round compute energy dwarfs the adaptive scheme's
  const Scenario s = compare_scenario(6);
  const double sfl = run_baseline(s, Method::SFL).allocation.uav_power_w;
  const double ff = run_baseline(s, Method::FF).allocation.uav_power_w;
  CHECK(ff > 10.0 * sfl);
}
