#include "uavsfl/baselines.hpp"

#include <algorithm>
#include <stdexcept>

namespace uavsfl {

Method parse_method(const std::string& tag) {
  std::string t = tag;
  std::transform(t.begin(), t.end(), t.begin(), ::tolower);
  if (t == "sfl") return Method::SFL;
  if (t == "ff") return Method::FF;
  if (t == "ft") return Method::FT;
  if (t == "fup") return Method::FUP;
  throw std::invalid_argument("unknown method '" + tag + "' (expected sfl|ff|ft|fup)");
}

std::string method_tag(Method m) {
  switch (m) {
    case Method::SFL: return "sfl";
    case Method::FF: return "ff";
    case Method::FT: return "ft";
    case Method::FUP: return "fup";
  }
  return "?";
}

RunResult run_baseline(const Scenario& s, Method m, const RunOptions& opt) {
  RunOptions o = opt;
  switch (m) {
    case Method::SFL: break;
    case Method::FF: o.pin_cpu_to_max = true; break;
    case Method::FT: o.pin_tx_time = true; break;
    case Method::FUP: o.pin_uav_pos_origin = true; break;
  }
  return run(s, o);
}

}  // namespace uavsfl
