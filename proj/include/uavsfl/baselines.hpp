#pragma once

#include <string>

#include "uavsfl/optimizer.hpp"

namespace uavsfl {

/// SFL is the unrestricted algorithm; each baseline freezes exactly one
/// block: FF the CPU speeds at f_max, FT the uplink times at the
/// schedulability bound, FUP the UAV at the disc center.
enum class Method { SFL, FF, FT, FUP };

Method parse_method(const std::string& tag);          // throws std::invalid_argument
std::string method_tag(Method m);

RunResult run_baseline(const Scenario& s, Method m, const RunOptions& opt = {});

}  // namespace uavsfl
