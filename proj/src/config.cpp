#include "nrspread/config.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace nrs {

std::string to_string(PropagationMode mode) {
    return mode == PropagationMode::edge_exact ? "edge" : "bernoulli";
}

std::string to_string(RunMode mode) {
    switch (mode) {
    case RunMode::simulate: return "simulate";
    case RunMode::analytic: return "analytic";
    case RunMode::compare: return "compare";
    }
    return "unknown";
}

void SimulationConfig::validate() const {
    if (!(tau > 1.0) || !std::isfinite(tau)) {
        throw std::invalid_argument(fmt::format("tau must be finite and > 1, got {}", tau));
    }
    if (!(x_min >= 1.0) || !std::isfinite(x_min)) {
        throw std::invalid_argument(fmt::format("x_min must be finite and >= 1, got {}", x_min));
    }
    if (n0 < 1) {
        throw std::invalid_argument("n0 must be >= 1");
    }
    if (s0 < 1 || s0 > n0) {
        throw std::invalid_argument(fmt::format("s0 must satisfy 1 <= s0 <= n0, got s0={} n0={}", s0, n0));
    }
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw std::invalid_argument(fmt::format("rate must be finite and > 0, got {}", rate));
    }
    if (horizon && (!(*horizon >= 0.0) || !std::isfinite(*horizon))) {
        throw std::invalid_argument(fmt::format("t-star must be finite and >= 0, got {}", *horizon));
    }
    if (!horizon && !max_nodes) {
        throw std::invalid_argument("a run needs a bound: set max-nodes, t-star, or both");
    }
    if (max_nodes && *max_nodes < n0) {
        throw std::invalid_argument(fmt::format("max-nodes ({}) is below n0 ({})", *max_nodes, n0));
    }
    if (runs < 1) {
        throw std::invalid_argument("runs must be >= 1");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument(fmt::format("epsilon must lie in (0,1), got {}", epsilon));
    }
    if (!snapshot_sizes.empty() && propagation != PropagationMode::edge_exact) {
        throw std::invalid_argument("graph snapshots need --prop-mode edge");
    }
}

} // namespace nrs
