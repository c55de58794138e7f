#include "nrspread/spreading.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "nrspread/clock.hpp"

namespace nrs {
namespace {

double exponent(double spread_capacity, double new_capacity, double total_capacity) {
    const bool ok = std::isfinite(spread_capacity) && std::isfinite(new_capacity) &&
                    std::isfinite(total_capacity) && spread_capacity > 0.0 && new_capacity > 0.0 &&
                    total_capacity > 0.0;
    if (!ok) {
        throw std::invalid_argument(fmt::format(
            "success probability needs positive finite capacities, got spread={} new={} total={}",
            spread_capacity, new_capacity, total_capacity));
    }
    return spread_capacity * (new_capacity / total_capacity);
}

constexpr double kBelowOne = 1.0 - 0x1.0p-53;

} // namespace

double success_probability(double spread_capacity, double new_capacity, double total_capacity) {
    const double x = exponent(spread_capacity, new_capacity, total_capacity);
    return std::clamp(-std::expm1(-x), std::numeric_limits<double>::denorm_min(), kBelowOne);
}

double failure_probability(double spread_capacity, double new_capacity, double total_capacity) {
    const double x = exponent(spread_capacity, new_capacity, total_capacity);
    return std::clamp(std::exp(-x), std::numeric_limits<double>::denorm_min(), kBelowOne);
}

void SuccessProbabilityTrace::validate() const {
    for (std::size_t k = 0; k < probs.size(); ++k) {
        if (!(probs[k] > 0.0 && probs[k] < 1.0)) {
            throw std::invalid_argument(fmt::format("p_{} = {} is not strictly inside (0,1)", k + 1, probs[k]));
        }
    }
}

MessageState::MessageState(const CapacitySequence& seq, std::uint32_t n0, std::uint32_t s0)
    : members_(n0, false), spread_count_(s0), node_count_(n0) {
    if (n0 < 1 || s0 < 1 || s0 > n0) {
        throw std::invalid_argument(fmt::format("message state needs 1 <= s0 <= n0, got s0={} n0={}", s0, n0));
    }
    if (seq.size() < n0) {
        throw std::out_of_range(fmt::format("message state over {} nodes needs as many capacities, have {}", n0, seq.size()));
    }
    for (std::uint32_t i = 0; i < s0; ++i) {
        members_[i] = true;
        spread_capacity_ += seq.value(i);
    }
}

void MessageState::admit(double capacity, bool informed) {
    members_.push_back(informed);
    ++node_count_;
    if (informed) {
        ++spread_count_;
        spread_capacity_ += capacity;
    }
}

double MessageState::resum_capacity(const CapacitySequence& seq) const {
    double total = 0.0;
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if (members_[i]) {
            total += seq.value(i);
        }
    }
    return total;
}

bool propagate_edges(MessageState& state, const NewEdgeReport& report, const CapacitySequence& seq) {
    if (report.to_old.size() != state.node_count()) {
        throw std::invalid_argument(fmt::format("edge report covers {} old nodes, state has {}",
                                                report.to_old.size(), state.node_count()));
    }
    bool informed = false;
    for (NodeId i = 0; i < report.to_old.size(); ++i) {
        if (report.to_old[i] > 0 && state.holds(i)) {
            informed = true;
            break;
        }
    }
    state.admit(seq.value(report.new_node), informed);
    return informed;
}

bool propagate_bernoulli(MessageState& state, double probability, double new_capacity, Rng& rng) {
    const bool informed = rng.uniform() < probability;
    state.admit(new_capacity, informed);
    return informed;
}

ReplicaStreams::ReplicaStreams(std::uint64_t seed, std::uint64_t run_id)
    : capacity(derive_seed(seed, run_id, 0)),
      dynamics(derive_seed(seed, run_id, 1)),
      clock(derive_seed(seed, run_id, 2)) {}

TrajectoryRecord run_trajectory(const SimulationConfig& config, ReplicaStreams& streams,
                                std::uint64_t run_id, const StepObserver& observer) {
    config.validate();
    const CapacityLaw law{config.tau, config.x_min};

    TrajectoryRecord record;
    record.run_id = run_id;
    CapacitySequence& seq = record.capacities;
    seq.extend_to(config.n0, law, streams.capacity);

    std::uint64_t steps = std::numeric_limits<std::uint64_t>::max();
    if (config.horizon) {
        const double mean = config.rate * *config.horizon;
        record.step_budget = mean > 0.0 ? sample_poisson(mean, streams.clock) : 0;
        steps = *record.step_budget;
    }
    if (config.max_nodes) {
        steps = std::min<std::uint64_t>(steps, *config.max_nodes - config.n0);
    }

    const bool edge_exact = config.propagation == PropagationMode::edge_exact;
    std::optional<MultiGraph> graph;
    if (edge_exact) {
        graph = init_graph(seq, config.n0, config.s0, streams.dynamics, config.delete_old_edges);
    }

    MessageState state(seq, config.n0, config.s0);
    if (steps != std::numeric_limits<std::uint64_t>::max()) {
        record.rows.reserve(steps + 1);
        record.trace.probs.reserve(steps);
    }
    record.rows.push_back({0, state.node_count(), state.spread_count()});
    if (observer) {
        observer(graph ? &*graph : nullptr, seq, state);
    }

    for (std::uint64_t k = 1; k <= steps; ++k) {
        seq.extend(law, streams.capacity);
        const NodeId arriving = state.node_count();
        const double new_capacity = seq.value(arriving);
        const double p = success_probability(state.spread_capacity(), new_capacity, seq.prefix_sum(arriving));
        record.trace.probs.push_back(p);

        if (edge_exact) {
            const NewEdgeReport report = evolve_step(*graph, seq, streams.dynamics, config.delete_old_edges);
            propagate_edges(state, report, seq);
        } else {
            propagate_bernoulli(state, p, new_capacity, streams.dynamics);
        }
        assert(std::abs(state.resum_capacity(seq) - state.spread_capacity()) <=
               1e-9 * state.spread_capacity());

        record.rows.push_back({k, state.node_count(), state.spread_count()});
        if (observer) {
            observer(graph ? &*graph : nullptr, seq, state);
        }
    }
    return record;
}

TrajectoryRecord run_trajectory(const SimulationConfig& config, std::uint64_t run_id,
                                const StepObserver& observer) {
    ReplicaStreams streams(config.seed, run_id);
    return run_trajectory(config, streams, run_id, observer);
}

} // namespace nrs
