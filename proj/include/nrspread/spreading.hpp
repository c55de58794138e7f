#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "nrspread/capacity.hpp"
#include "nrspread/config.hpp"
#include "nrspread/evolution.hpp"
#include "nrspread/random.hpp"

namespace nrs {

/// Probability that the arriving node receives the message:
/// 1 - exp(-spread_capacity * new_capacity / total_capacity), where
/// total_capacity already includes the arriving node. The result is kept
/// strictly inside (0, 1) even when the exponent under- or overflows.
double success_probability(double spread_capacity, double new_capacity, double total_capacity);

/// Complement of success_probability, computed directly as exp(-x).
double failure_probability(double spread_capacity, double new_capacity, double total_capacity);

/// Success probabilities p_1..p_k of one realized (or pinned) history.
struct SuccessProbabilityTrace {
    std::vector<double> probs;

    /// Throws std::invalid_argument unless every entry lies strictly in (0,1).
    void validate() const;
    std::size_t size() const { return probs.size(); }
};

/// The set S_k of nodes holding the message.
class MessageState {
public:
    /// Nodes 0..s0-1 of an n0-node graph hold the message.
    MessageState(const CapacitySequence& seq, std::uint32_t n0, std::uint32_t s0);

    std::uint32_t spread_count() const { return spread_count_; }
    std::uint32_t node_count() const { return node_count_; }
    double spread_capacity() const { return spread_capacity_; }
    double ratio() const { return static_cast<double>(spread_count_) / node_count_; }
    bool holds(NodeId i) const { return i < members_.size() && members_[i]; }
    const std::vector<bool>& members() const { return members_; }

    /// Record the arrival of a node with capacity `capacity`; `informed`
    /// says whether it received the message.
    void admit(double capacity, bool informed);

    /// Recomputes the member capacity from scratch.
    double resum_capacity(const CapacitySequence& seq) const;

private:
    std::vector<bool> members_;
    std::uint32_t spread_count_ = 0;
    std::uint32_t node_count_ = 0;
    double spread_capacity_ = 0.0;
};

/// Edge-exact propagation: the arriving node is informed iff at least one of
/// its new edges lands on a current message holder. Returns whether it was.
bool propagate_edges(MessageState& state, const NewEdgeReport& report, const CapacitySequence& seq);

/// Bernoulli propagation: informed iff a uniform draw falls below `probability`.
/// Consumes exactly one uniform.
bool propagate_bernoulli(MessageState& state, double probability, double new_capacity, Rng& rng);

struct TrajectoryRow {
    std::uint64_t k;
    std::uint32_t node_count;
    std::uint32_t spread_count;

    double ratio() const { return static_cast<double>(spread_count) / node_count; }
};

struct TrajectoryRecord {
    std::uint64_t run_id = 0;
    /// Rows for k = 0..K, row k describing G after k steps from the initial graph.
    std::vector<TrajectoryRow> rows;
    /// p_1..p_K; trace.probs[k-1] governed step k.
    SuccessProbabilityTrace trace;
    /// Sampled K* when the run is clock-bounded.
    std::optional<std::uint64_t> step_budget;
    CapacitySequence capacities;

    const TrajectoryRow& final_row() const { return rows.back(); }
};

/// Independent random streams of one replica, derived from (seed, run_id).
struct ReplicaStreams {
    Rng capacity;
    Rng dynamics;
    Rng clock;

    ReplicaStreams(std::uint64_t seed, std::uint64_t run_id);
};

/// Called after every step (and once for the initial state) with the graph
/// when one is materialized, nullptr otherwise.
using StepObserver =
    std::function<void(const MultiGraph* graph, const CapacitySequence& seq, const MessageState& state)>;

/// Simulate one replica. The capacity stream is consumed identically for
/// every (n0, s0, propagation mode) so cells with the same seed share their
/// capacity sequence.
TrajectoryRecord run_trajectory(const SimulationConfig& config, ReplicaStreams& streams,
                                std::uint64_t run_id = 0, const StepObserver& observer = {});

/// Convenience overload deriving the streams from (config.seed, run_id).
TrajectoryRecord run_trajectory(const SimulationConfig& config, std::uint64_t run_id,
                                const StepObserver& observer = {});

} // namespace nrs
