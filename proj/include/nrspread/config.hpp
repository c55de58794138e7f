#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nrs {

enum class PropagationMode { edge_exact, bernoulli };
enum class RunMode { simulate, analytic, compare };

std::string to_string(PropagationMode mode);
std::string to_string(RunMode mode);

/// Parameters of one simulation cell.
struct SimulationConfig {
    double tau = 2.5;
    double x_min = 1.0;
    std::uint32_t n0 = 1;
    std::uint32_t s0 = 1;
    double rate = 1.0;
    /// Time horizon T*; when set, each run stops after K* ~ Poisson(rate * T*) steps.
    std::optional<double> horizon;
    /// Size bound; the run stops once N_k reaches it. With a horizon as well,
    /// whichever is hit first ends the run.
    std::optional<std::uint32_t> max_nodes = 3000;
    std::uint32_t runs = 20;
    std::uint64_t seed = 1;
    RunMode mode = RunMode::simulate;
    PropagationMode propagation = PropagationMode::bernoulli;
    bool delete_old_edges = false;
    double epsilon = 1e-10;
    bool paper_faithful = false;
    /// Node counts at which run 0 exports graph snapshots (edge-exact only).
    std::vector<std::uint32_t> snapshot_sizes;

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
};

} // namespace nrs
