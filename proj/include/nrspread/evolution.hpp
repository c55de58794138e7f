#pragma once

#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nrspread/capacity.hpp"
#include "nrspread/random.hpp"

namespace nrs {

using NodeId = std::uint32_t;

/// Undirected multigraph with self-loops. Edge multiplicities are stored
/// sparsely, keyed by the unordered pair (i <= j).
class MultiGraph {
public:
    struct Edge {
        NodeId lo;
        NodeId hi;
        std::uint64_t count;
    };

    std::uint32_t node_count() const { return node_count_; }
    /// Evolution step N of the graph G_N; nodes are 0..node_count()-1.
    std::uint32_t step() const { return node_count_ == 0 ? 0 : node_count_ - 1; }

    std::uint64_t edge_count(NodeId i, NodeId j) const;
    std::uint64_t total_edges() const;
    std::size_t distinct_pairs() const { return edges_.size(); }

    NodeId add_node() { return node_count_++; }
    void add_edges(NodeId i, NodeId j, std::uint64_t count);

    /// Thin every existing edge independently, keeping each with probability
    /// `keep`.
    void thin_edges(double keep, Rng& rng);

    /// Edges sorted by (lo, hi).
    std::vector<Edge> sorted_edges() const;

private:
    static std::uint64_t key(NodeId i, NodeId j) {
        if (i > j) {
            std::swap(i, j);
        }
        return (static_cast<std::uint64_t>(i) << 32) | j;
    }

    std::uint32_t node_count_ = 0;
    std::unordered_map<std::uint64_t, std::uint64_t> edges_;
};

/// New edges created by one evolution step.
struct NewEdgeReport {
    NodeId new_node = 0;
    /// to_old[i] = E_{N+1}(i, N+1) for the old nodes i = 0..N.
    std::vector<std::uint64_t> to_old;
    std::uint64_t self_loops = 0;
};

/// Mean number of new edges between node i and arriving node `arriving`:
/// capacity_i * capacity_arriving / L_arriving.
double new_edge_mean(const CapacitySequence& seq, NodeId i, NodeId arriving);

/// Probability that an old edge is deleted when node `arriving` joins:
/// 1 - L_{arriving-1} / L_arriving.
double deletion_probability(const CapacitySequence& seq, NodeId arriving);

/// Grow the graph by one node. `seq` must already hold the arriving node's
/// capacity.
NewEdgeReport evolve_step(MultiGraph& g, const CapacitySequence& seq, Rng& rng,
                          bool delete_old_edges = false);

/// Initial graph with n0 nodes: node 0 with Poisson(capacity_0) self-loops,
/// followed by n0 - 1 ordinary evolution steps. `s0` is only validated here;
/// the message holders are assigned by the caller.
MultiGraph init_graph(const CapacitySequence& seq, std::uint32_t n0, std::uint32_t s0, Rng& rng,
                      bool delete_old_edges = false);

/// Snapshot export: "i,j,count" rows (header included), sorted.
void write_edge_csv(std::ostream& out, const MultiGraph& g);
/// Snapshot export: "i,capacity,has_message" rows (header included).
void write_node_csv(std::ostream& out, const MultiGraph& g, const CapacitySequence& seq,
                    const std::vector<bool>& has_message);

} // namespace nrs
