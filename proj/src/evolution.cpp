#include "nrspread/evolution.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace nrs {

std::uint64_t MultiGraph::edge_count(NodeId i, NodeId j) const {
    const auto it = edges_.find(key(i, j));
    return it == edges_.end() ? 0 : it->second;
}

std::uint64_t MultiGraph::total_edges() const {
    std::uint64_t total = 0;
    for (const auto& [k, c] : edges_) {
        total += c;
    }
    return total;
}

void MultiGraph::add_edges(NodeId i, NodeId j, std::uint64_t count) {
    if (i >= node_count_ || j >= node_count_) {
        throw std::out_of_range(fmt::format("edge ({},{}) references a node outside 0..{}", i, j,
                                            node_count_ == 0 ? 0 : node_count_ - 1));
    }
    if (count == 0) {
        return;
    }
    edges_[key(i, j)] += count;
}

void MultiGraph::thin_edges(double keep, Rng& rng) {
    if (keep >= 1.0) {
        return;
    }
    for (auto it = edges_.begin(); it != edges_.end();) {
        it->second = sample_binomial(it->second, keep, rng);
        if (it->second == 0) {
            it = edges_.erase(it);
        } else {
            ++it;
        }
    }
}

std::vector<MultiGraph::Edge> MultiGraph::sorted_edges() const {
    std::vector<Edge> out;
    out.reserve(edges_.size());
    for (const auto& [k, c] : edges_) {
        out.push_back({static_cast<NodeId>(k >> 32), static_cast<NodeId>(k & 0xFFFFFFFFu), c});
    }
    std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
        return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
    });
    return out;
}

double new_edge_mean(const CapacitySequence& seq, NodeId i, NodeId arriving) {
    return seq.value(i) * seq.value(arriving) / seq.prefix_sum(arriving);
}

double deletion_probability(const CapacitySequence& seq, NodeId arriving) {
    if (arriving == 0) {
        return 0.0;
    }
    return 1.0 - seq.prefix_sum(arriving - 1) / seq.prefix_sum(arriving);
}

NewEdgeReport evolve_step(MultiGraph& g, const CapacitySequence& seq, Rng& rng,
                          bool delete_old_edges) {
    const NodeId arriving = g.node_count();
    if (seq.size() <= arriving) {
        throw std::out_of_range(fmt::format("no capacity drawn for arriving node {}", arriving));
    }
    if (delete_old_edges) {
        g.thin_edges(1.0 - deletion_probability(seq, arriving), rng);
    }
    g.add_node();

    NewEdgeReport report;
    report.new_node = arriving;
    report.to_old.resize(arriving);
    const double scale = seq.value(arriving) / seq.prefix_sum(arriving);
    for (NodeId i = 0; i < arriving; ++i) {
        const std::uint64_t c = sample_poisson(seq.value(i) * scale, rng);
        report.to_old[i] = c;
        g.add_edges(i, arriving, c);
    }
    report.self_loops = sample_poisson(seq.value(arriving) * scale, rng);
    g.add_edges(arriving, arriving, report.self_loops);
    return report;
}

MultiGraph init_graph(const CapacitySequence& seq, std::uint32_t n0, std::uint32_t s0, Rng& rng,
                      bool delete_old_edges) {
    if (n0 < 1) {
        throw std::invalid_argument("initial graph needs at least one node");
    }
    if (s0 < 1 || s0 > n0) {
        throw std::invalid_argument(fmt::format("initial message holders must satisfy 1 <= s0 <= n0, got s0={} n0={}", s0, n0));
    }
    if (seq.size() < n0) {
        throw std::out_of_range(fmt::format("initial graph of {} nodes needs {} capacities, have {}", n0, n0, seq.size()));
    }
    MultiGraph g;
    g.add_node();
    g.add_edges(0, 0, sample_poisson(seq.value(0), rng));
    for (std::uint32_t n = 1; n < n0; ++n) {
        evolve_step(g, seq, rng, delete_old_edges);
    }
    return g;
}

void write_edge_csv(std::ostream& out, const MultiGraph& g) {
    out << "i,j,count\n";
    for (const auto& e : g.sorted_edges()) {
        out << e.lo << ',' << e.hi << ',' << e.count << '\n';
    }
}

void write_node_csv(std::ostream& out, const MultiGraph& g, const CapacitySequence& seq,
                    const std::vector<bool>& has_message) {
    out << "i,capacity,has_message\n";
    for (NodeId i = 0; i < g.node_count(); ++i) {
        const bool flag = i < has_message.size() && has_message[i];
        out << fmt::format("{},{:.17g},{}\n", i, seq.value(i), flag ? 1 : 0);
    }
}

} // namespace nrs
