#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "nrspread/capacity.hpp"
#include "nrspread/clock.hpp"
#include "nrspread/spreading.hpp"

namespace nrs {

/// Finite pmf on {support_start, support_start + 1, ...}. Mass cut off by
/// series truncation is kept in `deficit`, never renormalized away.
struct DiscreteDistribution {
    std::int64_t support_start = 0;
    std::vector<double> probs;
    double deficit = 0.0;

    /// P{X = i}; zero outside the stored support.
    double at(std::int64_t i) const;
    /// P{X <= i}.
    double cdf(std::int64_t i) const;
    double total_mass() const;
    std::int64_t support_end() const { return support_start + static_cast<std::int64_t>(probs.size()) - 1; }

    /// CSV export: a "# quantity=..." line, an "i,prob" header, one row per
    /// support point and a trailing "# truncation_deficit=..." line.
    void write_csv(std::ostream& out, std::string_view description) const;
};

/// Half the L1 distance between two pmfs over the union of their supports.
double total_variation(const DiscreteDistribution& a, const DiscreteDistribution& b);

/// Empirical pmf of integer samples.
DiscreteDistribution empirical_distribution(std::span<const std::int64_t> samples);

/// Exact pmf of a sum of independent Bernoulli(p_i) trials on {0..k}, by the
/// O(k^2) convolution recurrence. Every p_i must lie in [0,1].
DiscreteDistribution poisson_binomial_pmf(std::span<const double> p);

/// P{#S_k = i} for a given trace p_1..p_k when `initial_spread` nodes start
/// with the message: the Poisson binomial shifted to {s0..s0+k}.
DiscreteDistribution spread_pmf_fixed_k(std::span<const double> trace, std::uint32_t initial_spread = 1);
DiscreteDistribution spread_pmf_fixed_k(const SuccessProbabilityTrace& trace, std::uint32_t initial_spread = 1);

/// Supplies p_k for k = 1, 2, ...
using TraceGenerator = std::function<double(std::uint64_t k)>;

TraceGenerator constant_trace(double p);
/// Replays a recorded trace; asking past its end throws std::out_of_range.
TraceGenerator frozen_trace(SuccessProbabilityTrace trace);
/// Where the horizon starts: n0 nodes of which s0 hold the message.
struct InitialCondition {
    std::uint32_t nodes = 1;
    std::uint32_t spread = 1;
};

/// The history in which the message never leaves the initial holders. For
/// n0 = s0 = 1 this is p_k = 1 - exp(-capacity_0 * capacity_k / L_k).
/// Holds a reference to `seq`, which must outlive the generator.
TraceGenerator pinned_non_propagation_trace(const CapacitySequence& seq, InitialCondition init = {});

/// P{#S_{K*} = i} with K* ~ Poisson(rate * horizon): the Poisson mixture of
/// spread_pmf_fixed_k over k = 0..truncation_index(rate * horizon, epsilon).
DiscreteDistribution spread_pmf_horizon(const TraceGenerator& trace, const ClockParams& clock,
                                        double epsilon = kDefaultEpsilon, InitialCondition init = {});

/// P{#S_K = 1} = exp(-capacity_0 * sum_{k=1..K} capacity_k / L_k).
double non_propagation_probability(const CapacitySequence& seq, std::uint64_t steps);

/// P{N_{K*} = i} = poisson_pmf(rate * horizon, i - n0); zero for i < n0.
double node_count_pmf(const ClockParams& clock, std::int64_t i, std::uint32_t n0 = 1);
DiscreteDistribution node_count_distribution(const ClockParams& clock, double epsilon = kDefaultEpsilon,
                                             std::uint32_t n0 = 1);

/// Largest message count i with i / nodes <= x, tolerant to the rounding
/// of x * nodes at exact multiples.
std::int64_t ratio_count_cutoff(double x, std::uint64_t nodes);

/// P{#S_{K*} / N_{K*} <= x}. With `paper_faithful` the K* = 0 weight is
/// added for every x (the uncorrected series); otherwise it counts only
/// when the initial ratio s0/n0 is itself <= x.
double ratio_cdf(const TraceGenerator& trace, const ClockParams& clock, double x,
                 double epsilon = kDefaultEpsilon, bool paper_faithful = false, InitialCondition init = {});

/// ratio_cdf on several x at once, sharing the mixture computation.
std::vector<double> ratio_cdf_grid(const TraceGenerator& trace, const ClockParams& clock,
                                   std::span<const double> xs, double epsilon = kDefaultEpsilon,
                                   bool paper_faithful = false, InitialCondition init = {});

} // namespace nrs
