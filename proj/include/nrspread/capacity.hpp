#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nrspread/random.hpp"

namespace nrs {

/// Regularly varying capacity law with the slowly varying factor fixed to 1:
/// a Pareto law with P{L > x} = (x / x_min)^-(tau - 1) for x >= x_min.
struct CapacityLaw {
    double tau = 2.5;
    double x_min = 1.0;

    /// Throws std::invalid_argument unless tau > 1 and x_min >= 1.
    void validate() const;
    /// Analytic mean; +inf when tau <= 2.
    double mean() const;
    double cdf(double x) const;
};

/// Inverse-CDF draw: x_min * u^(-1/(tau-1)). Requires 0 < u < 1.
double sample_capacity(const CapacityLaw& law, double u);

/// Capacities of nodes 0..N together with their running totals.
class CapacitySequence {
public:
    CapacitySequence() = default;

    /// Build from explicit capacities (tests and pinned scenarios).
    static CapacitySequence from_values(std::span<const double> values);

    /// Append one value. Throws numerical_error if the running total
    /// overflows, std::invalid_argument if the value is not positive.
    void push_back(double value);

    /// Append one draw from `law`.
    void extend(const CapacityLaw& law, Rng& rng);
    /// Draw until size() >= n.
    void extend_to(std::size_t n, const CapacityLaw& law, Rng& rng);

    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    double value(std::size_t i) const { return values_.at(i); }
    /// Total capacity of nodes 0..i.
    double prefix_sum(std::size_t i) const { return prefix_.at(i); }

    std::span<const double> values() const { return values_; }
    std::span<const double> prefix_sums() const { return prefix_; }

private:
    std::vector<double> values_;
    std::vector<double> prefix_;
};

} // namespace nrs
