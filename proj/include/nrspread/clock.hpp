#pragma once

#include <cstdint>
#include <vector>

#include "nrspread/random.hpp"

namespace nrs {

/// Poisson clock driving the evolution: ticks arrive at `rate` per unit time
/// and the run stops at `horizon`, so the step count is Poisson(rate * horizon).
struct ClockParams {
    double rate = 1.0;
    double horizon = 1.0;

    void validate() const;
    double mean_steps() const { return rate * horizon; }
};

inline constexpr double kDefaultEpsilon = 1e-10;

/// P{X = k} for X ~ Poisson(mean), evaluated in log space.
double poisson_pmf(double mean, std::int64_t k);

std::uint64_t sample_step_count(const ClockParams& clock, Rng& rng);

/// Poisson pmf values 0..last together with exact upper tails
/// tail[k] = P{X > k}. Tails are accumulated from the far end of the
/// support, so small tails carry full relative precision.
class PoissonTable {
public:
    /// Tabulates far enough that the unrepresented remainder is below
    /// `resolution` * 1e-6.
    PoissonTable(double mean, double resolution);

    double mean() const { return mean_; }
    std::size_t size() const { return pmf_.size(); }
    double pmf(std::size_t k) const { return k < pmf_.size() ? pmf_[k] : 0.0; }
    /// P{X > k}.
    double upper_tail(std::size_t k) const { return k < tail_.size() ? tail_[k] : 0.0; }

private:
    double mean_;
    std::vector<double> pmf_;
    std::vector<double> tail_;
};

/// Smallest k_max with P{X > k_max} < epsilon for X ~ Poisson(mean).
std::uint64_t truncation_index(double mean, double epsilon);

} // namespace nrs
