#include "nrspread/clock.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace nrs {

void ClockParams::validate() const {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw std::invalid_argument(fmt::format("clock rate must be finite and > 0, got {}", rate));
    }
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument(fmt::format("time horizon must be finite and >= 0, got {}", horizon));
    }
}

double poisson_pmf(double mean, std::int64_t k) {
    if (k < 0) {
        throw std::invalid_argument(fmt::format("poisson_pmf: k must be >= 0, got {}", k));
    }
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw std::invalid_argument(fmt::format("poisson_pmf: mean must be finite and >= 0, got {}", mean));
    }
    if (mean == 0.0) {
        return k == 0 ? 1.0 : 0.0;
    }
    const double kd = static_cast<double>(k);
    return std::exp(kd * std::log(mean) - mean - std::lgamma(kd + 1.0));
}

std::uint64_t sample_step_count(const ClockParams& clock, Rng& rng) {
    clock.validate();
    return sample_poisson(clock.mean_steps(), rng);
}

PoissonTable::PoissonTable(double mean, double resolution) : mean_(mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw std::invalid_argument(fmt::format("PoissonTable: mean must be finite and >= 0, got {}", mean));
    }
    if (!(resolution > 0.0 && resolution < 1.0)) {
        throw std::invalid_argument(fmt::format("PoissonTable: resolution must lie in (0,1), got {}", resolution));
    }
    const double cutoff = resolution * 1e-6;
    for (std::int64_t k = 0;; ++k) {
        const double p = poisson_pmf(mean, k);
        pmf_.push_back(p);
        const double kd = static_cast<double>(k);
        // Past the mode the remainder is bounded by a geometric series with
        // ratio mean/(k+1).
        if (kd + 1.0 > mean) {
            const double bound = p * (mean / (kd + 1.0 - mean));
            if (bound < cutoff || p == 0.0) {
                break;
            }
        }
    }
    tail_.assign(pmf_.size(), 0.0);
    double acc = 0.0;
    for (std::size_t k = pmf_.size(); k-- > 0;) {
        tail_[k] = acc;
        acc += pmf_[k];
    }
}

std::uint64_t truncation_index(double mean, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument(fmt::format("truncation epsilon must lie in (0,1), got {}", epsilon));
    }
    const PoissonTable table(mean, epsilon);
    for (std::size_t k = 0; k < table.size(); ++k) {
        if (table.upper_tail(k) < epsilon) {
            return k;
        }
    }
    return table.size() - 1;
}

} // namespace nrs
