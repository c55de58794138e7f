#include "nrspread/capacity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "nrspread/errors.hpp"

namespace nrs {

void CapacityLaw::validate() const {
    if (!(tau > 1.0) || !std::isfinite(tau)) {
        throw std::invalid_argument(fmt::format("tau must be finite and > 1, got {}", tau));
    }
    if (!(x_min >= 1.0) || !std::isfinite(x_min)) {
        throw std::invalid_argument(fmt::format("x_min must be finite and >= 1, got {}", x_min));
    }
}

double CapacityLaw::mean() const {
    if (tau <= 2.0) {
        return std::numeric_limits<double>::infinity();
    }
    return x_min * (tau - 1.0) / (tau - 2.0);
}

double CapacityLaw::cdf(double x) const {
    if (x <= x_min) {
        return 0.0;
    }
    return 1.0 - std::pow(x / x_min, -(tau - 1.0));
}

double sample_capacity(const CapacityLaw& law, double u) {
    if (!(u > 0.0 && u < 1.0)) {
        throw std::invalid_argument(fmt::format("uniform draw must lie in (0,1), got {}", u));
    }
    law.validate();
    return law.x_min * std::pow(u, -1.0 / (law.tau - 1.0));
}

CapacitySequence CapacitySequence::from_values(std::span<const double> values) {
    CapacitySequence seq;
    seq.values_.reserve(values.size());
    seq.prefix_.reserve(values.size());
    for (double v : values) {
        seq.push_back(v);
    }
    return seq;
}

void CapacitySequence::push_back(double value) {
    if (!(value > 0.0)) {
        throw std::invalid_argument(fmt::format("capacity must be positive, got {}", value));
    }
    const double total = (prefix_.empty() ? 0.0 : prefix_.back()) + value;
    if (!std::isfinite(total)) {
        throw numerical_error(fmt::format(
            "total capacity overflowed after {} nodes (last capacity {}); tau too small for this run length",
            values_.size() + 1, value));
    }
    values_.push_back(value);
    prefix_.push_back(total);
}

void CapacitySequence::extend(const CapacityLaw& law, Rng& rng) {
    push_back(sample_capacity(law, rng.uniform_open()));
}

void CapacitySequence::extend_to(std::size_t n, const CapacityLaw& law, Rng& rng) {
    while (values_.size() < n) {
        extend(law, rng);
    }
}

} // namespace nrs
