#include "nrspread/random.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace nrs {
namespace {

constexpr double kInversionLimit = 30.0;
// Above this the variate no longer fits comfortably in 53 bits; the normal
// approximation error is far below one unit there.
constexpr double kNormalLimit = 0x1.0p52;

std::uint64_t poisson_inversion(double mean, Rng& rng) {
    for (;;) {
        const double u = rng.uniform();
        double p = std::exp(-mean);
        double cdf = p;
        std::uint64_t k = 0;
        while (u > cdf) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
            if (p <= 0.0 && static_cast<double>(k) > mean) {
                break; // rounding left u above the accumulated cdf; redraw
            }
        }
        if (u <= cdf) {
            return k;
        }
    }
}

std::uint64_t poisson_ptrs(double mean, Rng& rng) {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::fabs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) {
            return static_cast<std::uint64_t>(kd);
        }
        if (kd < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -mean + kd * loglam - std::lgamma(kd + 1.0)) {
            return static_cast<std::uint64_t>(kd);
        }
    }
}

double standard_normal(Rng& rng) {
    // Box-Muller, one branch only.
    const double u1 = rng.uniform_open();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace

std::uint64_t sample_poisson(double mean, Rng& rng) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw std::invalid_argument(fmt::format("poisson mean must be finite and >= 0, got {}", mean));
    }
    if (mean == 0.0) {
        return 0;
    }
    if (mean < kInversionLimit) {
        return poisson_inversion(mean, rng);
    }
    if (mean < kNormalLimit) {
        return poisson_ptrs(mean, rng);
    }
    const double x = std::round(mean + std::sqrt(mean) * standard_normal(rng));
    if (x >= 0x1.0p64) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return x <= 0.0 ? 0 : static_cast<std::uint64_t>(x);
}

std::uint64_t sample_binomial(std::uint64_t trials, double p, Rng& rng) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(fmt::format("binomial p must lie in [0,1], got {}", p));
    }
    if (trials == 0 || p == 0.0) {
        return 0;
    }
    if (p == 1.0) {
        return trials;
    }
    if (trials <= 16) {
        std::uint64_t hits = 0;
        for (std::uint64_t t = 0; t < trials; ++t) {
            hits += rng.bernoulli(p) ? 1 : 0;
        }
        return hits;
    }
    std::binomial_distribution<std::uint64_t> dist(trials, p);
    return dist(rng.engine());
}

} // namespace nrs
