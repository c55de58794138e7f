#pragma once

#include <cstdint>
#include <random>

namespace nrs {

/// SplitMix64 finalizer. Used both to mix user seeds and to derive
/// per-replica stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based seed derivation: the seed of stream `stream` of replica
/// `run_id` depends only on (seed, run_id, stream), never on the order in
/// which replicas are executed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t run_id,
                                    std::uint64_t stream = 0) noexcept {
    return splitmix64(splitmix64(splitmix64(seed) ^ run_id) ^ (stream + 0x632BE59BD9B4E019ULL));
}

/// Thin wrapper over mt19937_64 with the few draws the simulator needs.
/// Uniforms are built from raw 53-bit words so results do not depend on the
/// standard library's distribution implementations.
class Rng {
public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double uniform_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t next_u64() { return engine_(); }

    engine_type& engine() { return engine_; }

private:
    engine_type engine_;
};

/// Poisson(mean) variate. Sequential-search inversion below mean 30, Hormann's
/// PTRS transformed rejection above. `mean` must be finite and >= 0; mean 0
/// returns 0 without consuming randomness.
std::uint64_t sample_poisson(double mean, Rng& rng);

/// Binomial(trials, p) variate; used to thin multi-edges on deletion.
std::uint64_t sample_binomial(std::uint64_t trials, double p, Rng& rng);

} // namespace nrs
