#include "nrspread/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace nrs {
namespace {

// Neumaier-compensated accumulator for long Poisson mixtures.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v)) {
            carry_ += (sum_ - t) + v;
        } else {
            carry_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

void check_probability(double p, std::size_t index) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(fmt::format("p[{}] = {} lies outside [0,1]", index, p));
    }
}

// Folds one more Bernoulli(p) into a Poisson-binomial pmf in place.
void fold_bernoulli(std::vector<double>& pmf, double p) {
    const double q = 1.0 - p;
    pmf.push_back(0.0);
    for (std::size_t j = pmf.size() - 1; j > 0; --j) {
        pmf[j] = pmf[j] * q + pmf[j - 1] * p;
    }
    pmf[0] *= q;
}

// Calls visit(k, weight, pb) for k = 0..k_max where pb is the pmf of the
// number of successes among p_1..p_k. Returns the omitted Poisson tail.
template <typename Visit>
double for_each_horizon_term(const TraceGenerator& trace, const ClockParams& clock, double epsilon,
                             Visit&& visit) {
    clock.validate();
    const double mean = clock.mean_steps();
    const std::uint64_t k_max = truncation_index(mean, epsilon);
    const PoissonTable weights(mean, epsilon);

    std::vector<double> pb{1.0};
    pb.reserve(k_max + 1);
    for (std::uint64_t k = 0; k <= k_max; ++k) {
        visit(k, weights.pmf(k), pb);
        if (k < k_max) {
            const double p = trace(k + 1);
            check_probability(p, k + 1);
            fold_bernoulli(pb, p);
        }
    }
    return weights.upper_tail(k_max);
}

void check_initial(const InitialCondition& init) {
    if (init.nodes < 1 || init.spread < 1 || init.spread > init.nodes) {
        throw std::invalid_argument(fmt::format("initial condition needs 1 <= s0 <= n0, got s0={} n0={}",
                                                init.spread, init.nodes));
    }
}

} // namespace

double DiscreteDistribution::at(std::int64_t i) const {
    if (i < support_start || i > support_end()) {
        return 0.0;
    }
    return probs[static_cast<std::size_t>(i - support_start)];
}

double DiscreteDistribution::cdf(std::int64_t i) const {
    CompensatedSum acc;
    for (std::int64_t j = support_start; j <= std::min(i, support_end()); ++j) {
        acc.add(at(j));
    }
    return acc.value();
}

double DiscreteDistribution::total_mass() const {
    CompensatedSum acc;
    for (double p : probs) {
        acc.add(p);
    }
    return acc.value();
}

void DiscreteDistribution::write_csv(std::ostream& out, std::string_view description) const {
    out << "# quantity=" << description << '\n';
    out << "i,prob\n";
    for (std::size_t j = 0; j < probs.size(); ++j) {
        out << fmt::format("{},{:.17g}\n", support_start + static_cast<std::int64_t>(j), probs[j]);
    }
    out << fmt::format("# truncation_deficit={:.6g}\n", deficit);
}

double total_variation(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    if (a.probs.empty() && b.probs.empty()) {
        return 0.0;
    }
    std::int64_t lo = a.support_start;
    std::int64_t hi = a.support_end();
    if (a.probs.empty()) {
        lo = b.support_start;
        hi = b.support_end();
    } else if (!b.probs.empty()) {
        lo = std::min(lo, b.support_start);
        hi = std::max(hi, b.support_end());
    }
    CompensatedSum acc;
    for (std::int64_t i = lo; i <= hi; ++i) {
        acc.add(std::fabs(a.at(i) - b.at(i)));
    }
    return 0.5 * acc.value();
}

DiscreteDistribution empirical_distribution(std::span<const std::int64_t> samples) {
    DiscreteDistribution d;
    if (samples.empty()) {
        return d;
    }
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    d.support_start = *lo;
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(*hi - *lo + 1), 0);
    for (std::int64_t s : samples) {
        ++counts[static_cast<std::size_t>(s - *lo)];
    }
    d.probs.reserve(counts.size());
    const double n = static_cast<double>(samples.size());
    for (std::uint64_t c : counts) {
        d.probs.push_back(static_cast<double>(c) / n);
    }
    return d;
}

DiscreteDistribution poisson_binomial_pmf(std::span<const double> p) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        check_probability(p[i], i);
    }
    DiscreteDistribution d;
    d.probs.reserve(p.size() + 1);
    d.probs.push_back(1.0);
    for (double pi : p) {
        fold_bernoulli(d.probs, pi);
    }
    return d;
}

DiscreteDistribution spread_pmf_fixed_k(std::span<const double> trace, std::uint32_t initial_spread) {
    if (trace.empty()) {
        throw std::invalid_argument("spread pmf needs a trace of at least one step");
    }
    if (initial_spread < 1) {
        throw std::invalid_argument("at least one node must start with the message");
    }
    DiscreteDistribution d = poisson_binomial_pmf(trace);
    d.support_start = initial_spread;
    return d;
}

DiscreteDistribution spread_pmf_fixed_k(const SuccessProbabilityTrace& trace, std::uint32_t initial_spread) {
    return spread_pmf_fixed_k(std::span<const double>(trace.probs), initial_spread);
}

TraceGenerator constant_trace(double p) {
    check_probability(p, 0);
    return [p](std::uint64_t) { return p; };
}

TraceGenerator frozen_trace(SuccessProbabilityTrace trace) {
    return [trace = std::move(trace)](std::uint64_t k) {
        if (k < 1 || k > trace.probs.size()) {
            throw std::out_of_range(fmt::format("frozen trace holds p_1..p_{}, asked for p_{}", trace.probs.size(), k));
        }
        return trace.probs[k - 1];
    };
}

TraceGenerator pinned_non_propagation_trace(const CapacitySequence& seq, InitialCondition init) {
    check_initial(init);
    if (seq.size() < init.nodes) {
        throw std::invalid_argument(fmt::format("pinned trace needs the {} initial capacities", init.nodes));
    }
    return [&seq, init](std::uint64_t k) {
        const std::uint64_t arriving = init.nodes - 1 + k;
        if (k < 1 || arriving >= seq.size()) {
            throw std::out_of_range(fmt::format("pinned trace needs capacity {}, sequence holds {}", arriving, seq.size()));
        }
        return success_probability(seq.prefix_sum(init.spread - 1), seq.value(arriving), seq.prefix_sum(arriving));
    };
}

DiscreteDistribution spread_pmf_horizon(const TraceGenerator& trace, const ClockParams& clock, double epsilon,
                                        InitialCondition init) {
    check_initial(init);
    std::vector<CompensatedSum> acc;
    const double deficit = for_each_horizon_term(
        trace, clock, epsilon, [&](std::uint64_t, double weight, const std::vector<double>& pb) {
            acc.resize(pb.size());
            for (std::size_t j = 0; j < pb.size(); ++j) {
                acc[j].add(weight * pb[j]);
            }
        });
    DiscreteDistribution d;
    d.support_start = init.spread;
    d.deficit = deficit;
    d.probs.reserve(acc.size());
    for (const auto& a : acc) {
        d.probs.push_back(a.value());
    }
    return d;
}

double non_propagation_probability(const CapacitySequence& seq, std::uint64_t steps) {
    if (steps < 1) {
        throw std::invalid_argument("non-propagation probability needs K >= 1");
    }
    if (seq.size() <= steps) {
        throw std::invalid_argument(fmt::format("need capacities 0..{}, sequence holds {}", steps, seq.size()));
    }
    CompensatedSum alpha;
    for (std::uint64_t k = 1; k <= steps; ++k) {
        alpha.add(seq.value(k) / seq.prefix_sum(k));
    }
    return std::exp(-seq.value(0) * alpha.value());
}

double node_count_pmf(const ClockParams& clock, std::int64_t i, std::uint32_t n0) {
    if (i < 1) {
        throw std::invalid_argument(fmt::format("node count must be >= 1, got {}", i));
    }
    clock.validate();
    if (i < static_cast<std::int64_t>(n0)) {
        return 0.0;
    }
    return poisson_pmf(clock.mean_steps(), i - static_cast<std::int64_t>(n0));
}

DiscreteDistribution node_count_distribution(const ClockParams& clock, double epsilon, std::uint32_t n0) {
    clock.validate();
    const std::uint64_t k_max = truncation_index(clock.mean_steps(), epsilon);
    const PoissonTable table(clock.mean_steps(), epsilon);
    DiscreteDistribution d;
    d.support_start = n0;
    d.probs.reserve(k_max + 1);
    for (std::uint64_t k = 0; k <= k_max; ++k) {
        d.probs.push_back(table.pmf(k));
    }
    d.deficit = table.upper_tail(k_max);
    return d;
}

std::int64_t ratio_count_cutoff(double x, std::uint64_t nodes) {
    return static_cast<std::int64_t>(std::floor(x * static_cast<double>(nodes) * (1.0 + 1e-12)));
}

std::vector<double> ratio_cdf_grid(const TraceGenerator& trace, const ClockParams& clock,
                                   std::span<const double> xs, double epsilon, bool paper_faithful,
                                   InitialCondition init) {
    check_initial(init);
    for (double x : xs) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw std::invalid_argument(fmt::format("ratio threshold must lie in [0,1], got {}", x));
        }
    }
    std::vector<CompensatedSum> acc(xs.size());
    for_each_horizon_term(trace, clock, epsilon, [&](std::uint64_t k, double weight, const std::vector<double>& pb) {
        const std::uint64_t nodes = init.nodes + k;
        for (std::size_t g = 0; g < xs.size(); ++g) {
            if (k == 0 && paper_faithful) {
                acc[g].add(weight);
                continue;
            }
            // pb[j] is P{#S_k = s0 + j}.
            const std::int64_t cutoff = ratio_count_cutoff(xs[g], nodes) - static_cast<std::int64_t>(init.spread);
            if (cutoff < 0) {
                continue;
            }
            const std::size_t last = std::min<std::size_t>(static_cast<std::size_t>(cutoff), pb.size() - 1);
            double partial = 0.0;
            for (std::size_t j = 0; j <= last; ++j) {
                partial += pb[j];
            }
            acc[g].add(weight * partial);
        }
    });
    std::vector<double> out;
    out.reserve(xs.size());
    for (const auto& a : acc) {
        out.push_back(std::min(1.0, a.value()));
    }
    return out;
}

double ratio_cdf(const TraceGenerator& trace, const ClockParams& clock, double x, double epsilon,
                 bool paper_faithful, InitialCondition init) {
    const double xs[] = {x};
    return ratio_cdf_grid(trace, clock, xs, epsilon, paper_faithful, init).front();
}

} // namespace nrs
