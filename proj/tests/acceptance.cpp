// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "nrspread/analytics.hpp"
#include "nrspread/harness.hpp"
#include "oracles.hpp"

using namespace nrs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Outcome poisson_binomial_correctness() {
    std::mt19937_64 gen(20240601);
    std::uniform_int_distribution<int> len(1, 12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    Timer t;
    for (int v = 0; v < 50; ++v) {
        std::vector<double> p(static_cast<std::size_t>(len(gen)));
        for (auto& x : p) {
            x = u(gen);
        }
        const auto ref = oracle::poisson_binomial_bruteforce(p);
        const auto d = poisson_binomial_pmf(p);
        for (std::size_t j = 0; j < ref.size(); ++j) {
            worst = std::max(worst, std::fabs(d.at(static_cast<std::int64_t>(j)) - ref[j]));
        }
    }
    const double secs = t.seconds();
    return {worst <= 1e-12 && secs < 1.0, fmt::format("max abs error {:.3g} (<= 1e-12), {:.3f} s (< 1 s)", worst, secs)};
}

Outcome propagation_mode_equivalence() {
    // Fixed capacities for nodes 0..20; #S after 20 steps from a single informed node.
    constexpr std::uint64_t replicas = 100000;
    constexpr std::uint64_t capacity_seed = 2500;
    SimulationConfig config;
    config.tau = 2.5;
    config.max_nodes = 21;
    Timer t;
    std::vector<std::int64_t> edge, bern;
    edge.reserve(replicas);
    bern.reserve(replicas);
    for (auto mode : {PropagationMode::edge_exact, PropagationMode::bernoulli}) {
        config.propagation = mode;
        for (std::uint64_t r = 0; r < replicas; ++r) {
            ReplicaStreams streams(mode == PropagationMode::edge_exact ? 11 : 12, r);
            streams.capacity = Rng(capacity_seed);
            const auto rec = run_trajectory(config, streams, r);
            (mode == PropagationMode::edge_exact ? edge : bern).push_back(rec.final_row().spread_count);
        }
    }
    const double tv = total_variation(empirical_distribution(edge), empirical_distribution(bern));
    const double secs = t.seconds();
    return {tv < 0.01 && secs < 30.0, fmt::format("TV {:.5f} (< 0.01), {:.2f} s (< 30 s)", tv, secs)};
}

Outcome non_propagation_cross_check() {
    std::mt19937_64 gen(77);
    std::uniform_int_distribution<int> steps(1, 50);
    const double taus[] = {1.5, 2.5, 3.5};
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
        Rng rng(derive_seed(77, static_cast<std::uint64_t>(s)));
        const int k = steps(gen);
        CapacitySequence seq;
        seq.extend_to(static_cast<std::size_t>(k) + 1, {taus[s % 3], 1.0}, rng);
        const auto pinned = pinned_non_propagation_trace(seq);
        std::vector<double> trace;
        for (int m = 1; m <= k; ++m) {
            trace.push_back(pinned(static_cast<std::uint64_t>(m)));
        }
        const double branch = spread_pmf_fixed_k(trace).at(1);
        worst = std::max(worst, std::fabs(non_propagation_probability(seq, static_cast<std::uint64_t>(k)) - branch));
    }
    return {worst <= 1e-12, fmt::format("max abs difference {:.3g} over 100 sequences (<= 1e-12)", worst)};
}

Outcome node_count_law(const CompareReport& report) {
    return {report.node_count_tv < 0.005,
            fmt::format("TV {:.5f} over {} clock-bounded runs at mean {} (< 0.005)", report.node_count_tv,
                        report.replicas, report.mean_steps)};
}

Outcome horizon_mixture(const CompareReport& report) {
    return {report.pinned_tv < 0.01 && report.pinned_deficit < 1e-10,
            fmt::format("TV {:.5f} (< 0.01), truncation deficit {:.3g} (< 1e-10)", report.pinned_tv,
                        report.pinned_deficit)};
}

Outcome ratio_cdf_sanity() {
    const ClockParams clock{1.0, 2.0};
    const auto trace = constant_trace(0.3);
    const double deficit = spread_pmf_horizon(trace, clock).deficit;
    const double at_one = ratio_cdf(trace, clock, 1.0);
    const bool one_ok = std::fabs(at_one - (1.0 - deficit)) <= 1e-12;

    std::vector<double> xs;
    for (int g = 0; g <= 100; ++g) {
        xs.push_back(g / 100.0);
    }
    bool monotone = true;
    for (bool faithful : {false, true}) {
        const auto cdf = ratio_cdf_grid(trace, clock, xs, kDefaultEpsilon, faithful);
        for (std::size_t g = 1; g < cdf.size(); ++g) {
            monotone = monotone && cdf[g] >= cdf[g - 1];
        }
    }

    const double exact = ratio_cdf(trace, clock, 0.5);
    constexpr std::uint64_t replicas = 1000000;
    std::uint64_t hits = 0;
    for (std::uint64_t r = 0; r < replicas; ++r) {
        Rng rng(derive_seed(5, r));
        const std::uint64_t steps = sample_step_count(clock, rng);
        std::uint64_t spread = 1;
        for (std::uint64_t k = 0; k < steps; ++k) {
            spread += rng.bernoulli(0.3) ? 1 : 0;
        }
        hits += 2 * spread <= steps + 1 ? 1 : 0;
    }
    const double emp = static_cast<double>(hits) / replicas;
    const double se = std::sqrt(emp * (1 - emp) / replicas);
    const bool mc_ok = std::fabs(emp - exact) <= 3.0 * se;
    return {one_ok && monotone && mc_ok,
            fmt::format("cdf(1) - (1 - deficit) = {:.2g}; monotone on 101 points: {}; cdf(0.5) exact {:.5f} vs "
                        "simulated {:.5f} (|diff| {:.5f} <= 3 se = {:.5f})",
                        at_one - (1.0 - deficit), monotone ? "yes" : "no", exact, emp, std::fabs(emp - exact),
                        3.0 * se)};
}

const CellResult* find_cell(const SweepResult& r, double tau, std::uint32_t n0, std::uint32_t s0) {
    for (const auto& c : r.cells) {
        if (c.tau == tau && c.n0 == n0 && c.s0 == s0 && c.status == CellStatus::ok) {
            return &c;
        }
    }
    return nullptr;
}

Outcome figure_reproduction(const SweepResult& sweep, double secs) {
    if (sweep.exit_code() != 0) {
        return {false, "sweep reported failed cells"};
    }
    const auto* fast = find_cell(sweep, 1.5, 10, 1);
    if (fast == nullptr) {
        return {false, "missing cell 1.5_10_1"};
    }
    const double at200 = fast->curve.mean_at_nodes(200);
    const double at800 = fast->curve.mean_at_nodes(800);
    double worst_slow = 0.0;
    for (std::uint32_t n0 : {10u, 50u, 100u}) {
        for (std::uint32_t s0 : {1u, 5u, 10u}) {
            worst_slow = std::max(worst_slow, find_cell(sweep, 3.5, n0, s0)->curve.mean_at_nodes(3000));
        }
    }
    bool ordered = true;
    for (double tau : {1.5, 2.5, 3.5}) {
        for (std::uint32_t n0 : {10u, 50u, 100u}) {
            const auto* a = find_cell(sweep, tau, n0, 1);
            const auto* b = find_cell(sweep, tau, n0, 5);
            const auto* c = find_cell(sweep, tau, n0, 10);
            for (std::size_t k = 0; k < a->curve.points.size() && a->curve.points[k].node_count < 2 * n0; ++k) {
                ordered = ordered && a->curve.points[k].mean_ratio < b->curve.points[k].mean_ratio &&
                          b->curve.points[k].mean_ratio < c->curve.points[k].mean_ratio;
            }
        }
    }
    const bool pass = at200 >= 0.6 && at800 >= 0.85 && worst_slow < 0.9 && ordered && secs < 600.0;
    return {pass, fmt::format("tau=1.5,N0=10,S0=1: {:.4f} at N=200 (>= 0.6), {:.4f} at N=800 (>= 0.85); "
                              "tau=3.5 max over cells at N=3000 {:.4f} (< 0.9); S0 ordering for N<2N0: {}; "
                              "sweep {:.2f} s (< 600 s)",
                              at200, at800, worst_slow, ordered ? "yes" : "no", secs)};
}

Outcome determinism(const fs::path& first, const fs::path& second) {
    std::size_t files = 0;
    std::size_t differing = 0;
    for (const auto& entry : fs::directory_iterator(first)) {
        const auto other = second / entry.path().filename();
        std::ifstream a(entry.path(), std::ios::binary), b(other, std::ios::binary);
        std::ostringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        ++files;
        if (!fs::exists(other) || sa.str() != sb.str()) {
            ++differing;
        }
    }
    return {files == 54 && differing == 0,
            fmt::format("{} CSV files compared, {} differ (expect 54 files, 0 differing)", files, differing)};
}

} // namespace

int main(int argc, char** argv) {
    fs::path out = fs::temp_directory_path() / "nrs_acceptance";
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--out") {
            out = argv[i + 1];
        }
    }
    fs::remove_all(out);

    int failures = 0;
    const auto report = [&](const std::string& name, const Outcome& o) {
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << std::endl;
        failures += o.pass ? 0 : 1;
    };

    report("poisson-binomial recurrence vs subset enumeration", poisson_binomial_correctness());
    report("edge-exact vs bernoulli propagation", propagation_mode_equivalence());
    report("non-propagation closed form vs all-failure product", non_propagation_cross_check());

    SimulationConfig cmp;
    cmp.tau = 2.5;
    cmp.rate = 1.0;
    cmp.horizon = 3.0;
    cmp.seed = 3;
    const CompareReport compare = compare_analytic_empirical(cmp, 100000);
    report("node-count pmf vs clock-bounded simulation", node_count_law(compare));
    report("horizon mixture pmf vs end-to-end simulation", horizon_mixture(compare));
    report("ratio cdf sanity", ratio_cdf_sanity());

    SimulationConfig base;
    base.max_nodes = 3000;
    base.runs = 20;
    base.seed = 1;
    Timer t;
    const auto sweep = run_sweep(reference_grid(), base, out / "sweep_a");
    const double secs = t.seconds();
    report("averaged ratio curves (simulation study grid)", figure_reproduction(sweep, secs));
    run_sweep(reference_grid(), base, out / "sweep_b", 1);
    report("byte-identical output for identical seed and config", determinism(out / "sweep_a", out / "sweep_b"));

    std::cout << (failures == 0 ? "all acceptance criteria passed" : fmt::format("{} criteria failed", failures))
              << std::endl;
    return failures == 0 ? 0 : 1;
}
