#include "nrspread/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "nrspread/errors.hpp"

namespace nrs {
namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
    }
    return out;
}

void export_snapshots(const SimulationConfig& config, const std::filesystem::path& out_dir,
                      const std::string& tag) {
    const auto wanted = [&](std::uint32_t n) {
        return std::find(config.snapshot_sizes.begin(), config.snapshot_sizes.end(), n) !=
               config.snapshot_sizes.end();
    };
    run_trajectory(config, 0, [&](const MultiGraph* g, const CapacitySequence& seq, const MessageState& state) {
        if (g == nullptr || !wanted(g->node_count())) {
            return;
        }
        const std::string stem = fmt::format("snapshot_{}_N{}", tag, g->node_count());
        auto edges = open_output(out_dir / (stem + "_edges.csv"));
        write_edge_csv(edges, *g);
        auto nodes = open_output(out_dir / (stem + "_nodes.csv"));
        write_node_csv(nodes, *g, seq, state.members());
    });
}

double horizon_or_default(const SimulationConfig& config) { return config.horizon.value_or(3.0); }

} // namespace

double AggregateCurve::mean_at_nodes(std::uint32_t node_count) const {
    if (points.empty()) {
        throw std::out_of_range("empty aggregate curve");
    }
    for (const auto& p : points) {
        if (p.node_count >= node_count) {
            return p.mean_ratio;
        }
    }
    return points.back().mean_ratio;
}

AggregateCurve aggregate(std::span<const TrajectoryRecord> runs) {
    AggregateCurve curve;
    std::size_t longest = 0;
    for (const auto& r : runs) {
        longest = std::max(longest, r.rows.size());
    }
    curve.points.reserve(longest);
    for (std::size_t k = 0; k < longest; ++k) {
        double sum = 0.0;
        std::uint32_t count = 0;
        std::uint32_t nodes = 0;
        for (const auto& r : runs) {
            if (k < r.rows.size()) {
                sum += r.rows[k].ratio();
                nodes = r.rows[k].node_count;
                ++count;
            }
        }
        const double mean = sum / count;
        double ss = 0.0;
        for (const auto& r : runs) {
            if (k < r.rows.size()) {
                const double d = r.rows[k].ratio() - mean;
                ss += d * d;
            }
        }
        const double se = count > 1 ? std::sqrt(ss / (count - 1) / count) : 0.0;
        curve.points.push_back({k, nodes, mean, count, se});
    }
    return curve;
}

void write_trajectories_csv(std::ostream& out, std::span<const TrajectoryRecord> runs) {
    out << "run_id,k,N_k,S_k,ratio\n";
    fmt::memory_buffer buf;
    for (const auto& r : runs) {
        for (const auto& row : r.rows) {
            fmt::format_to(std::back_inserter(buf), "{},{},{},{},{:.6f}\n", r.run_id, row.k, row.node_count,
                           row.spread_count, row.ratio());
        }
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        buf.clear();
    }
}

void write_aggregate_csv(std::ostream& out, const AggregateCurve& curve) {
    out << "k,N_k,mean_ratio,count,std_error\n";
    for (const auto& p : curve.points) {
        out << fmt::format("{},{},{:.6f},{},{:.6f}\n", p.k, p.node_count, p.mean_ratio, p.count, p.std_error);
    }
}

std::vector<TrajectoryRecord> run_replicas(const SimulationConfig& config, unsigned workers) {
    config.validate();
    const std::size_t runs = config.runs;
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, runs));

    std::vector<std::optional<TrajectoryRecord>> results(runs);
    std::vector<std::exception_ptr> errors(runs);
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t r = next++; r < runs; r = next++) {
            try {
                results[r] = run_trajectory(config, r);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    std::vector<TrajectoryRecord> out;
    out.reserve(runs);
    for (auto& r : results) {
        out.push_back(std::move(*r));
    }
    return out;
}

SweepGrid reference_grid() { return {{1.5, 2.5, 3.5}, {10, 50, 100}, {1, 5, 10}}; }

int SweepResult::exit_code() const {
    int code = 0;
    for (const auto& c : cells) {
        if (c.status == CellStatus::config_error) {
            return 2;
        }
        if (c.status == CellStatus::numerical_error) {
            code = 3;
        }
    }
    return code;
}

std::string cell_tag(double tau, std::uint32_t n0, std::uint32_t s0) {
    return fmt::format("{:g}_{}_{}", tau, n0, s0);
}

SweepResult run_sweep(const SweepGrid& grid, const SimulationConfig& base, const std::filesystem::path& out_dir,
                      unsigned workers) {
    std::filesystem::create_directories(out_dir);
    SweepResult result;
    for (double tau : grid.taus) {
        for (std::uint32_t n0 : grid.n0s) {
            for (std::uint32_t s0 : grid.s0s) {
                CellResult cell;
                cell.tau = tau;
                cell.n0 = n0;
                cell.s0 = s0;
                SimulationConfig config = base;
                config.tau = tau;
                config.n0 = n0;
                config.s0 = s0;
                const std::string tag = cell_tag(tau, n0, s0);
                try {
                    config.validate();
                    const auto runs = run_replicas(config, workers);
                    cell.curve = aggregate(runs);
                    auto traj = open_output(out_dir / fmt::format("trajectories_{}.csv", tag));
                    write_trajectories_csv(traj, runs);
                    auto agg = open_output(out_dir / fmt::format("aggregate_{}.csv", tag));
                    write_aggregate_csv(agg, cell.curve);
                    if (!config.snapshot_sizes.empty()) {
                        export_snapshots(config, out_dir, tag);
                    }
                } catch (const numerical_error& e) {
                    cell.status = CellStatus::numerical_error;
                    cell.message = e.what();
                } catch (const std::invalid_argument& e) {
                    cell.status = CellStatus::config_error;
                    cell.message = e.what();
                }
                result.cells.push_back(std::move(cell));
            }
        }
    }
    return result;
}

CompareReport compare_analytic_empirical(const SimulationConfig& config, std::uint64_t replicas) {
    SimulationConfig clocked = config;
    clocked.horizon = horizon_or_default(config);
    clocked.max_nodes.reset();
    clocked.snapshot_sizes.clear();
    clocked.validate();
    if (replicas < 1) {
        throw std::invalid_argument("compare needs at least one replica");
    }

    const ClockParams clock{config.rate, *clocked.horizon};
    const InitialCondition init{config.n0, config.s0};
    const CapacityLaw law{config.tau, config.x_min};

    CompareReport report;
    report.mean_steps = clock.mean_steps();
    report.replicas = replicas;
    report.k_max = truncation_index(clock.mean_steps(), config.epsilon);

    // One capacity sequence shared by every replica.
    const std::uint64_t capacity_seed = derive_seed(config.seed, 0, 0);
    CapacitySequence fixed;
    Rng capacity_rng(capacity_seed);
    fixed.extend_to(config.n0 + report.k_max + 1, law, capacity_rng);

    // Full model, end to end, plus the per-path exact mixtures.
    SimulationConfig sized = clocked;
    sized.horizon.reset();
    sized.max_nodes = static_cast<std::uint32_t>(config.n0 + report.k_max);
    std::vector<std::int64_t> node_samples;
    std::vector<std::int64_t> spread_samples;
    node_samples.reserve(replicas);
    spread_samples.reserve(replicas);
    std::vector<double> mixture_sum;
    for (std::uint64_t r = 0; r < replicas; ++r) {
        ReplicaStreams streams(config.seed, r);
        streams.capacity = Rng(capacity_seed);
        const TrajectoryRecord run = run_trajectory(clocked, streams, r);
        node_samples.push_back(run.final_row().node_count);
        spread_samples.push_back(run.final_row().spread_count);

        ReplicaStreams replay(config.seed, r);
        replay.capacity = Rng(capacity_seed);
        const TrajectoryRecord path = run_trajectory(sized, replay, r);
        const DiscreteDistribution mix = spread_pmf_horizon(frozen_trace(path.trace), clock, config.epsilon, init);
        mixture_sum.resize(std::max(mixture_sum.size(), mix.probs.size()), 0.0);
        for (std::size_t j = 0; j < mix.probs.size(); ++j) {
            mixture_sum[j] += mix.probs[j];
        }
    }
    report.node_count_empirical = empirical_distribution(node_samples);
    report.node_count_exact = node_count_distribution(clock, config.epsilon, config.n0);
    report.node_count_tv = total_variation(report.node_count_empirical, report.node_count_exact);
    report.path_empirical = empirical_distribution(spread_samples);
    report.path_mixture.support_start = config.s0;
    for (double v : mixture_sum) {
        report.path_mixture.probs.push_back(v / static_cast<double>(replicas));
    }
    report.path_tv = total_variation(report.path_empirical, report.path_mixture);

    // Pinned history: p_k does not depend on the realized spread.
    const TraceGenerator pinned = pinned_non_propagation_trace(fixed, init);
    report.pinned_exact = spread_pmf_horizon(pinned, clock, config.epsilon, init);
    report.pinned_deficit = report.pinned_exact.deficit;
    report.pinned_ratio_cdf_half = ratio_cdf(pinned, clock, 0.5, config.epsilon, false, init);

    std::vector<std::int64_t> pinned_samples;
    pinned_samples.reserve(replicas);
    std::uint64_t at_or_below_half = 0;
    for (std::uint64_t r = 0; r < replicas; ++r) {
        Rng clock_rng(derive_seed(config.seed, r, 2));
        Rng chain_rng(derive_seed(config.seed, r, 1));
        const std::uint64_t steps = sample_poisson(clock.mean_steps(), clock_rng);
        fixed.extend_to(config.n0 + steps, law, capacity_rng);
        std::int64_t spread = config.s0;
        for (std::uint64_t k = 1; k <= steps; ++k) {
            spread += chain_rng.bernoulli(pinned(k)) ? 1 : 0;
        }
        pinned_samples.push_back(spread);
        if (spread <= ratio_count_cutoff(0.5, config.n0 + steps)) {
            ++at_or_below_half;
        }
    }
    report.pinned_empirical = empirical_distribution(pinned_samples);
    report.pinned_tv = total_variation(report.pinned_empirical, report.pinned_exact);
    const double n = static_cast<double>(replicas);
    report.pinned_ratio_empirical_half = static_cast<double>(at_or_below_half) / n;
    report.pinned_ratio_std_error =
        std::sqrt(report.pinned_ratio_empirical_half * (1.0 - report.pinned_ratio_empirical_half) / n);
    return report;
}

void CompareReport::write(std::ostream& out) const {
    out << fmt::format("mean_steps={}\n", mean_steps);
    out << fmt::format("replicas={}\n", replicas);
    out << fmt::format("k_max={}\n", k_max);
    out << fmt::format("node_count_tv={:.6g}\n", node_count_tv);
    out << fmt::format("pinned_spread_tv={:.6g}\n", pinned_tv);
    out << fmt::format("pinned_truncation_deficit={:.6g}\n", pinned_deficit);
    out << fmt::format("pinned_ratio_cdf_0.5_exact={:.6f}\n", pinned_ratio_cdf_half);
    out << fmt::format("pinned_ratio_cdf_0.5_empirical={:.6f}\n", pinned_ratio_empirical_half);
    out << fmt::format("pinned_ratio_cdf_0.5_std_error={:.6f}\n", pinned_ratio_std_error);
    out << fmt::format("path_mixture_tv={:.6g}\n", path_tv);
    out << "\ni,node_count_empirical,node_count_exact\n";
    const auto rows = [&](const DiscreteDistribution& a, const DiscreteDistribution& b) {
        const std::int64_t lo = std::min(a.support_start, b.support_start);
        const std::int64_t hi = std::max(a.support_end(), b.support_end());
        for (std::int64_t i = lo; i <= hi; ++i) {
            out << fmt::format("{},{:.6f},{:.6f}\n", i, a.at(i), b.at(i));
        }
    };
    rows(node_count_empirical, node_count_exact);
    out << "\ni,pinned_spread_empirical,pinned_spread_exact\n";
    rows(pinned_empirical, pinned_exact);
    out << "\ni,path_spread_empirical,path_spread_mixture\n";
    rows(path_empirical, path_mixture);
}

void run_analytic(const SimulationConfig& config, const std::filesystem::path& out_dir) {
    SimulationConfig sized = config;
    sized.horizon.reset();
    sized.snapshot_sizes.clear();
    const ClockParams clock{config.rate, horizon_or_default(config)};
    clock.validate();
    const std::uint64_t k_max = truncation_index(clock.mean_steps(), config.epsilon);
    sized.max_nodes = static_cast<std::uint32_t>(config.n0 + k_max);
    sized.validate();

    const TrajectoryRecord path = run_trajectory(sized, 0);
    const CapacitySequence& seq = path.capacities;
    const InitialCondition init{config.n0, config.s0};
    const std::string params = fmt::format("tau={:g} rate={:g} t_star={:g} n0={} s0={} seed={} epsilon={:g}",
                                           config.tau, config.rate, clock.horizon, config.n0, config.s0,
                                           config.seed, config.epsilon);

    std::filesystem::create_directories(out_dir);
    {
        auto out = open_output(out_dir / "dist_node_count.csv");
        node_count_distribution(clock, config.epsilon, config.n0).write_csv(out, "node_count " + params);
    }
    const TraceGenerator pinned = pinned_non_propagation_trace(seq, init);
    const TraceGenerator frozen = frozen_trace(path.trace);
    {
        auto out = open_output(out_dir / "dist_spread_pinned.csv");
        spread_pmf_horizon(pinned, clock, config.epsilon, init).write_csv(out, "spread_horizon_pinned " + params);
    }
    {
        auto out = open_output(out_dir / "dist_spread_path.csv");
        spread_pmf_horizon(frozen, clock, config.epsilon, init).write_csv(out, "spread_horizon_path " + params);
    }
    if (k_max >= 1) {
        DiscreteDistribution np;
        np.support_start = 1;
        for (std::uint64_t k = 1; k <= k_max; ++k) {
            np.probs.push_back(non_propagation_probability(seq, k));
        }
        auto out = open_output(out_dir / "dist_non_propagation.csv");
        np.write_csv(out, "non_propagation_by_step " + params);
    }
    {
        std::vector<double> xs;
        for (int g = 0; g <= 100; ++g) {
            xs.push_back(g / 100.0);
        }
        const auto pinned_cdf = ratio_cdf_grid(pinned, clock, xs, config.epsilon, config.paper_faithful, init);
        const auto path_cdf = ratio_cdf_grid(frozen, clock, xs, config.epsilon, config.paper_faithful, init);
        auto out = open_output(out_dir / "dist_ratio_cdf.csv");
        out << "# quantity=ratio_cdf paper_faithful=" << (config.paper_faithful ? 1 : 0) << ' ' << params << '\n';
        out << "x,cdf_pinned,cdf_path\n";
        for (std::size_t g = 0; g < xs.size(); ++g) {
            out << fmt::format("{:.2f},{:.17g},{:.17g}\n", xs[g], pinned_cdf[g], path_cdf[g]);
        }
    }
}

} // namespace nrs
