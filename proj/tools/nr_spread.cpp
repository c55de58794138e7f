// nr-spread: message spreading on Norros-Reittu graphs.
//
//   nr-spread simulate --tau 1.5,2.5,3.5 --n0 10,50,100 --s0 1,5,10 --out results
//   nr-spread analytic --tau 2.5 --rate 1 --t-star 3 --out results
//   nr-spread compare  --tau 2.5 --t-star 3 --replicas 100000 --out results

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "nrspread/errors.hpp"
#include "nrspread/harness.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

struct Options {
    std::vector<double> taus{2.5};
    std::vector<std::uint32_t> n0s{1};
    std::vector<std::uint32_t> s0s{1};
    double x_min = 1.0;
    double rate = 1.0;
    double t_star = 0.0;
    std::uint32_t max_nodes = 3000;
    std::uint32_t runs = 20;
    std::uint64_t seed = 1;
    std::string prop_mode = "bernoulli";
    bool delete_old_edges = false;
    double epsilon = nrs::kDefaultEpsilon;
    bool paper_faithful = false;
    std::string out = "out";
    unsigned workers = 0;
    std::uint64_t replicas = 100000;
    std::vector<std::uint32_t> snapshots;
};

nrs::SimulationConfig base_config(const Options& o, bool has_t_star, bool has_max_nodes) {
    nrs::SimulationConfig c;
    c.tau = o.taus.front();
    c.n0 = o.n0s.front();
    c.s0 = o.s0s.front();
    c.x_min = o.x_min;
    c.rate = o.rate;
    if (has_t_star) {
        c.horizon = o.t_star;
    }
    // A time horizon alone bounds the run by the clock; max-nodes 0 removes
    // the size bound explicitly.
    if ((has_t_star && !has_max_nodes) || o.max_nodes == 0) {
        c.max_nodes.reset();
    } else {
        c.max_nodes = o.max_nodes;
    }
    c.runs = o.runs;
    c.seed = o.seed;
    c.propagation = o.prop_mode == "edge" ? nrs::PropagationMode::edge_exact : nrs::PropagationMode::bernoulli;
    c.delete_old_edges = o.delete_old_edges;
    c.epsilon = o.epsilon;
    c.paper_faithful = o.paper_faithful;
    c.snapshot_sizes = o.snapshots;
    return c;
}

int simulate(const Options& o, const nrs::SimulationConfig& base) {
    const nrs::SweepGrid grid{o.taus, o.n0s, o.s0s};
    const auto result = nrs::run_sweep(grid, base, o.out, o.workers);
    for (const auto& cell : result.cells) {
        const std::string tag = nrs::cell_tag(cell.tau, cell.n0, cell.s0);
        if (cell.status != nrs::CellStatus::ok) {
            std::cerr << fmt::format("cell {} skipped: {}\n", tag, cell.message);
            continue;
        }
        const auto& last = cell.curve.points.back();
        std::cout << fmt::format("cell {}: N_k={} mean ratio {:.4f} (se {:.4f}, {} runs)\n", tag, last.node_count,
                                 last.mean_ratio, last.std_error, last.count);
    }
    return result.exit_code();
}

int analytic(const Options& o, const nrs::SimulationConfig& config) {
    nrs::run_analytic(config, o.out);
    std::cout << fmt::format("wrote dist_*.csv to {}\n", o.out);
    return 0;
}

int compare(const Options& o, const nrs::SimulationConfig& config) {
    const auto report = nrs::compare_analytic_empirical(config, o.replicas);
    std::filesystem::create_directories(o.out);
    std::ofstream out(std::filesystem::path(o.out) / "report_compare.txt", std::ios::binary);
    report.write(out);
    std::cout << fmt::format("node-count TV {:.5f}, pinned spread TV {:.5f}, per-path mixture TV {:.5f}\n",
                             report.node_count_tv, report.pinned_tv, report.path_tv);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Message spreading on random graphs grown by the Norros-Reittu model"};
    app.set_config("--config", "", "key=value file; command-line flags override it");
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    app.add_option("--tau", o.taus, "capacity tail parameter(s), > 1")->delimiter(',');
    app.add_option("--n0", o.n0s, "initial graph size(s)")->delimiter(',');
    app.add_option("--s0", o.s0s, "initial message holder count(s)")->delimiter(',');
    app.add_option("--x-min", o.x_min, "capacity lower bound")->check(CLI::Range(1.0, 1e300));
    app.add_option("--rate", o.rate, "clock rate lambda");
    auto* t_star = app.add_option("--t-star", o.t_star, "time horizon T*");
    auto* max_nodes = app.add_option("--max-nodes", o.max_nodes, "stop once N_k reaches this (0 = no size bound)");
    app.add_option("--runs", o.runs, "replicas per cell");
    app.add_option("--seed", o.seed, "master seed");
    app.add_option("--prop-mode", o.prop_mode, "propagation mode")->check(CLI::IsMember({"edge", "bernoulli"}));
    app.add_flag("--delete-old-edges", o.delete_old_edges, "thin old edges at every step");
    app.add_option("--epsilon", o.epsilon, "series truncation budget");
    app.add_flag("--paper-faithful", o.paper_faithful, "ratio CDF with the unconditional K*=0 term");
    app.add_option("--out", o.out, "output directory");
    app.add_option("--workers", o.workers, "worker threads (0 = all cores)");
    app.add_option("--replicas", o.replicas, "end-to-end replicas for compare");
    app.add_option("--snapshots", o.snapshots, "node counts at which run 0 exports graph snapshots")
        ->delimiter(',');

    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo sweep over the (tau, n0, s0) grid");
    auto* ana_cmd = app.add_subcommand("analytic", "exact distributions for one seeded capacity sequence");
    auto* cmp_cmd = app.add_subcommand("compare", "exact distributions against end-to-end simulation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    try {
        const auto config = base_config(o, t_star->count() > 0, max_nodes->count() > 0);
        if (sim_cmd->parsed()) {
            return simulate(o, config);
        }
        config.validate();
        if (ana_cmd->parsed()) {
            return analytic(o, config);
        }
        if (cmp_cmd->parsed()) {
            return compare(o, config);
        }
    } catch (const nrs::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
