#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "nrspread/harness.hpp"

using namespace nrs;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("nrs_harness_" + name);
    fs::remove_all(dir);
    return dir;
}

} // namespace

TEST(Aggregate, SingleRunIsItsOwnAverage) {
    SimulationConfig config;
    config.max_nodes = 60;
    config.n0 = 4;
    config.runs = 1;
    const auto runs = run_replicas(config, 1);
    const auto curve = aggregate(runs);
    ASSERT_EQ(curve.points.size(), runs[0].rows.size());
    for (std::size_t k = 0; k < curve.points.size(); ++k) {
        EXPECT_EQ(curve.points[k].mean_ratio, runs[0].rows[k].ratio());
        EXPECT_EQ(curve.points[k].count, 1u);
        EXPECT_EQ(curve.points[k].std_error, 0.0);
    }
}

TEST(Aggregate, MeanRederivableFromRawCsv) {
    SimulationConfig config;
    config.tau = 2.5;
    config.max_nodes = 80;
    config.n0 = 10;
    config.s0 = 2;
    config.runs = 7;
    const auto runs = run_replicas(config, 2);
    std::ostringstream raw;
    write_trajectories_csv(raw, runs);

    std::istringstream in(raw.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "run_id,k,N_k,S_k,ratio");
    std::map<int, std::pair<double, int>> by_n;
    while (std::getline(in, line)) {
        int run, k, n, s;
        char c;
        std::istringstream row(line);
        row >> run >> c >> k >> c >> n >> c >> s;
        by_n[n].first += static_cast<double>(s) / n;
        by_n[n].second += 1;
    }
    const auto curve = aggregate(runs);
    for (const auto& p : curve.points) {
        const auto& [sum, count] = by_n.at(static_cast<int>(p.node_count));
        EXPECT_EQ(static_cast<std::uint32_t>(count), p.count);
        EXPECT_NEAR(sum / count, p.mean_ratio, 1e-12);
    }
}

TEST(Aggregate, RaggedClockBoundedRuns) {
    SimulationConfig config;
    config.max_nodes.reset();
    config.horizon = 5.0;
    config.runs = 30;
    const auto runs = run_replicas(config, 1);
    const auto curve = aggregate(runs);
    std::size_t longest = 0;
    for (const auto& r : runs) {
        longest = std::max(longest, r.rows.size());
    }
    EXPECT_EQ(curve.points.size(), longest);
    EXPECT_EQ(curve.points.front().count, 30u);
    EXPECT_LE(curve.points.back().count, 30u);
}

TEST(WriteCsv, SixDecimalRatios) {
    TrajectoryRecord r;
    r.run_id = 3;
    r.rows = {{0, 3, 1}, {1, 4, 2}};
    std::ostringstream out;
    write_trajectories_csv(out, std::span<const TrajectoryRecord>(&r, 1));
    EXPECT_EQ(out.str(), "run_id,k,N_k,S_k,ratio\n3,0,3,1,0.333333\n3,1,4,2,0.500000\n");
}

TEST(RunReplicas, IndependentOfWorkerCount) {
    SimulationConfig config;
    config.tau = 1.5;
    config.max_nodes = 300;
    config.runs = 9;
    config.propagation = PropagationMode::edge_exact;
    const auto a = run_replicas(config, 1);
    const auto b = run_replicas(config, 4);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t r = 0; r < a.size(); ++r) {
        ASSERT_EQ(a[r].run_id, r);
        ASSERT_EQ(a[r].rows.size(), b[r].rows.size());
        for (std::size_t k = 0; k < a[r].rows.size(); ++k) {
            ASSERT_EQ(a[r].rows[k].spread_count, b[r].rows[k].spread_count);
        }
    }
}

TEST(RunSweep, DeterministicFilesAndSkippedCells) {
    SimulationConfig base;
    base.max_nodes = 120;
    base.runs = 4;
    const SweepGrid grid{{1.5, 3.5}, {5}, {1, 8}};
    const auto dir_a = scratch("a");
    const auto dir_b = scratch("b");
    const auto ra = run_sweep(grid, base, dir_a, 1);
    const auto rb = run_sweep(grid, base, dir_b, 3);
    ASSERT_EQ(ra.cells.size(), 4u);
    EXPECT_EQ(ra.exit_code(), 2);
    int ok = 0;
    for (const auto& cell : ra.cells) {
        if (cell.s0 == 8) {
            EXPECT_EQ(cell.status, CellStatus::config_error);
            EXPECT_FALSE(fs::exists(dir_a / fmt::format("aggregate_{}.csv", cell_tag(cell.tau, cell.n0, cell.s0))));
            continue;
        }
        ++ok;
        EXPECT_EQ(cell.status, CellStatus::ok);
        for (const char* kind : {"trajectories", "aggregate"}) {
            const std::string name = fmt::format("{}_{}.csv", kind, cell_tag(cell.tau, cell.n0, cell.s0));
            ASSERT_TRUE(fs::exists(dir_a / name)) << name;
            EXPECT_EQ(slurp(dir_a / name), slurp(dir_b / name)) << name;
        }
    }
    EXPECT_EQ(ok, 2);
}

TEST(RunSweep, SnapshotsForEdgeExactRuns) {
    SimulationConfig base;
    base.max_nodes = 30;
    base.runs = 2;
    base.propagation = PropagationMode::edge_exact;
    base.snapshot_sizes = {3, 20};
    const auto dir = scratch("snap");
    const auto result = run_sweep({{2.5}, {1}, {1}}, base, dir, 1);
    ASSERT_EQ(result.exit_code(), 0);
    const auto nodes = slurp(dir / "snapshot_2.5_1_1_N3_nodes.csv");
    EXPECT_EQ(nodes.rfind("i,capacity,has_message\n0,", 0), 0u);
    EXPECT_EQ(std::count(nodes.begin(), nodes.end(), '\n'), 4);
    EXPECT_TRUE(fs::exists(dir / "snapshot_2.5_1_1_N20_edges.csv"));
    EXPECT_FALSE(fs::exists(dir / "snapshot_2.5_1_1_N30_edges.csv"));

    base.propagation = PropagationMode::bernoulli;
    EXPECT_THROW(base.validate(), std::invalid_argument);
}

TEST(CellTag, Formatting) {
    EXPECT_EQ(cell_tag(1.5, 10, 1), "1.5_10_1");
    EXPECT_EQ(cell_tag(3.0, 100, 10), "3_100_10");
    const auto g = reference_grid();
    EXPECT_EQ(g.taus.size() * g.n0s.size() * g.s0s.size(), 9u * 3u);
}

TEST(SimulationConfig, Validation) {
    SimulationConfig c;
    EXPECT_NO_THROW(c.validate());
    c.tau = 1.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.max_nodes.reset();
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.horizon = 2.0;
    EXPECT_NO_THROW(c.validate());
    c = {};
    c.n0 = 10;
    c.max_nodes = 5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.runs = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.epsilon = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Compare, ZeroHorizonPutsAllMassOnStart) {
    SimulationConfig config;
    config.horizon = 0.0;
    config.n0 = 4;
    config.s0 = 2;
    const auto report = compare_analytic_empirical(config, 500);
    EXPECT_EQ(report.k_max, 0u);
    EXPECT_DOUBLE_EQ(report.node_count_empirical.at(4), 1.0);
    EXPECT_DOUBLE_EQ(report.node_count_exact.at(4), 1.0);
    EXPECT_DOUBLE_EQ(report.pinned_empirical.at(2), 1.0);
    EXPECT_DOUBLE_EQ(report.pinned_exact.at(2), 1.0);
    EXPECT_DOUBLE_EQ(report.path_empirical.at(2), 1.0);
    EXPECT_EQ(report.node_count_tv, 0.0);
    EXPECT_EQ(report.pinned_tv, 0.0);
}

TEST(Compare, SmallRunReport) {
    SimulationConfig config;
    config.horizon = 3.0;
    const auto report = compare_analytic_empirical(config, 20000);
    EXPECT_LT(report.node_count_tv, 0.03);
    EXPECT_LT(report.pinned_tv, 0.03);
    EXPECT_LT(report.pinned_deficit, 1e-10);
    std::ostringstream out;
    report.write(out);
    EXPECT_NE(out.str().find("node_count_tv="), std::string::npos);
    EXPECT_NE(out.str().find("path_mixture_tv="), std::string::npos);
}

TEST(Analytic, WritesDistributionFiles) {
    SimulationConfig config;
    config.horizon = 2.0;
    const auto dir = scratch("analytic");
    run_analytic(config, dir);
    for (const char* name : {"dist_node_count.csv", "dist_spread_pinned.csv", "dist_spread_path.csv",
                             "dist_non_propagation.csv", "dist_ratio_cdf.csv"}) {
        ASSERT_TRUE(fs::exists(dir / name)) << name;
    }
    const auto text = slurp(dir / "dist_spread_pinned.csv");
    EXPECT_EQ(text.rfind("# quantity=spread_horizon_pinned", 0), 0u);
    EXPECT_NE(text.find("\ni,prob\n1,"), std::string::npos);
    EXPECT_NE(text.find("# truncation_deficit="), std::string::npos);
}
