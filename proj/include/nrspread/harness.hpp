#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nrspread/analytics.hpp"
#include "nrspread/config.hpp"
#include "nrspread/spreading.hpp"

namespace nrs {

/// Mean ratio #S_k / N_k across runs at one aligned step.
struct AggregatePoint {
    std::uint64_t k;
    std::uint32_t node_count;
    double mean_ratio;
    std::uint32_t count;
    double std_error;
};

struct AggregateCurve {
    std::vector<AggregatePoint> points;

    /// Mean ratio at the first point with N_k >= node_count (the last point
    /// if none). Throws std::out_of_range on an empty curve.
    double mean_at_nodes(std::uint32_t node_count) const;
};

/// Average runs step by step. Runs may differ in length (clock-bounded
/// runs); each point averages the runs that reached it.
AggregateCurve aggregate(std::span<const TrajectoryRecord> runs);

/// "run_id,k,N_k,S_k,ratio" rows, ratio with 6 decimals.
void write_trajectories_csv(std::ostream& out, std::span<const TrajectoryRecord> runs);
/// "k,N_k,mean_ratio,count,std_error" rows.
void write_aggregate_csv(std::ostream& out, const AggregateCurve& curve);

/// Runs `config.runs` independent replicas on up to `workers` threads
/// (0 = hardware concurrency). Replica r always uses the streams derived
/// from (config.seed, r), so results do not depend on scheduling. The first
/// failing replica's exception is rethrown.
std::vector<TrajectoryRecord> run_replicas(const SimulationConfig& config, unsigned workers = 0);

struct SweepGrid {
    std::vector<double> taus{2.5};
    std::vector<std::uint32_t> n0s{1};
    std::vector<std::uint32_t> s0s{1};
};

/// tau in {1.5, 2.5, 3.5}, n0 in {10, 50, 100}, s0 in {1, 5, 10}.
SweepGrid reference_grid();

enum class CellStatus { ok, config_error, numerical_error };

struct CellResult {
    double tau;
    std::uint32_t n0;
    std::uint32_t s0;
    CellStatus status = CellStatus::ok;
    std::string message;
    AggregateCurve curve;
};

struct SweepResult {
    std::vector<CellResult> cells;

    /// 0 when every cell succeeded, 2 if any cell had a config error,
    /// otherwise 3 for numerical failures.
    int exit_code() const;
};

/// "<tau>_<n0>_<s0>" as used in output file names, e.g. "1.5_10_1".
std::string cell_tag(double tau, std::uint32_t n0, std::uint32_t s0);

/// Runs every (tau, n0, s0) cell of the grid with the remaining settings
/// taken from `base`, writing trajectories_<tag>.csv and aggregate_<tag>.csv
/// to `out_dir`. Invalid cells are reported and skipped.
SweepResult run_sweep(const SweepGrid& grid, const SimulationConfig& base,
                      const std::filesystem::path& out_dir, unsigned workers = 0);

/// Analytic-versus-simulation diagnostics on a fixed seeded capacity sequence.
struct CompareReport {
    double mean_steps = 0.0;
    std::uint64_t replicas = 0;
    std::uint64_t k_max = 0;
    /// Empirical N_{K*} against the shifted Poisson law.
    double node_count_tv = 0.0;
    /// Pinned history (message never leaves node 0 for the purpose of p_k):
    /// Bernoulli-chain simulation against the exact mixture.
    double pinned_tv = 0.0;
    double pinned_deficit = 0.0;
    double pinned_ratio_cdf_half = 0.0;
    double pinned_ratio_empirical_half = 0.0;
    double pinned_ratio_std_error = 0.0;
    /// Full model: empirical #S_{K*} against the average of per-path exact
    /// mixtures over frozen traces. Diagnostic only; the frozen-path mixture
    /// is not the exact law of the history-dependent process.
    double path_tv = 0.0;
    DiscreteDistribution node_count_empirical;
    DiscreteDistribution node_count_exact;
    DiscreteDistribution pinned_empirical;
    DiscreteDistribution pinned_exact;
    DiscreteDistribution path_empirical;
    DiscreteDistribution path_mixture;

    void write(std::ostream& out) const;
};

/// Uses config.horizon (default 3 when unset), config.rate, tau, n0, s0,
/// propagation mode and epsilon. `replicas` end-to-end runs per scenario.
CompareReport compare_analytic_empirical(const SimulationConfig& config, std::uint64_t replicas = 100000);

/// Writes the exact distributions for one seeded capacity sequence:
/// dist_node_count.csv, dist_spread_pinned.csv, dist_spread_path.csv,
/// dist_non_propagation.csv and dist_ratio_cdf.csv.
void run_analytic(const SimulationConfig& config, const std::filesystem::path& out_dir);

} // namespace nrs
