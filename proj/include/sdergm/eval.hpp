#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "sdergm/dgp.hpp"
#include "sdergm/sd_filter.hpp"

namespace sdergm {

// (1/T) * sqrt(sum_t e_t^2): the scale used by the reference tables. Note
// the 1/T sits outside the root, so this is the conventional RMSE / sqrt(T).
double rmse(const Eigen::VectorXd& path_true, const Eigen::VectorXd& path_est);
double rmse_conventional(const Eigen::VectorXd& path_true, const Eigen::VectorXd& path_est);

struct RocResult {
    std::vector<std::pair<double, double>> points;  // (false positive rate, true positive rate)
    double auc = 0.0;
};

// Rank (Mann-Whitney) AUC with tied scores averaged; throws if labels are
// all positive or all negative.
RocResult roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Dyads with at least one observed link anywhere in the series; the
// complement (always-zero dyads) is excluded from forecast evaluation.
std::vector<std::pair<int, int>> ever_present_dyads(const TemporalNetwork& data);

TemporalNetwork slice(const TemporalNetwork& data, int t0, int t1);

// Default two-statistic study configuration: undirected edges+gwesp(0.5)
// at moderate density, with excursions small enough to stay clear of
// degenerate regions.
DgpSpec make_edges_gwesp_dgp(DgpKind kind, int horizon, std::uint64_t seed,
                             bool vary_edges = true, bool vary_gwesp = true);
ErgmSimulator make_edges_gwesp_simulator(int n_nodes);

// ---------------------------------------------------------------------------

struct ExperimentOptions {
    Pooling pooling = Pooling::PooledByDirection;
    bool targeting = true;
    int threads = 1;
    // beta cross-sectional fits: replace boundary degrees by a half-link
    // margin so snapshots with isolated or saturated nodes stay usable
    bool clamp_boundary = true;
};

// Filtering accuracy of the score-driven fit against per-snapshot
// cross-sectional fits and the full-sample static fit, on data simulated
// from a known parameter path. RMSEs use the table scale (see rmse).
struct FilterExperimentReport {
    std::string dgp;
    int replicas = 0;
    std::uint64_t seed = 0;
    int horizon = 0;
    std::vector<bool> varying;

    // averaged over replicas and over the varying parameters (all
    // parameters when nothing varies)
    double sd_rmse = 0.0, cross_rmse = 0.0, static_rmse = 0.0;
    double sd_rmse_conv = 0.0, cross_rmse_conv = 0.0, static_rmse_conv = 0.0;
    Eigen::VectorXd sd_rmse_by_param, cross_rmse_by_param, static_rmse_by_param;
    std::vector<double> sd_per_replica, cross_per_replica, static_per_replica;
};

FilterExperimentReport run_filter_experiment(const DgpSpec& dgp, const SimulatorSpec& sim,
                                             const ExperimentOptions& options, int replicas,
                                             std::uint64_t seed);

// Per-parameter rejection rates of the time-variation test on simulated data.
struct LmExperimentReport {
    int replicas = 0;
    std::uint64_t seed = 0;
    double level = 0.05;
    Eigen::VectorXd rejection_rate;               // per parameter
    std::vector<std::vector<double>> p_values;    // [parameter][replica]
};

LmExperimentReport run_lm_experiment(const DgpSpec& dgp, const SimulatorSpec& sim, double level,
                                     const ExperimentOptions& options, int replicas,
                                     std::uint64_t seed);

// Rolling-window link forecast comparison on a temporal network (beta
// model): score-driven forecast vs the previous-parameter cross-sectional
// forecast vs an AR(1) model on the cross-sectional estimates.
struct ForecastExperimentReport {
    int window = 0;
    int max_horizon = 0;
    int n_sims = 0;
    std::uint64_t seed = 0;
    int n_rolls = 0;
    int scored_dyads = 0;                      // dyads kept by the always-zero mask
    std::vector<double> sd_auc, naive_auc, ar1_auc;  // per horizon
};

ForecastExperimentReport run_forecast_experiment(const TemporalNetwork& data, int window,
                                                 int max_horizon, int n_sims,
                                                 const ExperimentOptions& options,
                                                 std::uint64_t seed);

// Sine-DGP filtering accuracy across network sizes, in the fixed-degree
// (sparse) or proportional-degree (dense) regime.
struct SparseDenseReport {
    bool dense = false;
    int replicas = 0;
    std::uint64_t seed = 0;
    int horizon = 0;
    std::vector<int> n_values;
    std::vector<double> sd_rmse, cross_rmse, density;  // per network size
};

SparseDenseReport run_sparse_dense_experiment(const std::vector<int>& n_list, bool dense,
                                              int horizon, const ExperimentOptions& options,
                                              int replicas, std::uint64_t seed);

}  // namespace sdergm
