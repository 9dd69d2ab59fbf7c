#include "sdergm/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "sdergm/rng.hpp"

namespace sdergm {

double rmse(const Eigen::VectorXd& path_true, const Eigen::VectorXd& path_est) {
    if (path_true.size() != path_est.size())
        throw std::invalid_argument("rmse: length mismatch");
    const double t = static_cast<double>(path_true.size());
    return std::sqrt((path_true - path_est).squaredNorm()) / t;
}

double rmse_conventional(const Eigen::VectorXd& path_true, const Eigen::VectorXd& path_est) {
    if (path_true.size() != path_est.size())
        throw std::invalid_argument("rmse: length mismatch");
    const double t = static_cast<double>(path_true.size());
    return std::sqrt((path_true - path_est).squaredNorm() / t);
}

RocResult roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("roc_auc: length mismatch");
    const std::size_t n = scores.size();
    long long n_pos = 0;
    for (int l : labels) n_pos += l ? 1 : 0;
    const long long n_neg = static_cast<long long>(n) - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw std::runtime_error("roc_auc: AUC undefined, labels are all equal after masking");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Mann-Whitney: sum of positive ranks, ties get the average rank
    double rank_sum_pos = 0.0;
    std::size_t a = 0;
    while (a < n) {
        std::size_t b = a;
        while (b + 1 < n && scores[idx[b + 1]] == scores[idx[a]]) ++b;
        const double avg_rank = 0.5 * static_cast<double>(a + b) + 1.0;  // ranks are 1-based
        for (std::size_t k = a; k <= b; ++k)
            if (labels[idx[k]]) rank_sum_pos += avg_rank;
        a = b + 1;
    }
    RocResult result;
    result.auc = (rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (n_pos + 1)) /
                 (static_cast<double>(n_pos) * static_cast<double>(n_neg));

    // ROC points by sweeping thresholds from high to low
    result.points.emplace_back(0.0, 0.0);
    long long tp = 0, fp = 0;
    std::size_t k = n;
    while (k > 0) {
        std::size_t b = k;
        const double s = scores[idx[k - 1]];
        while (k > 0 && scores[idx[k - 1]] == s) {
            if (labels[idx[k - 1]])
                ++tp;
            else
                ++fp;
            --k;
        }
        (void)b;
        result.points.emplace_back(static_cast<double>(fp) / n_neg,
                                   static_cast<double>(tp) / n_pos);
    }
    return result;
}

std::vector<std::pair<int, int>> ever_present_dyads(const TemporalNetwork& data) {
    const int n = data.n_nodes();
    std::vector<std::pair<int, int>> dyads;
    const bool directed = data.directed();
    for (int i = 0; i < n; ++i)
        for (int j = directed ? 0 : i + 1; j < n; ++j) {
            if (i == j) continue;
            for (const auto& y : data.snapshots)
                if (y.at(i, j)) {
                    dyads.emplace_back(i, j);
                    break;
                }
        }
    return dyads;
}

TemporalNetwork slice(const TemporalNetwork& data, int t0, int t1) {
    if (t0 < 0 || t1 > data.n_snapshots() || t0 >= t1)
        throw std::invalid_argument("slice: bad range");
    TemporalNetwork out;
    out.node_names = data.node_names;
    out.snapshots.assign(data.snapshots.begin() + t0, data.snapshots.begin() + t1);
    out.active.assign(data.active.begin() + t0, data.active.begin() + t1);
    out.times.assign(data.times.begin() + t0, data.times.begin() + t1);
    return out;
}

DgpSpec make_edges_gwesp_dgp(DgpKind kind, int horizon, std::uint64_t seed, bool vary_edges,
                             bool vary_gwesp) {
    DgpSpec spec;
    spec.kind = kind;
    spec.theta0 = Eigen::Vector2d(-2.5, 0.4);
    const Eigen::Vector2d half_amp(0.25, 0.125);
    spec.theta1 = spec.theta0 - half_amp;
    spec.theta2 = spec.theta0 + half_amp;
    spec.varying = {vary_edges, vary_gwesp};
    spec.phases = random_phases(2, split_seed(seed, 0xfa5e));
    spec.horizon = horizon;
    spec.seed = seed;
    return spec;
}

ErgmSimulator make_edges_gwesp_simulator(int n_nodes) {
    ErgmSimulator sim;
    sim.spec = ErgmSpec({EdgesStat{}, GwespStat{0.5}}, /*directed=*/false);
    sim.n_nodes = n_nodes;
    return sim;
}

// ---------------------------------------------------------------------------

namespace {

// Runs work(0..count-1), possibly across threads; the first exception is
// rethrown with the replica index attached. Output ordering is up to the
// caller (index-addressed buffers), so scheduling does not matter.
template <typename Work>
void run_indexed(int count, int threads, Work&& work) {
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) {
            try {
                work(i);
            } catch (const std::exception& err) {
                throw std::runtime_error("replica " + std::to_string(i) + ": " + err.what());
            }
        }
        return;
    }
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::string first_error;
    std::vector<std::thread> pool;
    const int n_workers = std::min(threads, count);
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    work(i);
                } catch (const std::exception& err) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (first_error.empty())
                        first_error = "replica " + std::to_string(i) + ": " + err.what();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (!first_error.empty()) throw std::runtime_error(first_error);
}

Eigen::VectorXd identify_if_beta(bool is_beta, const Eigen::VectorXd& v) {
    if (!is_beta) return v;
    return identify(BetaParams::from_stacked(v)).stacked();
}

BetaFitConfig experiment_fit_config(const ExperimentOptions& options) {
    BetaFitConfig fit;
    fit.clamp_boundary = options.clamp_boundary;
    fit.max_iter = 20000;  // dense or clamped snapshots need the longer tail
    return fit;
}

// per-parameter table-scale RMSE between two T x K path matrices
Eigen::VectorXd rmse_by_param(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& est) {
    Eigen::VectorXd out(truth.cols());
    for (int s = 0; s < truth.cols(); ++s) out[s] = rmse(truth.col(s), est.col(s));
    return out;
}

double masked_mean(const Eigen::VectorXd& values, const std::vector<bool>& varying) {
    double sum = 0.0;
    int count = 0;
    for (int s = 0; s < values.size(); ++s)
        if (varying[s]) {
            sum += values[s];
            ++count;
        }
    if (count == 0) return values.mean();  // constant DGP: average over everything
    return sum / count;
}

struct ReplicaPaths {
    Eigen::MatrixXd truth;   // identified where applicable
    Eigen::MatrixXd sd;
    Eigen::MatrixXd cross;
    Eigen::MatrixXd station; // full-sample static fit, constant over time
};

// Simulate one replica, run the three estimators, return aligned paths.
ReplicaPaths replica_paths(const DgpSpec& dgp, const SimulatorSpec& sim,
                           const ExperimentOptions& options, std::uint64_t rep_seed) {
    DgpSpec local = dgp;
    local.seed = split_seed(rep_seed, 1);
    if (local.kind == DgpKind::Sine)
        local.phases = random_phases(static_cast<int>(local.theta0.size()),
                                     split_seed(rep_seed, 2));
    const Eigen::MatrixXd paths = generate_paths(local);
    const TemporalNetwork data = simulate_networks(sim, paths, split_seed(rep_seed, 3));

    const bool is_beta = std::holds_alternative<BetaSimulator>(sim);
    const int t_max = static_cast<int>(paths.rows());
    const int k = static_cast<int>(paths.cols());

    ReplicaPaths out;
    out.truth.resize(t_max, k);
    for (int t = 0; t < t_max; ++t) out.truth.row(t) = identify_if_beta(is_beta, paths.row(t));

    std::unique_ptr<ModelBackend> backend;
    if (is_beta) {
        backend = std::make_unique<BetaBackend>(data, experiment_fit_config(options));
    } else {
        const auto& es = std::get<ErgmSimulator>(sim);
        backend = std::make_unique<ErgmBackend>(es.spec, data, es.mcmc);
    }

    EstimateConfig config;
    config.targeting = options.targeting;
    config.pooling = is_beta ? options.pooling : Pooling::PerParameter;
    const EstimateResult est = estimate_static(*backend, config);
    out.sd.resize(t_max, k);
    for (int t = 0; t < t_max; ++t)
        out.sd.row(t) = identify_if_beta(is_beta, est.path.theta.row(t));

    out.cross.resize(t_max, k);
    for (int t = 0; t < t_max; ++t) {
        if (is_beta) {
            out.cross.row(t) = beta_mle(data.snapshots[t], experiment_fit_config(options)).stacked();
        } else {
            const auto& es = std::get<ErgmSimulator>(sim);
            out.cross.row(t) = mple_fit(es.spec, data.snapshots[t]);
        }
    }

    const Eigen::VectorXd station = identify_if_beta(is_beta, est.theta_static);
    out.station.resize(t_max, k);
    for (int t = 0; t < t_max; ++t) out.station.row(t) = station;
    return out;
}

}  // namespace

FilterExperimentReport run_filter_experiment(const DgpSpec& dgp, const SimulatorSpec& sim,
                                             const ExperimentOptions& options, int replicas,
                                             std::uint64_t seed) {
    if (replicas < 1) throw std::invalid_argument("run_filter_experiment: replicas must be >= 1");
    const int k = static_cast<int>(dgp.theta0.size());

    std::vector<Eigen::VectorXd> sd_param(replicas), cross_param(replicas), static_param(replicas);
    std::vector<Eigen::VectorXd> sd_conv(replicas), cross_conv(replicas), static_conv(replicas);
    run_indexed(replicas, options.threads, [&](int r) {
        const ReplicaPaths p = replica_paths(dgp, sim, options, split_seed(seed, r));
        sd_param[r] = rmse_by_param(p.truth, p.sd);
        cross_param[r] = rmse_by_param(p.truth, p.cross);
        static_param[r] = rmse_by_param(p.truth, p.station);
        Eigen::VectorXd sdc(k), crc(k), stc(k);
        for (int s = 0; s < k; ++s) {
            sdc[s] = rmse_conventional(p.truth.col(s), p.sd.col(s));
            crc[s] = rmse_conventional(p.truth.col(s), p.cross.col(s));
            stc[s] = rmse_conventional(p.truth.col(s), p.station.col(s));
        }
        sd_conv[r] = sdc;
        cross_conv[r] = crc;
        static_conv[r] = stc;
    });

    FilterExperimentReport report;
    switch (dgp.kind) {
        case DgpKind::Const: report.dgp = "const"; break;
        case DgpKind::Steps: report.dgp = "steps"; break;
        case DgpKind::Sine: report.dgp = "sine"; break;
        case DgpKind::Ar1: report.dgp = "ar1"; break;
    }
    report.replicas = replicas;
    report.seed = seed;
    report.horizon = dgp.horizon;
    report.varying = dgp.varying;
    report.sd_rmse_by_param = Eigen::VectorXd::Zero(k);
    report.cross_rmse_by_param = Eigen::VectorXd::Zero(k);
    report.static_rmse_by_param = Eigen::VectorXd::Zero(k);
    for (int r = 0; r < replicas; ++r) {
        report.sd_rmse_by_param += sd_param[r] / replicas;
        report.cross_rmse_by_param += cross_param[r] / replicas;
        report.static_rmse_by_param += static_param[r] / replicas;
        report.sd_per_replica.push_back(masked_mean(sd_param[r], dgp.varying));
        report.cross_per_replica.push_back(masked_mean(cross_param[r], dgp.varying));
        report.static_per_replica.push_back(masked_mean(static_param[r], dgp.varying));
        report.sd_rmse_conv += masked_mean(sd_conv[r], dgp.varying) / replicas;
        report.cross_rmse_conv += masked_mean(cross_conv[r], dgp.varying) / replicas;
        report.static_rmse_conv += masked_mean(static_conv[r], dgp.varying) / replicas;
    }
    report.sd_rmse = masked_mean(report.sd_rmse_by_param, dgp.varying);
    report.cross_rmse = masked_mean(report.cross_rmse_by_param, dgp.varying);
    report.static_rmse = masked_mean(report.static_rmse_by_param, dgp.varying);
    return report;
}

LmExperimentReport run_lm_experiment(const DgpSpec& dgp, const SimulatorSpec& sim, double level,
                                     const ExperimentOptions& options, int replicas,
                                     std::uint64_t seed) {
    if (replicas < 1) throw std::invalid_argument("run_lm_experiment: replicas must be >= 1");
    const int k = static_cast<int>(dgp.theta0.size());
    const bool is_beta = std::holds_alternative<BetaSimulator>(sim);

    std::vector<std::vector<double>> pvals(k, std::vector<double>(replicas, 1.0));
    run_indexed(replicas, options.threads, [&](int r) {
        const std::uint64_t rep_seed = split_seed(seed, r);
        DgpSpec local = dgp;
        local.seed = split_seed(rep_seed, 1);
        if (local.kind == DgpKind::Sine)
            local.phases = random_phases(k, split_seed(rep_seed, 2));
        const Eigen::MatrixXd paths = generate_paths(local);
        const TemporalNetwork data = simulate_networks(sim, paths, split_seed(rep_seed, 3));

        std::unique_ptr<ModelBackend> backend;
        if (is_beta) {
            backend = std::make_unique<BetaBackend>(data, experiment_fit_config(options));
        } else {
            const auto& es = std::get<ErgmSimulator>(sim);
            backend = std::make_unique<ErgmBackend>(es.spec, data, es.mcmc);
        }
        const Eigen::VectorXd theta_static = backend->static_fit();
        for (int s = 0; s < k; ++s)
            pvals[s][r] = lm_test_at(*backend, theta_static, s).p_value;
    });

    LmExperimentReport report;
    report.replicas = replicas;
    report.seed = seed;
    report.level = level;
    report.p_values = pvals;
    report.rejection_rate = Eigen::VectorXd::Zero(k);
    for (int s = 0; s < k; ++s) {
        int rejections = 0;
        for (double p : pvals[s])
            if (p < level) ++rejections;
        report.rejection_rate[s] = static_cast<double>(rejections) / replicas;
    }
    return report;
}

// ---------------------------------------------------------------------------

namespace {

struct Ar1Coefs {
    double c0 = 0.0, c1 = 0.0;
};

// OLS of x_t on (1, x_{t-1})
Ar1Coefs fit_ar1(const Eigen::VectorXd& series) {
    const int t = static_cast<int>(series.size());
    const Eigen::VectorXd x = series.head(t - 1);
    const Eigen::VectorXd y = series.tail(t - 1);
    const double mx = x.mean(), my = y.mean();
    const double varx = (x.array() - mx).square().sum();
    Ar1Coefs out;
    if (varx < 1e-14) {
        out.c0 = my;  // constant series: forecast its mean
        out.c1 = 0.0;
        return out;
    }
    out.c1 = ((x.array() - mx) * (y.array() - my)).sum() / varx;
    out.c0 = my - out.c1 * mx;
    return out;
}

}  // namespace

ForecastExperimentReport run_forecast_experiment(const TemporalNetwork& data, int window,
                                                 int max_horizon, int n_sims,
                                                 const ExperimentOptions& options,
                                                 std::uint64_t seed) {
    const int t_max = data.n_snapshots();
    if (t_max <= window + max_horizon)
        throw std::invalid_argument("run_forecast_experiment: series shorter than window+horizon");
    if (!data.directed())
        throw std::invalid_argument("run_forecast_experiment: needs a directed network");

    const auto dyads = ever_present_dyads(data);
    if (dyads.empty()) throw std::runtime_error("run_forecast_experiment: no links in the data");

    // cross-sectional fits reused by the naive and AR(1) benchmarks
    const BetaFitConfig fit = experiment_fit_config(options);
    const int n = data.n_nodes();
    Eigen::MatrixXd cross(t_max, 2 * n);
    for (int t = 0; t < t_max; ++t) cross.row(t) = beta_mle(data.snapshots[t], fit).stacked();

    const int n_rolls = t_max - window - max_horizon + 1;
    // predictions pooled over rolls: [method][horizon] -> scores
    std::vector<std::vector<std::vector<double>>> scores(
        3, std::vector<std::vector<double>>(max_horizon));
    std::vector<std::vector<std::vector<int>>> labels(
        3, std::vector<std::vector<int>>(max_horizon));
    for (int m = 0; m < 3; ++m)
        for (int h = 0; h < max_horizon; ++h) {
            scores[m][h].reserve(static_cast<std::size_t>(n_rolls) * dyads.size());
            labels[m][h].reserve(static_cast<std::size_t>(n_rolls) * dyads.size());
        }

    std::vector<std::vector<Eigen::MatrixXd>> sd_probs(n_rolls);
    run_indexed(n_rolls, options.threads, [&](int roll) {
        const BetaBackend backend(slice(data, roll, roll + window), fit);
        EstimateConfig config;
        config.targeting = options.targeting;
        config.pooling = options.pooling;
        const EstimateResult est = estimate_static(backend, config);
        sd_probs[roll] = forecast(backend, est.params, est.path.theta.row(window - 1),
                                  max_horizon, n_sims, split_seed(seed, roll));
    });

    for (int roll = 0; roll < n_rolls; ++roll) {
        const int t_last = roll + window - 1;

        // AR(1) per parameter on this window's cross-sectional series
        const int k = 2 * n;
        std::vector<Ar1Coefs> ar(k);
        for (int s = 0; s < k; ++s) ar[s] = fit_ar1(cross.col(s).segment(roll, window));

        const Eigen::MatrixXd naive_probs =
            link_prob_matrix(BetaParams::from_stacked(cross.row(t_last)));
        Eigen::VectorXd ar_theta = cross.row(t_last);
        for (int h = 1; h <= max_horizon; ++h) {
            for (int s = 0; s < k; ++s) ar_theta[s] = ar[s].c0 + ar[s].c1 * ar_theta[s];
            const Eigen::MatrixXd ar_probs =
                link_prob_matrix(BetaParams::from_stacked(ar_theta));
            const Adjacency& actual = data.snapshots[t_last + h];
            const Eigen::MatrixXd& sd_mat = sd_probs[roll][h - 1];
            for (const auto& [i, j] : dyads) {
                const int label = actual.at(i, j) ? 1 : 0;
                scores[0][h - 1].push_back(sd_mat(i, j));
                labels[0][h - 1].push_back(label);
                scores[1][h - 1].push_back(naive_probs(i, j));
                labels[1][h - 1].push_back(label);
                scores[2][h - 1].push_back(ar_probs(i, j));
                labels[2][h - 1].push_back(label);
            }
        }
    }

    ForecastExperimentReport report;
    report.window = window;
    report.max_horizon = max_horizon;
    report.n_sims = n_sims;
    report.seed = seed;
    report.n_rolls = n_rolls;
    report.scored_dyads = static_cast<int>(dyads.size());
    for (int h = 0; h < max_horizon; ++h) {
        report.sd_auc.push_back(roc_auc(scores[0][h], labels[0][h]).auc);
        report.naive_auc.push_back(roc_auc(scores[1][h], labels[1][h]).auc);
        report.ar1_auc.push_back(roc_auc(scores[2][h], labels[2][h]).auc);
    }
    return report;
}

SparseDenseReport run_sparse_dense_experiment(const std::vector<int>& n_list, bool dense,
                                              int horizon, const ExperimentOptions& options,
                                              int replicas, std::uint64_t seed) {
    SparseDenseReport report;
    report.dense = dense;
    report.replicas = replicas;
    report.seed = seed;
    report.horizon = horizon;
    for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
        const int n = n_list[idx];
        if (n < 20) throw std::invalid_argument("run_sparse_dense_experiment: need n >= 20");
        const int d_min = 10;
        const int d_max = dense ? static_cast<int>(std::lround(0.8 * n))
                                : std::min(40, n - 2);
        const DgpSpec dgp =
            make_beta_dgp(DgpKind::Sine, n, d_min, d_max, horizon, split_seed(seed, idx));
        const FilterExperimentReport r = run_filter_experiment(
            dgp, BetaSimulator{}, options, replicas, split_seed(seed, 1000 + idx));
        report.n_values.push_back(n);
        report.sd_rmse.push_back(r.sd_rmse);
        report.cross_rmse.push_back(r.cross_rmse);

        // average density of the simulated data, recomputed from one replica
        const std::uint64_t rep_seed = split_seed(split_seed(seed, 1000 + idx), 0);
        DgpSpec local = dgp;
        local.seed = split_seed(rep_seed, 1);
        local.phases = random_phases(2 * n, split_seed(rep_seed, 2));
        const TemporalNetwork sample =
            simulate_networks(BetaSimulator{}, generate_paths(local), split_seed(rep_seed, 3));
        double dens = 0.0;
        for (const auto& y : sample.snapshots)
            dens += static_cast<double>(edge_count(y)) / (static_cast<double>(n) * (n - 1));
        report.density.push_back(dens / sample.n_snapshots());
    }
    return report;
}

}  // namespace sdergm
