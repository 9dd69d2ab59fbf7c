#include "sdergm/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sdergm/rng.hpp"

namespace sdergm {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void DgpSpec::validate() const {
    const auto k = theta0.size();
    if (theta1.size() != k || theta2.size() != k)
        throw std::invalid_argument("DgpSpec: theta0/theta1/theta2 lengths differ");
    if (static_cast<Eigen::Index>(varying.size()) != k)
        throw std::invalid_argument("DgpSpec: varying mask length mismatch");
    if (kind == DgpKind::Sine && phases.size() != k)
        throw std::invalid_argument("DgpSpec: Sine needs one phase per parameter");
    if (horizon < 1) throw std::invalid_argument("DgpSpec: horizon must be positive");
}

std::vector<bool> default_varying_mask(int k) {
    std::vector<bool> mask(k, false);
    for (int s = 1; s < k; s += 2) mask[s] = true;
    return mask;
}

Eigen::VectorXd random_phases(int k, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::VectorXd phases(k);
    for (int s = 0; s < k; ++s) phases[s] = rng.uniform() * kTwoPi;
    return phases;
}

BetaParams build_theta0_beta(int n, int d_min, int d_max) {
    if (d_min < 1 || d_min > d_max || d_max > n - 1)
        throw std::invalid_argument("build_theta0_beta: need 1 <= d_min <= d_max <= n-1");
    // degree targets, rounded to nearest (ties up)
    std::vector<int> target(n);
    for (int i = 0; i < n; ++i) {
        const double x = d_min + (d_max - d_min) * static_cast<double>(i) / (n - 1);
        target[i] = static_cast<int>(std::floor(x + 0.5));
    }
    std::vector<int> out_rem = target, in_rem = target;

    Adjacency y(n, true);
    // allocate links greedily, largest remaining out-degree first, each to
    // the targets with largest remaining in-degree; in-degree ties prefer
    // nodes that still owe out-links (keeps regular sequences realizable),
    // then the lowest index; leftovers dropped
    for (;;) {
        int v = -1;
        for (int i = 0; i < n; ++i)
            if (out_rem[i] > 0 && (v < 0 || out_rem[i] > out_rem[v])) v = i;
        if (v < 0) break;
        while (out_rem[v] > 0) {
            int u = -1;
            for (int j = 0; j < n; ++j) {
                if (j == v || in_rem[j] <= 0 || y.at(v, j)) continue;
                if (u < 0 || in_rem[j] > in_rem[u] ||
                    (in_rem[j] == in_rem[u] && out_rem[j] > out_rem[u]))
                    u = j;
            }
            if (u < 0) {
                out_rem[v] = 0;  // cannot allocate the rest of this node's links
                break;
            }
            y.set(v, u, true);
            --out_rem[v];
            --in_rem[u];
        }
    }

    try {
        return beta_mle(y);
    } catch (const std::exception& err) {
        throw std::runtime_error(std::string("build_theta0_beta: static fit failed (") +
                                 err.what() + "); try different d_min/d_max");
    }
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> build_bounds(const Eigen::VectorXd& theta0,
                                                         double c_lo, double c_hi) {
    const int k = static_cast<int>(theta0.size());
    if (k < 2) throw std::invalid_argument("build_bounds: need at least 2 parameters");
    Eigen::VectorXd theta1(k), theta2(k);
    for (int s = 0; s < k; ++s) {
        const double c = k == 1 ? c_lo : c_lo + (c_hi - c_lo) * static_cast<double>(s) / (k - 1);
        const double diff = s + 1 < k ? theta0[s + 1] - theta0[s] : theta0[s] - theta0[s - 1];
        theta1[s] = theta0[s] + c * diff;
        theta2[s] = theta0[s] - c * diff;
    }
    return {theta1, theta2};
}

DgpSpec make_beta_dgp(DgpKind kind, int n, int d_min, int d_max, int horizon,
                      std::uint64_t seed) {
    const BetaParams theta0 = build_theta0_beta(n, d_min, d_max);
    const auto [in1, in2] = build_bounds(theta0.theta_in);
    const auto [out1, out2] = build_bounds(theta0.theta_out);
    DgpSpec spec;
    spec.kind = kind;
    spec.theta0 = theta0.stacked();
    spec.theta1.resize(2 * n);
    spec.theta1 << in1, out1;
    spec.theta2.resize(2 * n);
    spec.theta2 << in2, out2;
    spec.varying = default_varying_mask(2 * n);
    spec.phases = random_phases(2 * n, split_seed(seed, 0xfa5e));
    spec.horizon = horizon;
    spec.seed = seed;
    return spec;
}

Eigen::MatrixXd generate_paths(const DgpSpec& spec) {
    spec.validate();
    const int k = static_cast<int>(spec.theta0.size());
    const int t_max = spec.horizon;
    Eigen::MatrixXd paths(t_max, k);
    for (int r = 0; r < t_max; ++r) paths.row(r) = spec.theta0;

    switch (spec.kind) {
        case DgpKind::Const:
            break;
        case DgpKind::Steps:
            for (int r = 0; r < t_max; ++r) {
                const int t = r + 1;
                for (int s = 0; s < k; ++s)
                    if (spec.varying[s])
                        paths(r, s) = 2 * t <= t_max ? spec.theta1[s] : spec.theta2[s];
            }
            break;
        case DgpKind::Sine:
            for (int r = 0; r < t_max; ++r) {
                const double t = r + 1;
                for (int s = 0; s < k; ++s)
                    if (spec.varying[s])
                        paths(r, s) =
                            spec.theta0[s] +
                            (spec.theta2[s] - spec.theta1[s]) *
                                std::sin(2.0 * kTwoPi * t / t_max + spec.phases[s]);
            }
            break;
        case DgpKind::Ar1: {
            Rng rng(split_seed(spec.seed, 0xa71));
            // row 0 starts at theta0; intercept keeps the unconditional mean there
            for (int r = 1; r < t_max; ++r)
                for (int s = 0; s < k; ++s)
                    if (spec.varying[s])
                        paths(r, s) = (1.0 - spec.ar_coeff) * spec.theta0[s] +
                                      spec.ar_coeff * paths(r - 1, s) +
                                      spec.ar_sigma * rng.normal();
            break;
        }
    }
    return paths;
}

namespace {

std::vector<std::string> make_node_names(int n) {
    int width = 1;
    for (int v = n - 1; v >= 10; v /= 10) ++width;
    std::vector<std::string> names;
    names.reserve(n);
    for (int i = 0; i < n; ++i) {
        std::string digits = std::to_string(i);
        names.push_back("n" + std::string(width - digits.size(), '0') + digits);
    }
    return names;
}

}  // namespace

TemporalNetwork simulate_networks(const SimulatorSpec& sim, const Eigen::MatrixXd& paths,
                                  std::uint64_t seed) {
    const int t_max = static_cast<int>(paths.rows());
    if (t_max < 1) throw std::invalid_argument("simulate_networks: empty path matrix");

    TemporalNetwork data;
    if (const auto* beta = std::get_if<BetaSimulator>(&sim)) {
        (void)beta;
        if (paths.cols() % 2 != 0)
            throw std::invalid_argument("simulate_networks: beta paths need an even column count");
        const int n = static_cast<int>(paths.cols()) / 2;
        for (int t = 0; t < t_max; ++t) {
            const BetaParams theta = BetaParams::from_stacked(paths.row(t));
            data.snapshots.push_back(sample_beta(theta, split_seed(seed, t)));
        }
        data.node_names = make_node_names(n);
    } else {
        const auto& ergm = std::get<ErgmSimulator>(sim);
        if (paths.cols() != ergm.spec.n_stats())
            throw std::invalid_argument("simulate_networks: path columns != statistic count");
        if (ergm.warm_start) {
            Rng rng(split_seed(seed, 0x3a9));
            Adjacency y(ergm.n_nodes, ergm.spec.directed);
            mcmc_sweeps(ergm.spec, paths.row(0), y, ergm.mcmc.burn_in_sweeps, rng);
            data.snapshots.push_back(y);
            for (int t = 1; t < t_max; ++t) {
                mcmc_sweeps(ergm.spec, paths.row(t), y, ergm.step_sweeps, rng);
                data.snapshots.push_back(y);
            }
        } else {
            for (int t = 0; t < t_max; ++t)
                data.snapshots.push_back(sample_mcmc(ergm.spec, paths.row(t), ergm.n_nodes, 1,
                                                     split_seed(seed, t), ergm.mcmc)
                                             .front());
        }
        data.node_names = make_node_names(ergm.n_nodes);
    }
    data.active.assign(t_max, std::vector<bool>(data.node_names.size(), true));
    data.times.resize(t_max);
    for (int t = 0; t < t_max; ++t) data.times[t] = t + 1;
    data.validate();
    return data;
}

TemporalNetwork simulate_sd_process(const SimulatorSpec& sim, const SdStaticParams& params,
                                    const Eigen::VectorXd& theta_init, int horizon,
                                    std::uint64_t seed, Eigen::MatrixXd* out_paths) {
    const int k = static_cast<int>(theta_init.size());
    params.validate(k);
    Eigen::MatrixXd paths(horizon, k);
    Eigen::VectorXd theta = theta_init;

    TemporalNetwork data;
    const bool is_beta = std::holds_alternative<BetaSimulator>(sim);
    const ErgmSimulator* ergm = std::get_if<ErgmSimulator>(&sim);
    const int n = is_beta ? k / 2 : ergm->n_nodes;

    for (int t = 0; t < horizon; ++t) {
        paths.row(t) = theta;
        Eigen::VectorXd score, fisher;
        if (is_beta) {
            const BetaParams bp = BetaParams::from_stacked(theta);
            data.snapshots.push_back(sample_beta(bp, split_seed(seed, t)));
            score = beta_score(data.snapshots.back(), bp);
            fisher = beta_fisher_diag(bp);
        } else {
            data.snapshots.push_back(
                sample_mcmc(ergm->spec, theta, n, 1, split_seed(seed, t), ergm->mcmc).front());
            score = pseudo_score(ergm->spec, data.snapshots.back(), theta);
            fisher = pseudo_fisher(ergm->spec, data.snapshots.back(), theta).diagonal();
        }
        theta = sd_update(theta, score.array() / fisher.array().max(kFisherFloor).sqrt(), params);
    }
    data.node_names = make_node_names(n);
    data.active.assign(horizon, std::vector<bool>(n, true));
    data.times.resize(horizon);
    for (int t = 0; t < horizon; ++t) data.times[t] = t + 1;
    data.validate();
    if (out_paths) *out_paths = paths;
    return data;
}

}  // namespace sdergm
