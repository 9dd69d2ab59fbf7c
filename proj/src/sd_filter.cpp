#include "sdergm/sd_filter.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "sdergm/optim.hpp"
#include "sdergm/rng.hpp"

namespace sdergm {

namespace {

// Per-parameter view of alpha/beta under the pooling mode.
Eigen::VectorXd expand_pooled(const Eigen::VectorXd& v, Pooling pooling, int k) {
    if (pooling == Pooling::PerParameter) {
        if (v.size() != k)
            throw std::invalid_argument("SdStaticParams: expected one coefficient per parameter");
        return v;
    }
    if (v.size() != 2 || k % 2 != 0)
        throw std::invalid_argument(
            "SdStaticParams: direction pooling needs 2 coefficients and an even parameter count");
    Eigen::VectorXd out(k);
    out.head(k / 2).setConstant(v[0]);
    out.tail(k / 2).setConstant(v[1]);
    return out;
}

}  // namespace

void SdStaticParams::validate(int n_params) const {
    if (w.size() != n_params)
        throw std::invalid_argument("SdStaticParams: w must have one entry per parameter");
    expand_pooled(alpha, pooling, n_params);
    expand_pooled(beta, pooling, n_params);
    if ((alpha.array() < 0.0).any())
        throw std::invalid_argument("SdStaticParams: alpha must be non-negative");
    if ((beta.array().abs() >= 1.0).any())
        throw std::invalid_argument("SdStaticParams: |beta| must be below 1");
}

Eigen::VectorXd sd_update(const Eigen::VectorXd& theta, const Eigen::VectorXd& scaled_score,
                          const SdStaticParams& params) {
    const int k = static_cast<int>(theta.size());
    if (scaled_score.size() != k || params.w.size() != k)
        throw std::invalid_argument("sd_update: dimension mismatch");
    const Eigen::VectorXd a = expand_pooled(params.alpha, params.pooling, k);
    const Eigen::VectorXd b = expand_pooled(params.beta, params.pooling, k);
    return params.w.array() + b.array() * theta.array() + a.array() * scaled_score.array();
}

Eigen::VectorXd ModelBackend::static_fit() const { return static_fit_range(0, n_times()); }

// ---------------------------------------------------------------------------
// Beta backend

BetaBackend::BetaBackend(TemporalNetwork data, BetaFitConfig fit_config)
    : data_(std::move(data)), n_(data_.n_nodes()), fit_config_(fit_config) {
    data_.validate();
    if (data_.snapshots.empty()) throw std::invalid_argument("BetaBackend: empty data");
    if (!data_.directed()) throw std::invalid_argument("BetaBackend: the beta model is directed");
    if (!data_.all_active())
        throw std::invalid_argument(
            "BetaBackend: per-node parameters require all nodes active in every snapshot");
}

double BetaBackend::log_density(int t, const Eigen::VectorXd& theta) const {
    return beta_log_likelihood(data_.snapshots[t], BetaParams::from_stacked(theta));
}

Eigen::VectorXd BetaBackend::score(int t, const Eigen::VectorXd& theta) const {
    return score_of(data_.snapshots[t], theta);
}

Eigen::VectorXd BetaBackend::fisher_diag(int, const Eigen::VectorXd& theta) const {
    return beta_fisher_diag(BetaParams::from_stacked(theta));
}

Eigen::VectorXd BetaBackend::score_of(const Adjacency& y, const Eigen::VectorXd& theta) const {
    return beta_score(y, BetaParams::from_stacked(theta));
}

Eigen::VectorXd BetaBackend::fisher_diag_of(const Adjacency&, const Eigen::VectorXd& theta) const {
    return beta_fisher_diag(BetaParams::from_stacked(theta));
}

Eigen::VectorXd BetaBackend::static_fit_range(int t0, int t1) const {
    if (t0 < 0 || t1 > n_times() || t0 >= t1)
        throw std::invalid_argument("static_fit_range: bad range");
    // moment conditions of the pooled likelihood: mean degrees
    Eigen::VectorXd out_mean = Eigen::VectorXd::Zero(n_), in_mean = Eigen::VectorXd::Zero(n_);
    for (int t = t0; t < t1; ++t) {
        const Degrees d = degrees(data_.snapshots[t]);
        for (int i = 0; i < n_; ++i) {
            out_mean[i] += d.out[i];
            in_mean[i] += d.in[i];
        }
    }
    out_mean /= static_cast<double>(t1 - t0);
    in_mean /= static_cast<double>(t1 - t0);
    return beta_fit_degrees(out_mean, in_mean, fit_config_).stacked();
}

Adjacency BetaBackend::sample(const Eigen::VectorXd& theta, std::uint64_t seed) const {
    return sample_beta(BetaParams::from_stacked(theta), seed);
}

Eigen::MatrixXd BetaBackend::expected_adjacency(const Eigen::VectorXd& theta) const {
    return link_prob_matrix(BetaParams::from_stacked(theta));
}

// ---------------------------------------------------------------------------
// ERGM backend

ErgmBackend::ErgmBackend(ErgmSpec spec, TemporalNetwork data, McmcConfig mcmc, MpleConfig mple)
    : spec_(std::move(spec)), data_(std::move(data)), mcmc_(mcmc), mple_(mple),
      sample_n_(data_.n_nodes()) {
    data_.validate();
    if (data_.snapshots.empty()) throw std::invalid_argument("ErgmBackend: empty data");
    if (data_.directed() != spec_.directed)
        throw std::invalid_argument("ErgmBackend: spec/data directedness mismatch");
    tables_.reserve(data_.snapshots.size());
    for (int t = 0; t < static_cast<int>(data_.snapshots.size()); ++t) {
        bool all = true;
        for (bool a : data_.active[t]) all = all && a;
        tables_.push_back(change_table(
            spec_, all ? data_.snapshots[t] : data_.snapshots[t].induced(data_.active[t])));
    }
}

double ErgmBackend::log_density(int t, const Eigen::VectorXd& theta) const {
    return pseudo_loglik(tables_[t], theta);
}

Eigen::VectorXd ErgmBackend::score(int t, const Eigen::VectorXd& theta) const {
    return pseudo_score(tables_[t], theta);
}

Eigen::VectorXd ErgmBackend::fisher_diag(int t, const Eigen::VectorXd& theta) const {
    return pseudo_fisher(tables_[t], theta).diagonal();
}

Eigen::VectorXd ErgmBackend::score_of(const Adjacency& y, const Eigen::VectorXd& theta) const {
    return pseudo_score(spec_, y, theta);
}

Eigen::VectorXd ErgmBackend::fisher_diag_of(const Adjacency& y,
                                            const Eigen::VectorXd& theta) const {
    return pseudo_fisher(spec_, y, theta).diagonal();
}

Eigen::VectorXd ErgmBackend::static_fit_range(int t0, int t1) const {
    if (t0 < 0 || t1 > n_times() || t0 >= t1)
        throw std::invalid_argument("static_fit_range: bad range");
    return mple_fit_pooled(
        std::vector<ChangeStatTable>(tables_.begin() + t0, tables_.begin() + t1), mple_);
}

Adjacency ErgmBackend::sample(const Eigen::VectorXd& theta, std::uint64_t seed) const {
    return sample_mcmc(spec_, theta, sample_n_, 1, seed, mcmc_).front();
}

Eigen::MatrixXd ErgmBackend::expected_adjacency(const Eigen::VectorXd& theta) const {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(sample_n_, sample_n_);
    const auto draws = sample_mcmc(spec_, theta, sample_n_, expectation_samples_,
                                   split_seed(expectation_seed_, 0), mcmc_);
    for (const auto& y : draws)
        for (int i = 0; i < sample_n_; ++i)
            for (int j = 0; j < sample_n_; ++j)
                if (i != j && y.at(i, j)) acc(i, j) += 1.0;
    acc /= static_cast<double>(draws.size());
    if (!spec_.directed) acc = ((acc + acc.transpose()) * 0.5).eval();
    return acc;
}

// ---------------------------------------------------------------------------
// Filter

namespace {

FilterPath run_filter_range(const ModelBackend& backend, const SdStaticParams& params,
                            const Eigen::VectorXd& theta_init, int t0, int t1) {
    const int k = backend.n_params();
    FilterPath path;
    path.theta.resize(t1 - t0, k);
    path.scaled_scores.resize(t1 - t0, k);
    path.loglik_terms.resize(t1 - t0);

    Eigen::VectorXd theta = theta_init;
    for (int t = t0; t < t1; ++t) {
        const double ll = backend.log_density(t, theta);
        if (!std::isfinite(ll)) {
            std::ostringstream msg;
            msg << "filter: non-finite log-density at t=" << t
                << " (|theta|_inf=" << theta.lpNorm<Eigen::Infinity>() << ")";
            throw std::runtime_error(msg.str());
        }
        const Eigen::VectorXd s = backend.score(t, theta);
        const Eigen::VectorXd f = backend.fisher_diag(t, theta);
        const Eigen::VectorXd scaled = s.array() / f.array().max(kFisherFloor).sqrt();

        path.theta.row(t - t0) = theta;
        path.scaled_scores.row(t - t0) = scaled;
        path.loglik_terms[t - t0] = ll;
        theta = sd_update(theta, scaled, params);
    }
    path.theta_next = theta;
    path.total_loglik = path.loglik_terms.sum();
    return path;
}

}  // namespace

FilterPath filter(const ModelBackend& backend, const SdStaticParams& params,
                  const Eigen::VectorXd& theta_init) {
    if (backend.n_times() == 0) throw std::invalid_argument("filter: empty data");
    if (theta_init.size() != backend.n_params())
        throw std::invalid_argument("filter: theta_init length mismatch");
    params.validate(backend.n_params());
    return run_filter_range(backend, params, theta_init, 0, backend.n_times());
}

Eigen::VectorXd target_w(const Eigen::VectorXd& beta_expanded,
                         const Eigen::VectorXd& theta_static) {
    if (beta_expanded.size() != theta_static.size())
        throw std::invalid_argument("target_w: dimension mismatch");
    if ((beta_expanded.array().abs() >= 1.0).any())
        throw std::invalid_argument("target_w: |beta| must be below 1");
    return (1.0 - beta_expanded.array()) * theta_static.array();
}

// ---------------------------------------------------------------------------
// Static-parameter estimation

namespace {

struct Reparam {
    // free vector layout: [a (n_pairs), b (n_pairs), w (K, only if !targeting)]
    int n_pairs = 0;
    int k = 0;
    bool targeting = true;
    Pooling pooling = Pooling::PerParameter;
    Eigen::VectorXd theta_static;

    SdStaticParams decode(const Eigen::VectorXd& v) const {
        SdStaticParams p;
        p.pooling = pooling;
        p.alpha = v.head(n_pairs).array().exp();
        p.beta = v.segment(n_pairs, n_pairs).array().tanh();
        if (targeting)
            p.w = target_w(expand(p.beta), theta_static);
        else
            p.w = v.tail(k);
        return p;
    }

    Eigen::VectorXd expand(const Eigen::VectorXd& v) const {
        return expand_pooled(v, pooling, k);
    }

    Eigen::VectorXd encode_start(double alpha0, double beta0) const {
        Eigen::VectorXd v(n_pairs * 2 + (targeting ? 0 : k));
        v.head(n_pairs).setConstant(std::log(alpha0));
        v.segment(n_pairs, n_pairs).setConstant(std::atanh(beta0));
        if (!targeting)
            v.tail(k) =
                target_w(expand(Eigen::VectorXd::Constant(n_pairs, beta0)), theta_static);
        return v;
    }
};

}  // namespace

EstimateResult estimate_static(const ModelBackend& backend, const EstimateConfig& config) {
    const int k = backend.n_params();
    const int t0 = config.range_begin;
    const int t_end = config.range_end < 0 ? backend.n_times() : config.range_end;
    if (t_end - t0 < 10)
        throw std::invalid_argument("estimate_static: need at least 10 snapshots");
    if (config.pooling == Pooling::PooledByDirection && !backend.is_beta())
        throw std::invalid_argument(
            "estimate_static: direction pooling is defined for the beta backend only");

    Reparam rep;
    rep.k = k;
    rep.n_pairs = config.pooling == Pooling::PooledByDirection ? 2 : k;
    rep.targeting = config.targeting;
    rep.pooling = config.pooling;
    rep.theta_static = backend.static_fit_range(t0, t_end);

    const auto objective = [&](const Eigen::VectorXd& v) -> double {
        try {
            const SdStaticParams p = rep.decode(v);
            return -run_filter_range(backend, p, rep.theta_static, t0, t_end).total_loglik;
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    // Starts: a near-static anchor plus progressively more reactive points.
    const std::vector<std::pair<double, double>> starts = {
        {1e-8, 0.0}, {0.02, 0.9}, {0.2, 0.5}};

    SimplexConfig sconfig;
    sconfig.max_iter = config.max_iter;
    bool any_converged = false;
    SimplexResult best;
    best.f = std::numeric_limits<double>::infinity();
    for (int s = 0; s < config.n_starts && s < static_cast<int>(starts.size()); ++s) {
        const SimplexResult r = minimize_simplex(
            objective, rep.encode_start(starts[s].first, starts[s].second), sconfig);
        any_converged = any_converged || r.converged;
        if (r.f < best.f) best = r;
    }
    if (!std::isfinite(best.f)) throw std::runtime_error("estimate_static: no admissible point");
    if (!any_converged) {
        const double gnorm = fd_gradient(objective, best.x).norm();
        std::ostringstream msg;
        msg << "estimate_static: optimizer did not converge; best -loglik " << best.f
            << ", gradient norm " << gnorm;
        throw std::runtime_error(msg.str());
    }

    EstimateResult result;
    result.params = rep.decode(best.x);
    result.theta_static = rep.theta_static;
    result.loglik = -best.f;
    result.path = run_filter_range(backend, result.params, rep.theta_static, t0, t_end);
    return result;
}

// ---------------------------------------------------------------------------
// LM test for parameter time-variation

LmTestResult lm_test_at(const ModelBackend& backend, const Eigen::VectorXd& theta_static,
                        int param_index) {
    const int t_max = backend.n_times();
    if (param_index < 0 || param_index >= backend.n_params())
        throw std::invalid_argument("lm_test: parameter index out of range");
    if (t_max < 3) throw std::invalid_argument("lm_test: need at least 3 snapshots");
    Eigen::VectorXd grad(t_max), scale(t_max);
    for (int t = 0; t < t_max; ++t) {
        grad[t] = backend.score(t, theta_static)[param_index];
        const double f = backend.fisher_diag(t, theta_static)[param_index];
        scale[t] = 1.0 / std::sqrt(std::max(f, kFisherFloor));
    }
    if (grad.lpNorm<Eigen::Infinity>() < 1e-12)
        throw std::runtime_error("lm_test: all scores are numerically zero");

    // regression 1 = c_w grad_t + c_a (scale_{t-1} grad_{t-1} grad_t) + resid
    const int rows = t_max - 1;
    Eigen::MatrixXd x(rows, 2);
    for (int t = 1; t < t_max; ++t) {
        x(t - 1, 0) = grad[t];
        x(t - 1, 1) = scale[t - 1] * grad[t - 1] * grad[t];
    }
    const Eigen::MatrixXd xtx = x.transpose() * x;
    const Eigen::VectorXd xt1 = x.transpose() * Eigen::VectorXd::Ones(rows);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("lm_test: degenerate regressors");
    const Eigen::VectorXd coef = ldlt.solve(xt1);

    LmTestResult result;
    result.statistic = xt1.dot(coef);  // explained sum of squares
    if (!std::isfinite(result.statistic) || result.statistic < 0.0)
        throw std::runtime_error("lm_test: degenerate regressors");
    result.p_value = std::erfc(std::sqrt(result.statistic / 2.0));
    return result;
}

LmTestResult lm_test(const ModelBackend& backend, int param_index) {
    return lm_test_at(backend, backend.static_fit(), param_index);
}

// ---------------------------------------------------------------------------
// Forecast

std::vector<Eigen::MatrixXd> forecast(const ModelBackend& backend, const SdStaticParams& params,
                                      const Eigen::VectorXd& theta_last, int horizon, int n_sims,
                                      std::uint64_t seed) {
    if (horizon < 1) throw std::invalid_argument("forecast: horizon must be >= 1");
    if (n_sims < 1) throw std::invalid_argument("forecast: n_sims must be >= 1");
    params.validate(backend.n_params());

    const int t_last = backend.n_times() - 1;
    const Eigen::VectorXd s = backend.score(t_last, theta_last);
    const Eigen::VectorXd f = backend.fisher_diag(t_last, theta_last);
    const Eigen::VectorXd theta_next =
        sd_update(theta_last, s.array() / f.array().max(kFisherFloor).sqrt(), params);

    std::vector<Eigen::MatrixXd> out;
    out.reserve(horizon);
    out.push_back(backend.expected_adjacency(theta_next));
    if (horizon == 1) return out;

    const int n = static_cast<int>(out.front().rows());
    std::vector<Eigen::MatrixXd> acc(horizon - 1, Eigen::MatrixXd::Zero(n, n));
    for (int sim = 0; sim < n_sims; ++sim) {
        Eigen::VectorXd theta = theta_next;
        for (int h = 2; h <= horizon; ++h) {
            const Adjacency y = backend.sample(
                theta, split_seed(seed, static_cast<std::uint64_t>(sim) * horizon + h));
            const Eigen::VectorXd ss = backend.score_of(y, theta);
            const Eigen::VectorXd sf = backend.fisher_diag_of(y, theta);
            theta = sd_update(theta, ss.array() / sf.array().max(kFisherFloor).sqrt(), params);
            acc[h - 2] += backend.expected_adjacency(theta);
        }
    }
    for (auto& m : acc) out.push_back(m / static_cast<double>(n_sims));
    return out;
}

}  // namespace sdergm
