#include "sdergm/beta_model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sdergm/rng.hpp"

namespace sdergm {

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

Eigen::VectorXd BetaParams::stacked() const {
    Eigen::VectorXd v(2 * n());
    v.head(n()) = theta_in;
    v.tail(n()) = theta_out;
    return v;
}

BetaParams BetaParams::from_stacked(const Eigen::VectorXd& v) {
    if (v.size() % 2 != 0)
        throw std::invalid_argument("BetaParams::from_stacked: odd length");
    const int n = static_cast<int>(v.size()) / 2;
    return BetaParams{v.head(n), v.tail(n)};
}

double link_prob(const BetaParams& theta, int i, int j) {
    if (i == j) throw std::invalid_argument("link_prob: self-loops are excluded");
    return logistic(theta.theta_out[i] + theta.theta_in[j]);
}

Eigen::MatrixXd link_prob_matrix(const BetaParams& theta) {
    const int n = theta.n();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) p(i, j) = logistic(theta.theta_out[i] + theta.theta_in[j]);
    return p;
}

namespace {

void check_dims(const Adjacency& y, const BetaParams& theta, const char* who) {
    if (!y.directed())
        throw std::invalid_argument(std::string(who) + ": the beta model is directed");
    if (y.n() != theta.n())
        throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

}  // namespace

double beta_log_likelihood(const Adjacency& y, const BetaParams& theta) {
    check_dims(y, theta, "beta_log_likelihood");
    const int n = y.n();
    const Degrees d = degrees(y);
    double ll = 0.0;
    for (int i = 0; i < n; ++i)
        ll += theta.theta_in[i] * d.in[i] + theta.theta_out[i] * d.out[i];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) ll -= softplus(theta.theta_out[i] + theta.theta_in[j]);
    return ll;
}

Eigen::VectorXd beta_score(const Adjacency& y, const BetaParams& theta) {
    check_dims(y, theta, "beta_score");
    const int n = y.n();
    const Degrees d = degrees(y);
    Eigen::VectorXd s(2 * n);
    for (int j = 0; j < n; ++j) {
        double col_p = 0.0;
        for (int i = 0; i < n; ++i)
            if (i != j) col_p += logistic(theta.theta_out[i] + theta.theta_in[j]);
        s[j] = d.in[j] - col_p;
    }
    for (int i = 0; i < n; ++i) {
        double row_p = 0.0;
        for (int j = 0; j < n; ++j)
            if (i != j) row_p += logistic(theta.theta_out[i] + theta.theta_in[j]);
        s[n + i] = d.out[i] - row_p;
    }
    return s;
}

Eigen::VectorXd beta_fisher_diag(const BetaParams& theta) {
    const int n = theta.n();
    Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) {
                const double x = theta.theta_out[i] + theta.theta_in[j];
                // p(1-p) = sigma(x) sigma(-x); this form stays positive where
                // 1-p would round to zero
                const double v = logistic(x) * logistic(-x);
                f[j] += v;      // in_j variance: column sum
                f[n + i] += v;  // out_i variance: row sum
            }
    return f;
}

BetaParams beta_fit_degrees(const Eigen::VectorXd& out_targets,
                            const Eigen::VectorXd& in_targets,
                            const BetaFitConfig& config) {
    const int n = static_cast<int>(out_targets.size());
    if (in_targets.size() != n)
        throw std::invalid_argument("beta_fit_degrees: target length mismatch");
    if (n < 2) throw std::invalid_argument("beta_fit_degrees: need n >= 2");

    Eigen::VectorXd dout = out_targets, din = in_targets;
    const double margin = 0.5;
    std::ostringstream boundary;
    for (int i = 0; i < n; ++i) {
        const bool out_bad = dout[i] <= 0.0 || dout[i] >= n - 1;
        const bool in_bad = din[i] <= 0.0 || din[i] >= n - 1;
        if (out_bad || in_bad) {
            if (config.clamp_boundary) {
                dout[i] = std::min(std::max(dout[i], margin), n - 1 - margin);
                din[i] = std::min(std::max(din[i], margin), n - 1 - margin);
            } else {
                if (boundary.tellp() > 0) boundary << ", ";
                boundary << "node " << i << " (out=" << dout[i] << ", in=" << din[i] << ")";
            }
        }
    }
    if (boundary.tellp() > 0)
        throw std::runtime_error(
            "beta MLE does not exist: degree at boundary for " + boundary.str());
    if (config.clamp_boundary) {
        // clamping can break sum(out) == sum(in), which the moment
        // conditions require; spread the imbalance evenly
        const double shift = (dout.sum() - din.sum()) / (2.0 * n);
        dout.array() -= shift;
        din.array() += shift;
        // A sequence can also sit on a face of the feasible polytope with
        // every entry interior (tight subset constraints), where no MLE
        // exists either. The uniform-mean point is strictly interior, so a
        // small shrink toward it guarantees strict interiority.
        const double eps = 0.01;
        const double mean = dout.sum() / n;
        dout = (1.0 - eps) * dout.array() + eps * mean;
        din = (1.0 - eps) * din.array() + eps * mean;
        for (int i = 0; i < n; ++i)
            if (dout[i] <= 0.0 || dout[i] >= n - 1 || din[i] <= 0.0 || din[i] >= n - 1)
                throw std::runtime_error(
                    "beta_fit_degrees: clamped targets remain infeasible after rebalancing");
    }

    BetaParams theta{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
    if (config.init.size() > 0) {
        if (config.init.size() != 2 * n)
            throw std::invalid_argument("beta_fit_degrees: init length mismatch");
        theta = BetaParams::from_stacked(config.init);
    }
    // Fixed point: theta_out_i = log(out_i) - log sum_j e^{in_j} / (1 + e^{in_j + out_i}),
    // and symmetrically for theta_in, mixed with the previous iterate.
    double resid = 0.0;
    for (int iter = 0; iter < config.max_iter; ++iter) {
        Eigen::VectorXd new_out(n);
        for (int i = 0; i < n; ++i) {
            double denom = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i)
                    denom += std::exp(theta.theta_in[j] -
                                      softplus(theta.theta_in[j] + theta.theta_out[i]));
            new_out[i] = std::log(dout[i]) - std::log(denom);
        }
        theta.theta_out = config.damping * theta.theta_out + (1.0 - config.damping) * new_out;

        Eigen::VectorXd new_in(n);
        for (int j = 0; j < n; ++j) {
            double denom = 0.0;
            for (int i = 0; i < n; ++i)
                if (i != j)
                    denom += std::exp(theta.theta_out[i] -
                                      softplus(theta.theta_out[i] + theta.theta_in[j]));
            new_in[j] = std::log(din[j]) - std::log(denom);
        }
        theta.theta_in = config.damping * theta.theta_in + (1.0 - config.damping) * new_in;

        // moment-condition residual
        resid = 0.0;
        for (int i = 0; i < n; ++i) {
            double row_p = 0.0, col_p = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i) {
                    row_p += logistic(theta.theta_out[i] + theta.theta_in[j]);
                    col_p += logistic(theta.theta_out[j] + theta.theta_in[i]);
                }
            resid = std::max(resid, std::abs(row_p - dout[i]));
            resid = std::max(resid, std::abs(col_p - din[i]));
        }
        if (resid < config.tol) return identify(theta);
    }
    std::ostringstream msg;
    msg << "beta MLE fixed point did not converge after " << config.max_iter
        << " iterations (residual " << resid << ")";
    throw std::runtime_error(msg.str());
}

BetaParams beta_mle(const Adjacency& y, const BetaFitConfig& config) {
    if (!y.directed()) throw std::invalid_argument("beta_mle: the beta model is directed");
    const Degrees d = degrees(y);
    Eigen::VectorXd dout(y.n()), din(y.n());
    for (int i = 0; i < y.n(); ++i) {
        dout[i] = d.out[i];
        din[i] = d.in[i];
    }
    return beta_fit_degrees(dout, din, config);
}

BetaParams identify(const BetaParams& theta) {
    const int n = theta.n();
    const double c = (theta.theta_out.sum() - theta.theta_in.sum()) / (2.0 * n);
    return BetaParams{theta.theta_in.array() + c, theta.theta_out.array() - c};
}

Adjacency sample_beta(const BetaParams& theta, std::uint64_t seed) {
    const int n = theta.n();
    Adjacency y(n, true);
    Rng rng(seed);
    // dyads visited row-major, i != j
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && rng.bernoulli(logistic(theta.theta_out[i] + theta.theta_in[j])))
                y.set(i, j, true);
    return y;
}

}  // namespace sdergm
