#pragma once

#include <Eigen/Dense>

#include "sdergm/adjacency.hpp"
#include "sdergm/statistics.hpp"

namespace sdergm {

// Node parameters of the directed beta (configuration) model. Convention
// used throughout: P(Y_ij = 1) = sigma(theta_out_i + theta_in_j), so the
// in-parameter of a node is driven by its column of Y and the
// out-parameter by its row.
struct BetaParams {
    Eigen::VectorXd theta_in;   // receiver parameters
    Eigen::VectorXd theta_out;  // sender parameters

    int n() const { return static_cast<int>(theta_in.size()); }

    // Stacked vector (in-half first, then out-half).
    Eigen::VectorXd stacked() const;
    static BetaParams from_stacked(const Eigen::VectorXd& v);
};

double logistic(double x);
// log(1 + e^x) without overflow
double softplus(double x);

double link_prob(const BetaParams& theta, int i, int j);

// Matrix of link probabilities, zero diagonal.
Eigen::MatrixXd link_prob_matrix(const BetaParams& theta);

double beta_log_likelihood(const Adjacency& y, const BetaParams& theta);

// Gradient of the log-likelihood in stacked (in, out) order:
// d/dtheta_in_j  = in_j  - sum_i p_ij
// d/dtheta_out_i = out_i - sum_j p_ij
Eigen::VectorXd beta_score(const Adjacency& y, const BetaParams& theta);

// Diagonal of the Fisher information, same ordering as beta_score.
Eigen::VectorXd beta_fisher_diag(const BetaParams& theta);

struct BetaFitConfig {
    double tol = 1e-8;      // max-norm of degree residuals
    int max_iter = 1000;
    double damping = 0.5;   // mixing weight on the fixed-point update
    // Replace boundary degree targets (0 or n-1) by a half-link margin
    // instead of failing. Off by default: boundary means no MLE exists.
    bool clamp_boundary = false;
    Eigen::VectorXd init;   // stacked starting point; empty = zeros
};

// Static MLE via damped fixed-point iteration on the moment conditions,
// alternating the out- and in-direction updates. Returns identified
// parameters. Real-valued targets supported so the same solver serves the
// full-sample fit (mean degrees).
BetaParams beta_fit_degrees(const Eigen::VectorXd& out_targets,
                            const Eigen::VectorXd& in_targets,
                            const BetaFitConfig& config = {});

BetaParams beta_mle(const Adjacency& y, const BetaFitConfig& config = {});

// Shift (+c, -c) onto the representative with sum(theta_in) = sum(theta_out).
// Link probabilities are invariant under this re-centering.
BetaParams identify(const BetaParams& theta);

Adjacency sample_beta(const BetaParams& theta, std::uint64_t seed);

}  // namespace sdergm
