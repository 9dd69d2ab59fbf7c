#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sdergm/adjacency.hpp"
#include "sdergm/statistics.hpp"

namespace sdergm {

// An ERGM: ordered statistics vector plus directedness of the graphs it
// describes. Statistic kinds must be distinct.
struct ErgmSpec {
    std::vector<StatisticKind> stats;
    bool directed = true;

    ErgmSpec() = default;
    ErgmSpec(std::vector<StatisticKind> s, bool dir);

    int n_stats() const { return static_cast<int>(stats.size()); }
};

// ERGM with all in- and out-degrees as statistics; equivalent to the beta
// model (ordering matches BetaParams::stacked: in-degrees then out-degrees).
ErgmSpec beta_model_spec(int n);

// One row per dyad: the change statistics and the observed value. Directed
// graphs have n(n-1) rows (i,j) row-major; undirected n(n-1)/2 rows with
// i < j, so each unordered pair enters the pseudo-likelihood once.
struct ChangeStatTable {
    Eigen::MatrixXd delta;   // rows = dyads, cols = statistics
    Eigen::VectorXd y;       // observed Y_ij per row
    std::vector<std::pair<int, int>> dyads;
    std::vector<std::string> stat_names;

    int n_rows() const { return static_cast<int>(delta.rows()); }
    int n_stats() const { return static_cast<int>(delta.cols()); }
};

ChangeStatTable change_table(const ErgmSpec& spec, const Adjacency& y);

// sum over dyads of log Bernoulli(Y_ij; pi_ij), pi_ij = sigma(theta . delta_ij)
double pseudo_loglik(const ChangeStatTable& table, const Eigen::VectorXd& theta);
double pseudo_loglik(const ErgmSpec& spec, const Adjacency& y, const Eigen::VectorXd& theta);

// component s: sum over dyads of delta_s (Y_ij - pi_ij)
Eigen::VectorXd pseudo_score(const ChangeStatTable& table, const Eigen::VectorXd& theta);
Eigen::VectorXd pseudo_score(const ErgmSpec& spec, const Adjacency& y,
                             const Eigen::VectorXd& theta);

// sum over dyads of delta delta^T pi(1-pi); symmetric PSD
Eigen::MatrixXd pseudo_fisher(const ChangeStatTable& table, const Eigen::VectorXd& theta);
Eigen::MatrixXd pseudo_fisher(const ErgmSpec& spec, const Adjacency& y,
                              const Eigen::VectorXd& theta);

struct MpleConfig {
    double tol = 1e-10;        // max-norm of the pseudo-score at the optimum
    int max_iter = 100;
    double theta_bound = 100;  // |theta|_inf beyond this means separation
};

// Newton/IRLS maximum pseudo-likelihood fit over the dyad-level logistic
// model. Throws on perfect separation and on collinear statistics.
Eigen::VectorXd mple_fit(const ChangeStatTable& table, const MpleConfig& config = {});
Eigen::VectorXd mple_fit(const ErgmSpec& spec, const Adjacency& y,
                         const MpleConfig& config = {});

// Pooled fit over several tables (full-sample static estimate of a series).
Eigen::VectorXd mple_fit_pooled(const std::vector<ChangeStatTable>& tables,
                                const MpleConfig& config = {});

}  // namespace sdergm
