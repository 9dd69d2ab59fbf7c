#include "sdergm/ergm_pseudo.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sdergm/beta_model.hpp"

namespace sdergm {

ErgmSpec::ErgmSpec(std::vector<StatisticKind> s, bool dir) : stats(std::move(s)), directed(dir) {
    for (std::size_t a = 0; a < stats.size(); ++a)
        for (std::size_t b = a + 1; b < stats.size(); ++b)
            if (statistic_equal(stats[a], stats[b]))
                throw std::invalid_argument("ErgmSpec: duplicate statistic " +
                                            statistic_name(stats[a]));
    if (!directed)
        for (const auto& k : stats)
            if (std::holds_alternative<OutDegreeStat>(k) || std::holds_alternative<InDegreeStat>(k))
                throw std::invalid_argument(
                    "ErgmSpec: directed degree statistics need a directed spec");
}

ErgmSpec beta_model_spec(int n) {
    std::vector<StatisticKind> stats;
    stats.reserve(2 * n);
    for (int j = 0; j < n; ++j) stats.push_back(InDegreeStat{j});
    for (int i = 0; i < n; ++i) stats.push_back(OutDegreeStat{i});
    return ErgmSpec(std::move(stats), true);
}

ChangeStatTable change_table(const ErgmSpec& spec, const Adjacency& y) {
    if (spec.directed != y.directed())
        throw std::invalid_argument("change_table: spec/matrix directedness mismatch");
    const int n = y.n();
    const int rows = spec.directed ? n * (n - 1) : n * (n - 1) / 2;
    ChangeStatTable table;
    table.delta.resize(rows, spec.n_stats());
    table.y.resize(rows);
    table.dyads.reserve(rows);
    for (const auto& k : spec.stats) table.stat_names.push_back(statistic_name(k));
    int r = 0;
    for (int i = 0; i < n; ++i) {
        const int j0 = spec.directed ? 0 : i + 1;
        for (int j = j0; j < n; ++j) {
            if (i == j) continue;
            for (int s = 0; s < spec.n_stats(); ++s)
                table.delta(r, s) = change_statistic(spec.stats[s], y, i, j);
            table.y[r] = y.at(i, j) ? 1.0 : 0.0;
            table.dyads.emplace_back(i, j);
            ++r;
        }
    }
    return table;
}

double pseudo_loglik(const ChangeStatTable& table, const Eigen::VectorXd& theta) {
    if (theta.size() != table.n_stats())
        throw std::invalid_argument("pseudo_loglik: theta length mismatch");
    const Eigen::VectorXd x = table.delta * theta;
    double ll = 0.0;
    for (int r = 0; r < table.n_rows(); ++r) {
        // y log pi + (1-y) log(1-pi) = y x - log(1 + e^x)
        ll += table.y[r] * x[r] - softplus(x[r]);
    }
    return ll;
}

Eigen::VectorXd pseudo_score(const ChangeStatTable& table, const Eigen::VectorXd& theta) {
    if (theta.size() != table.n_stats())
        throw std::invalid_argument("pseudo_score: theta length mismatch");
    const Eigen::VectorXd x = table.delta * theta;
    Eigen::VectorXd resid(table.n_rows());
    for (int r = 0; r < table.n_rows(); ++r) resid[r] = table.y[r] - logistic(x[r]);
    return table.delta.transpose() * resid;
}

Eigen::MatrixXd pseudo_fisher(const ChangeStatTable& table, const Eigen::VectorXd& theta) {
    if (theta.size() != table.n_stats())
        throw std::invalid_argument("pseudo_fisher: theta length mismatch");
    const Eigen::VectorXd x = table.delta * theta;
    Eigen::VectorXd w(table.n_rows());
    for (int r = 0; r < table.n_rows(); ++r) w[r] = logistic(x[r]) * logistic(-x[r]);
    return table.delta.transpose() * w.asDiagonal() * table.delta;
}

double pseudo_loglik(const ErgmSpec& spec, const Adjacency& y, const Eigen::VectorXd& theta) {
    return pseudo_loglik(change_table(spec, y), theta);
}
Eigen::VectorXd pseudo_score(const ErgmSpec& spec, const Adjacency& y,
                             const Eigen::VectorXd& theta) {
    return pseudo_score(change_table(spec, y), theta);
}
Eigen::MatrixXd pseudo_fisher(const ErgmSpec& spec, const Adjacency& y,
                              const Eigen::VectorXd& theta) {
    return pseudo_fisher(change_table(spec, y), theta);
}

namespace {

struct TableView {
    const std::vector<ChangeStatTable>* tables;

    int n_stats() const { return tables->front().n_stats(); }

    double loglik(const Eigen::VectorXd& theta) const {
        double ll = 0.0;
        for (const auto& t : *tables) ll += pseudo_loglik(t, theta);
        return ll;
    }
    Eigen::VectorXd score(const Eigen::VectorXd& theta) const {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(n_stats());
        for (const auto& t : *tables) s += pseudo_score(t, theta);
        return s;
    }
    Eigen::MatrixXd fisher(const Eigen::VectorXd& theta) const {
        Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n_stats(), n_stats());
        for (const auto& t : *tables) f += pseudo_fisher(t, theta);
        return f;
    }
};

void check_collinearity(const std::vector<ChangeStatTable>& tables) {
    const int s = tables.front().n_stats();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(s, s);
    for (const auto& t : tables) gram += t.delta.transpose() * t.delta;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double lmax = eig.eigenvalues().maxCoeff();
    if (lmax <= 0.0 || eig.eigenvalues().minCoeff() < 1e-12 * lmax) {
        // name the statistics involved in the near-null direction
        const Eigen::VectorXd v = eig.eigenvectors().col(0);
        const auto& names = tables.front().stat_names;
        std::ostringstream msg;
        msg << "mple_fit: change-statistic columns are collinear; involved statistics:";
        for (int k = 0; k < s; ++k)
            if (std::abs(v[k]) > 1e-6)
                msg << ' ' << (k < static_cast<int>(names.size()) ? names[k]
                                                                  : "[" + std::to_string(k) + "]");
        throw std::runtime_error(msg.str());
    }
}

}  // namespace

Eigen::VectorXd mple_fit_pooled(const std::vector<ChangeStatTable>& tables,
                                const MpleConfig& config) {
    if (tables.empty()) throw std::invalid_argument("mple_fit: no data");
    const TableView view{&tables};
    const int s = view.n_stats();

    // all-zero or all-one outcomes separate immediately
    double ysum = 0.0;
    long long rows = 0;
    for (const auto& t : tables) {
        ysum += t.y.sum();
        rows += t.n_rows();
    }
    if (ysum == 0.0 || ysum == static_cast<double>(rows))
        throw std::runtime_error("mple_fit: perfect separation (all dyads " +
                                 std::string(ysum == 0.0 ? "absent" : "present") + ")");

    check_collinearity(tables);

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(s);
    double ll = view.loglik(theta);
    for (int iter = 0; iter < config.max_iter; ++iter) {
        const Eigen::VectorXd grad = view.score(theta);
        if (grad.lpNorm<Eigen::Infinity>() < config.tol) return theta;
        const Eigen::MatrixXd fisher = view.fisher(theta);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(fisher);
        if (ldlt.info() != Eigen::Success)
            throw std::runtime_error("mple_fit: Fisher factorization failed");
        Eigen::VectorXd step = ldlt.solve(grad);
        if (grad.lpNorm<Eigen::Infinity>() < 1e-4) {
            // quadratic basin: the objective no longer resolves the
            // improvement, but pure Newton still contracts the score
            theta += step;
            continue;
        }
        // backtracking keeps Newton monotone far from the optimum
        double scale = 1.0;
        for (int half = 0; half < 60; ++half) {
            const Eigen::VectorXd cand = theta + scale * step;
            const double cand_ll = view.loglik(cand);
            if (cand_ll >= ll) {
                theta = cand;
                ll = cand_ll;
                break;
            }
            scale *= 0.5;
        }
        if (theta.lpNorm<Eigen::Infinity>() > config.theta_bound)
            throw std::runtime_error(
                "mple_fit: estimates diverging, data are likely perfectly separated");
    }
    const double gnorm = view.score(theta).lpNorm<Eigen::Infinity>();
    if (gnorm < config.tol) return theta;
    std::ostringstream msg;
    msg << "mple_fit: no convergence after " << config.max_iter
        << " iterations (score max-norm " << gnorm << ")";
    throw std::runtime_error(msg.str());
}

Eigen::VectorXd mple_fit(const ChangeStatTable& table, const MpleConfig& config) {
    return mple_fit_pooled({table}, config);
}

Eigen::VectorXd mple_fit(const ErgmSpec& spec, const Adjacency& y, const MpleConfig& config) {
    return mple_fit(change_table(spec, y), config);
}

}  // namespace sdergm
