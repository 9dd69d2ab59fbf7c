#include "sdergm/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace sdergm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_eval(const std::function<double(const Eigen::VectorXd&)>& f,
                 const Eigen::VectorXd& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
}
}  // namespace

SimplexResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& start, const SimplexConfig& config) {
    const int dim = static_cast<int>(start.size());
    const int m = dim + 1;

    std::vector<Eigen::VectorXd> verts(m, start);
    std::vector<double> vals(m);
    for (int k = 0; k < dim; ++k) {
        verts[k + 1][k] += config.initial_step * std::max(1.0, std::abs(start[k]));
    }
    for (int k = 0; k < m; ++k) vals[k] = safe_eval(f, verts[k]);

    std::vector<int> idx(m);
    SimplexResult result;
    for (result.iterations = 0; result.iterations < config.max_iter; ++result.iterations) {
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        const int best = idx[0], worst = idx[m - 1], second_worst = idx[m - 2];

        double x_spread = 0.0;
        for (int k = 1; k < m; ++k)
            x_spread = std::max(x_spread, (verts[idx[k]] - verts[best]).lpNorm<Eigen::Infinity>());
        const double f_spread = vals[worst] - vals[best];
        if (std::isfinite(vals[worst]) &&
            (f_spread < config.f_tol || x_spread < config.x_tol)) {
            result.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
        for (int k = 0; k < m; ++k)
            if (k != worst) centroid += verts[k];
        centroid /= dim;

        const Eigen::VectorXd reflected = centroid + (centroid - verts[worst]);
        const double f_reflected = safe_eval(f, reflected);

        if (f_reflected < vals[idx[0]]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - verts[worst]);
            const double f_expanded = safe_eval(f, expanded);
            if (f_expanded < f_reflected) {
                verts[worst] = expanded;
                vals[worst] = f_expanded;
            } else {
                verts[worst] = reflected;
                vals[worst] = f_reflected;
            }
        } else if (f_reflected < vals[second_worst]) {
            verts[worst] = reflected;
            vals[worst] = f_reflected;
        } else {
            const Eigen::VectorXd contracted = centroid + 0.5 * (verts[worst] - centroid);
            const double f_contracted = safe_eval(f, contracted);
            if (f_contracted < vals[worst]) {
                verts[worst] = contracted;
                vals[worst] = f_contracted;
            } else {
                // shrink toward the best vertex
                for (int k = 0; k < m; ++k)
                    if (k != best) {
                        verts[k] = verts[best] + 0.5 * (verts[k] - verts[best]);
                        vals[k] = safe_eval(f, verts[k]);
                    }
            }
        }
    }

    const auto best_it = std::min_element(vals.begin(), vals.end());
    result.x = verts[static_cast<int>(best_it - vals.begin())];
    result.f = *best_it;
    return result;
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double step) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (int k = 0; k < x.size(); ++k) {
        const double h = step * std::max(1.0, std::abs(x[k]));
        xp[k] = x[k] + h;
        const double fp = f(xp);
        xp[k] = x[k] - h;
        const double fm = f(xp);
        xp[k] = x[k];
        g[k] = (fp - fm) / (2.0 * h);
    }
    return g;
}

}  // namespace sdergm
