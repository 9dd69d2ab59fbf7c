#pragma once

#include <Eigen/Dense>
#include <functional>

namespace sdergm {

struct SimplexConfig {
    int max_iter = 4000;
    double f_tol = 1e-10;       // spread of simplex values
    double x_tol = 1e-9;        // spread of simplex vertices
    double initial_step = 0.25; // per-coordinate displacement of the start simplex
};

struct SimplexResult {
    Eigen::VectorXd x;
    double f = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Nelder-Mead downhill simplex, minimization. Objective must return a
// finite value or +inf (treated as a rejected point).
SimplexResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& start, const SimplexConfig& config = {});

// Central finite-difference gradient, used for reporting and tests.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double step = 1e-5);

}  // namespace sdergm
