#include <cmath>
#include <doctest.h>

#include "sdergm/optim.hpp"

using namespace sdergm;

TEST_CASE("simplex minimizes a shifted quadratic") {
    const auto f = [](const Eigen::VectorXd& x) {
        return (x[0] - 1.5) * (x[0] - 1.5) + 2.0 * (x[1] + 0.5) * (x[1] + 0.5);
    };
    const SimplexResult r = minimize_simplex(f, Eigen::Vector2d(0.0, 0.0));
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(1.5).epsilon(1e-4));
    CHECK(r.x[1] == doctest::Approx(-0.5).epsilon(1e-4));
}

TEST_CASE("simplex handles the banana valley") {
    const auto f = [](const Eigen::VectorXd& x) {
        const double a = 1.0 - x[0];
        const double b = x[1] - x[0] * x[0];
        return a * a + 100.0 * b * b;
    };
    const SimplexResult r = minimize_simplex(f, Eigen::Vector2d(-1.2, 1.0));
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("simplex walks around infinite regions") {
    const auto f = [](const Eigen::VectorXd& x) {
        if (x[0] < 0.0) return std::numeric_limits<double>::infinity();
        return (x[0] - 2.0) * (x[0] - 2.0);
    };
    const SimplexResult r = minimize_simplex(f, Eigen::VectorXd::Constant(1, 0.5));
    CHECK(r.x[0] == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("finite-difference gradient") {
    const auto f = [](const Eigen::VectorXd& x) { return x[0] * x[0] + 3.0 * x[1]; };
    const Eigen::VectorXd g = fd_gradient(f, Eigen::Vector2d(2.0, 1.0));
    CHECK(g[0] == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(g[1] == doctest::Approx(3.0).epsilon(1e-6));
}
