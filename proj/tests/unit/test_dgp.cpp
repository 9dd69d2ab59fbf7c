#include <cmath>
#include <doctest.h>

#include "sdergm/dgp.hpp"
#include "sdergm/eval.hpp"

using namespace sdergm;

TEST_CASE("build_theta0_beta") {
    SUBCASE("expected degrees span the requested range") {
        const BetaParams theta0 = build_theta0_beta(10, 3, 8);
        const Eigen::MatrixXd p = link_prob_matrix(theta0);
        for (int i = 0; i < 10; ++i) {
            const double expected_out = p.row(i).sum();
            CHECK(expected_out > 2.0);
            CHECK(expected_out < 9.0);
        }
        // interpolation makes later nodes busier
        CHECK(p.row(9).sum() > p.row(0).sum() + 2.0);
    }
    SUBCASE("uniform targets give exchangeable parameters") {
        const BetaParams theta0 = build_theta0_beta(8, 4, 4);
        for (int i = 1; i < 8; ++i) {
            CHECK(theta0.theta_in[i] == doctest::Approx(theta0.theta_in[0]).epsilon(1e-6));
            CHECK(theta0.theta_out[i] == doctest::Approx(theta0.theta_out[0]).epsilon(1e-6));
        }
    }
    SUBCASE("re-simulation reproduces the allocated degrees") {
        const int n = 10;
        const BetaParams theta0 = build_theta0_beta(n, 3, 8);
        const Eigen::MatrixXd p = link_prob_matrix(theta0);
        const int reps = 4000;
        Eigen::VectorXd mean_out = Eigen::VectorXd::Zero(n);
        for (int rep = 0; rep < reps; ++rep) {
            const Degrees d = degrees(sample_beta(theta0, 500 + rep));
            for (int i = 0; i < n; ++i) mean_out[i] += static_cast<double>(d.out[i]) / reps;
        }
        for (int i = 0; i < n; ++i) {
            double var = 0.0;
            for (int j = 0; j < n; ++j)
                if (i != j) var += p(i, j) * (1 - p(i, j));
            CHECK(std::abs(mean_out[i] - p.row(i).sum()) < 3.0 * std::sqrt(var / reps));
        }
    }
    SUBCASE("bad ranges rejected") {
        CHECK_THROWS(build_theta0_beta(10, 0, 8));
        CHECK_THROWS(build_theta0_beta(10, 5, 3));
        CHECK_THROWS(build_theta0_beta(10, 3, 10));
    }
}

TEST_CASE("build_bounds") {
    SUBCASE("stated two-point example") {
        Eigen::Vector2d theta0(1.0, 2.0);
        const auto [t1, t2] = build_bounds(theta0);
        CHECK(t1[0] == doctest::Approx(1.4));
        CHECK(t2[0] == doctest::Approx(0.6));
        CHECK(t1[1] == doctest::Approx(3.0));  // backward difference at the last index
        CHECK(t2[1] == doctest::Approx(1.0));
    }
    SUBCASE("constant vector is a fixed point") {
        const Eigen::VectorXd theta0 = Eigen::VectorXd::Constant(5, 1.7);
        const auto [t1, t2] = build_bounds(theta0);
        CHECK((t1 - theta0).lpNorm<Eigen::Infinity>() == 0.0);
        CHECK((t2 - theta0).lpNorm<Eigen::Infinity>() == 0.0);
    }
    SUBCASE("anchors average back to theta0") {
        Eigen::VectorXd theta0(4);
        theta0 << -1.0, 0.2, 0.9, 2.5;
        const auto [t1, t2] = build_bounds(theta0);
        CHECK(((t1 + t2) - 2.0 * theta0).lpNorm<Eigen::Infinity>() < 1e-14);
    }
    SUBCASE("too short") {
        CHECK_THROWS(build_bounds(Eigen::VectorXd::Constant(1, 1.0)));
    }
}

TEST_CASE("generate_paths") {
    DgpSpec spec;
    spec.theta0 = Eigen::Vector4d(0.5, -0.5, 1.0, -1.0);
    spec.theta1 = Eigen::Vector4d(0.3, -0.7, 0.8, -1.2);
    spec.theta2 = Eigen::Vector4d(0.7, -0.3, 1.2, -0.8);
    spec.varying = default_varying_mask(4);  // indices 1 and 3 vary
    spec.phases = Eigen::VectorXd::Zero(4);
    spec.horizon = 100;
    spec.seed = 5;

    SUBCASE("constant") {
        spec.kind = DgpKind::Const;
        const Eigen::MatrixXd paths = generate_paths(spec);
        for (int t = 0; t < spec.horizon; ++t)
            CHECK((paths.row(t).transpose() - spec.theta0).lpNorm<Eigen::Infinity>() == 0.0);
    }
    SUBCASE("steps switch at mid-sample") {
        spec.kind = DgpKind::Steps;
        const Eigen::MatrixXd paths = generate_paths(spec);
        CHECK(paths(0, 1) == spec.theta1[1]);
        CHECK(paths(49, 1) == spec.theta1[1]);   // t = 50 = T/2 still low
        CHECK(paths(50, 1) == spec.theta2[1]);   // t = 51 switches
        CHECK(paths(99, 3) == spec.theta2[3]);
        for (int t = 0; t < spec.horizon; ++t) {
            CHECK(paths(t, 0) == spec.theta0[0]);
            CHECK(paths(t, 2) == spec.theta0[2]);
        }
    }
    SUBCASE("sine crosses theta0 where the oscillation vanishes") {
        spec.kind = DgpKind::Sine;
        const Eigen::MatrixXd paths = generate_paths(spec);
        // t = T/2: the argument is exactly 2 pi
        CHECK(paths(49, 1) == doctest::Approx(spec.theta0[1]).epsilon(1e-10));
        for (int t = 0; t < spec.horizon; ++t) {
            CHECK(paths(t, 0) == spec.theta0[0]);
            const double amp = std::abs(spec.theta2[1] - spec.theta1[1]);
            CHECK(paths(t, 1) >= spec.theta0[1] - amp - 1e-12);
            CHECK(paths(t, 1) <= spec.theta0[1] + amp + 1e-12);
        }
    }
    SUBCASE("ar1 moments") {
        spec.kind = DgpKind::Ar1;
        spec.horizon = 100000;
        const Eigen::MatrixXd paths = generate_paths(spec);
        const Eigen::VectorXd series = paths.col(1);
        const double mean = series.mean();
        // long-run standard error of the sample mean at rho = 0.99
        const double se = spec.ar_sigma / ((1.0 - spec.ar_coeff) *
                                           std::sqrt(static_cast<double>(spec.horizon)));
        CHECK(std::abs(mean - spec.theta0[1]) < 3.0 * se);
        double num = 0.0, den = 0.0;
        for (int t = 1; t < spec.horizon; ++t) {
            num += (series[t] - mean) * (series[t - 1] - mean);
            den += (series[t] - mean) * (series[t] - mean);
        }
        CHECK(num / den == doctest::Approx(0.99).epsilon(0.01));
        for (int t = 0; t < 1000; ++t) CHECK(paths(t, 0) == spec.theta0[0]);
    }
}

TEST_CASE("simulate_networks") {
    SUBCASE("constant beta path gives iid snapshots matching the link probabilities") {
        const BetaParams theta0 = build_theta0_beta(6, 2, 4);
        const int t_max = 4000;
        Eigen::MatrixXd paths(t_max, 12);
        for (int t = 0; t < t_max; ++t) paths.row(t) = theta0.stacked();
        const TemporalNetwork data = simulate_networks(BetaSimulator{}, paths, 321);
        const Eigen::MatrixXd p = link_prob_matrix(theta0);
        double freq01 = 0.0;
        for (const auto& y : data.snapshots) freq01 += y.at(0, 1) ? 1.0 : 0.0;
        freq01 /= t_max;
        CHECK(std::abs(freq01 - p(0, 1)) <
              3.0 * std::sqrt(p(0, 1) * (1 - p(0, 1)) / t_max));
    }
    SUBCASE("extreme negative path empties the snapshots") {
        Eigen::MatrixXd paths(5, 8);
        paths.setConstant(-20.0);
        const TemporalNetwork data = simulate_networks(BetaSimulator{}, paths, 1);
        for (const auto& y : data.snapshots) CHECK(edge_count(y) == 0);
    }
    SUBCASE("bit-identical under a fixed seed") {
        const DgpSpec dgp = make_edges_gwesp_dgp(DgpKind::Sine, 8, 3);
        const ErgmSimulator sim = make_edges_gwesp_simulator(8);
        const Eigen::MatrixXd paths = generate_paths(dgp);
        const TemporalNetwork a = simulate_networks(sim, paths, 12);
        const TemporalNetwork b = simulate_networks(sim, paths, 12);
        REQUIRE(a.n_snapshots() == b.n_snapshots());
        for (int t = 0; t < a.n_snapshots(); ++t) CHECK(a.snapshots[t] == b.snapshots[t]);
    }
    SUBCASE("warm-start chains produce the right number of snapshots") {
        DgpSpec dgp = make_edges_gwesp_dgp(DgpKind::Const, 6, 3);
        ErgmSimulator sim = make_edges_gwesp_simulator(8);
        sim.warm_start = true;
        const TemporalNetwork data = simulate_networks(sim, generate_paths(dgp), 4);
        CHECK(data.n_snapshots() == 6);
    }
}

TEST_CASE("make_beta_dgp ties the pieces together") {
    const DgpSpec spec = make_beta_dgp(DgpKind::Sine, 10, 3, 8, 50, 7);
    CHECK(spec.theta0.size() == 20);
    CHECK(spec.varying.size() == 20);
    CHECK(((spec.theta1 + spec.theta2) - 2.0 * spec.theta0).lpNorm<Eigen::Infinity>() < 1e-12);
    // bounds built per direction half: the in-half excursion at the last
    // in-index uses the in-half backward difference, not the out-half head
    const auto [in1, in2] = build_bounds(spec.theta0.head(10));
    CHECK((spec.theta1.head(10) - in1).lpNorm<Eigen::Infinity>() < 1e-14);
    CHECK((spec.theta2.head(10) - in2).lpNorm<Eigen::Infinity>() < 1e-14);
    CHECK_NOTHROW(generate_paths(spec));
}

TEST_CASE("simulate_sd_process matches the recursion") {
    const BetaParams theta0 = build_theta0_beta(6, 2, 4);
    SdStaticParams p;
    p.pooling = Pooling::PerParameter;
    p.alpha = Eigen::VectorXd::Constant(12, 0.05);
    p.beta = Eigen::VectorXd::Constant(12, 0.9);
    p.w = target_w(p.beta, theta0.stacked());
    Eigen::MatrixXd paths;
    const TemporalNetwork data =
        simulate_sd_process(BetaSimulator{}, p, theta0.stacked(), 30, 17, &paths);
    CHECK(data.n_snapshots() == 30);
    CHECK(paths.rows() == 30);
    // replay the recursion from the sampled snapshots
    Eigen::VectorXd theta = theta0.stacked();
    for (int t = 0; t < 30; ++t) {
        CHECK((paths.row(t).transpose() - theta).lpNorm<Eigen::Infinity>() < 1e-14);
        const BetaParams bp = BetaParams::from_stacked(theta);
        const Eigen::VectorXd s = beta_score(data.snapshots[t], bp);
        const Eigen::VectorXd f = beta_fisher_diag(bp);
        theta = sd_update(theta, s.array() / f.array().max(kFisherFloor).sqrt(), p);
    }
}
