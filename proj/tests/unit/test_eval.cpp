#include <cmath>
#include <doctest.h>

#include "sdergm/dgp.hpp"
#include "sdergm/eval.hpp"

using namespace sdergm;

TEST_CASE("rmse follows the table scale") {
    Eigen::Vector4d truth(1, 2, 3, 4);
    CHECK(rmse(truth, truth) == 0.0);

    Eigen::Vector4d est = truth + Eigen::Vector4d(1, -1, 1, -1);
    CHECK(rmse(truth, est) == doctest::Approx(0.5));  // (1/4) * sqrt(4)
    CHECK(rmse_conventional(truth, est) == doctest::Approx(1.0));

    // constant error e over T points: e / sqrt(T)
    const int t_max = 9;
    Eigen::VectorXd a = Eigen::VectorXd::Zero(t_max);
    Eigen::VectorXd b = Eigen::VectorXd::Constant(t_max, 0.3);
    CHECK(rmse(a, b) == doctest::Approx(0.3 / 3.0));

    CHECK_THROWS(rmse(Eigen::Vector2d(0, 0), Eigen::Vector3d(0, 0, 0)));

    // linear in a common error scale
    CHECK(rmse(a, 2.0 * b) == doctest::Approx(2.0 * rmse(a, b)));
}

TEST_CASE("roc_auc") {
    SUBCASE("perfect scores") {
        const RocResult r = roc_auc({0.0, 1.0, 1.0, 0.0}, {0, 1, 1, 0});
        CHECK(r.auc == doctest::Approx(1.0));
    }
    SUBCASE("constant scores are ties at one half") {
        const RocResult r = roc_auc({0.7, 0.7, 0.7, 0.7}, {0, 1, 1, 0});
        CHECK(r.auc == doctest::Approx(0.5));
    }
    SUBCASE("hand-ranked example") {
        const RocResult r = roc_auc({0.9, 0.4, 0.6}, {1, 0, 1});
        CHECK(r.auc == doctest::Approx(1.0));
    }
    SUBCASE("undefined when one class is empty") {
        CHECK_THROWS(roc_auc({0.1, 0.9}, {1, 1}));
        CHECK_THROWS(roc_auc({0.1, 0.9}, {0, 0}));
    }
    SUBCASE("invariant under strictly increasing transforms") {
        std::vector<double> scores{0.1, 0.7, 0.3, 0.9, 0.5, 0.2};
        const std::vector<int> labels{0, 1, 0, 1, 1, 0};
        const double base = roc_auc(scores, labels).auc;
        std::vector<double> mapped;
        for (double s : scores) mapped.push_back(std::exp(3.0 * s) - 2.0);
        CHECK(roc_auc(mapped, labels).auc == doctest::Approx(base));
    }
    SUBCASE("roc endpoints") {
        const RocResult r = roc_auc({0.2, 0.8, 0.5}, {0, 1, 1});
        CHECK(r.points.front().first == 0.0);
        CHECK(r.points.front().second == 0.0);
        CHECK(r.points.back().first == 1.0);
        CHECK(r.points.back().second == 1.0);
    }
}

TEST_CASE("ever_present_dyads masks always-zero links") {
    TemporalNetwork data;
    data.node_names = {"a", "b", "c"};
    Adjacency y1(3, true), y2(3, true);
    y1.set(0, 1, true);
    y2.set(0, 1, true);
    y2.set(2, 0, true);
    data.snapshots = {y1, y2};
    data.active = {std::vector<bool>(3, true), std::vector<bool>(3, true)};
    data.times = {1, 2};
    const auto dyads = ever_present_dyads(data);
    REQUIRE(dyads.size() == 2);
    CHECK(dyads[0] == std::pair<int, int>(0, 1));
    CHECK(dyads[1] == std::pair<int, int>(2, 0));
}

TEST_CASE("run_filter_experiment is deterministic and orders the methods sanely") {
    const DgpSpec dgp = make_beta_dgp(DgpKind::Sine, 8, 2, 5, 60, 99);
    ExperimentOptions options;
    options.pooling = Pooling::PooledByDirection;
    const FilterExperimentReport a = run_filter_experiment(dgp, BetaSimulator{}, options, 2, 7);
    const FilterExperimentReport b = run_filter_experiment(dgp, BetaSimulator{}, options, 2, 7);
    CHECK(a.sd_rmse == b.sd_rmse);
    CHECK(a.cross_rmse == b.cross_rmse);
    CHECK(a.sd_per_replica == b.sd_per_replica);
    CHECK(a.sd_rmse > 0.0);
    CHECK(a.cross_rmse > 0.0);
    CHECK(std::isfinite(a.static_rmse));
    CHECK(a.sd_rmse_by_param.size() == 16);
    // table scale vs conventional scale
    CHECK(a.sd_rmse < a.sd_rmse_conv);
}

TEST_CASE("run_lm_experiment reports rates per parameter") {
    const DgpSpec dgp = make_edges_gwesp_dgp(DgpKind::Const, 40, 3);
    const ErgmSimulator sim = make_edges_gwesp_simulator(10);
    ExperimentOptions options;
    const LmExperimentReport r = run_lm_experiment(dgp, sim, 0.05, options, 4, 11);
    CHECK(r.rejection_rate.size() == 2);
    for (int s = 0; s < 2; ++s) {
        CHECK(r.rejection_rate[s] >= 0.0);
        CHECK(r.rejection_rate[s] <= 1.0);
        for (double p : r.p_values[s]) {
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
        }
    }
}

TEST_CASE("run_forecast_experiment smoke") {
    const BetaParams theta0 = build_theta0_beta(8, 2, 5);
    SdStaticParams gen;
    gen.pooling = Pooling::PooledByDirection;
    gen.alpha = Eigen::Vector2d(0.12, 0.12);
    gen.beta = Eigen::Vector2d(0.97, 0.97);
    gen.w = target_w(Eigen::VectorXd::Constant(16, 0.97), theta0.stacked());
    const TemporalNetwork data =
        simulate_sd_process(BetaSimulator{}, gen, theta0.stacked(), 46, 5);

    ExperimentOptions options;
    const ForecastExperimentReport r = run_forecast_experiment(data, 30, 3, 5, options, 21);
    CHECK(r.n_rolls == 14);
    CHECK(r.sd_auc.size() == 3);
    for (int h = 0; h < 3; ++h) {
        CHECK(r.sd_auc[h] > 0.0);
        CHECK(r.sd_auc[h] <= 1.0);
        CHECK(r.naive_auc[h] > 0.0);
        CHECK(r.ar1_auc[h] > 0.0);
    }
    const ForecastExperimentReport again =
        run_forecast_experiment(data, 30, 3, 5, options, 21);
    CHECK(again.sd_auc == r.sd_auc);
    CHECK(again.naive_auc == r.naive_auc);
    CHECK(again.ar1_auc == r.ar1_auc);
}
