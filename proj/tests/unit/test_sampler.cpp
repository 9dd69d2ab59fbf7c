#include <algorithm>
#include <cmath>
#include <doctest.h>
#include <map>

#include "helpers.hpp"
#include "sdergm/beta_model.hpp"
#include "sdergm/sampler.hpp"

using namespace sdergm;

TEST_CASE("enumerate_pmf") {
    SUBCASE("two nodes, edges statistic, zero parameter") {
        const ErgmSpec spec({EdgesStat{}}, true);
        const PmfTable table = enumerate_pmf(spec, Eigen::VectorXd::Zero(1), 2);
        CHECK(table.n_graphs() == 4);
        for (std::size_t code = 0; code < 4; ++code)
            CHECK(table.prob(code) == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(table.log_k == doctest::Approx(std::log(4.0)).epsilon(1e-14));
    }
    SUBCASE("independence factorization of the normalization") {
        const ErgmSpec spec({EdgesStat{}}, true);
        for (double t1 : {-1.5, 0.0, 0.8}) {
            for (int n : {2, 3}) {
                const PmfTable table =
                    enumerate_pmf(spec, Eigen::VectorXd::Constant(1, t1), n);
                const double expected = n * (n - 1) * std::log1p(std::exp(t1));
                CHECK(table.log_k == doctest::Approx(expected).epsilon(1e-12));
            }
        }
    }
    SUBCASE("probabilities sum to one") {
        const ErgmSpec spec({EdgesStat{}, GwespStat{0.5}}, false);
        const PmfTable table = enumerate_pmf(spec, Eigen::Vector2d(-1.0, 0.5), 5);
        double total = 0.0;
        for (std::size_t code = 0; code < table.n_graphs(); ++code) total += table.prob(code);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("degree-statistic spec reproduces the beta model") {
        Rng rng(127);
        const int n = 3;
        const ErgmSpec spec = beta_model_spec(n);
        Eigen::VectorXd theta(2 * n);
        for (int k = 0; k < 2 * n; ++k) theta[k] = (rng.uniform() - 0.5) * 2;
        const PmfTable table = enumerate_pmf(spec, theta, n);
        const BetaParams bp = BetaParams::from_stacked(theta);
        for (std::uint64_t code = 0; code < table.n_graphs(); ++code) {
            const Adjacency y = decode_graph(code, n, true);
            CHECK(table.log_prob[code] ==
                  doctest::Approx(beta_log_likelihood(y, bp)).epsilon(1e-10));
        }
    }
    SUBCASE("stable normalization at the enumeration bound") {
        const ErgmSpec spec({EdgesStat{}}, true);
        for (double t1 : {-20.0, 20.0}) {
            const PmfTable table = enumerate_pmf(spec, Eigen::VectorXd::Constant(1, t1), 5);
            CHECK(std::isfinite(table.log_k));
        }
    }
    SUBCASE("node bound enforced") {
        const ErgmSpec directed({EdgesStat{}}, true);
        CHECK_THROWS(enumerate_pmf(directed, Eigen::VectorXd::Zero(1), 6));
        const ErgmSpec undirected({EdgesStat{}}, false);
        CHECK_NOTHROW(enumerate_pmf(undirected, Eigen::VectorXd::Zero(1), 6));
        CHECK_THROWS(enumerate_pmf(undirected, Eigen::VectorXd::Zero(1), 7));
    }
}

TEST_CASE("graph codes") {
    Rng rng(131);
    for (int rep = 0; rep < 10; ++rep) {
        const Adjacency y = test::random_graph(4, rep % 2 == 0, 0.5, rng);
        CHECK(decode_graph(encode_graph(y), 4, y.directed()) == y);
    }
}

TEST_CASE("sample_mcmc") {
    SUBCASE("identical seeds give identical streams") {
        const ErgmSpec spec({EdgesStat{}, GwespStat{0.5}}, false);
        const auto a = sample_mcmc(spec, Eigen::Vector2d(-0.5, 0.3), 6, 5, 99);
        const auto b = sample_mcmc(spec, Eigen::Vector2d(-0.5, 0.3), 6, 5, 99);
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
        const auto c = sample_mcmc(spec, Eigen::Vector2d(-0.5, 0.3), 6, 5, 100);
        bool all_equal = true;
        for (std::size_t k = 0; k < a.size(); ++k) all_equal = all_equal && a[k] == c[k];
        CHECK(!all_equal);
    }
    SUBCASE("zero parameters: uniform over graphs, density one half") {
        const ErgmSpec spec({EdgesStat{}}, true);
        const auto draws = sample_mcmc(spec, Eigen::VectorXd::Zero(1), 5, 2000, 7);
        double total = 0.0;
        for (const auto& y : draws) total += static_cast<double>(edge_count(y));
        const double dyads = 20.0;
        const double mean_density = total / (2000.0 * dyads);
        // se of the mean density ~ sqrt(0.25/ (2000*20)) assuming near-independence
        CHECK(std::abs(mean_density - 0.5) < 3.0 * std::sqrt(0.25 / (2000.0 * dyads)) + 0.01);
    }
    SUBCASE("matches enumeration in total variation") {
        const ErgmSpec spec({EdgesStat{}, GwespStat{0.5}}, false);
        const Eigen::Vector2d theta(-1.0, 0.5);
        const PmfTable exact = enumerate_pmf(spec, theta, 4);
        const int count = 20000;
        const auto draws = sample_mcmc(spec, theta, 4, count, 11);
        std::vector<double> freq(exact.n_graphs(), 0.0);
        for (const auto& y : draws) freq[encode_graph(y)] += 1.0 / count;
        double tv = 0.0;
        for (std::size_t code = 0; code < exact.n_graphs(); ++code)
            tv += std::abs(freq[code] - exact.prob(code));
        CHECK(tv / 2.0 < 0.05);
    }
}

TEST_CASE("sample_beta") {
    SUBCASE("extreme parameters empty the graph") {
        const BetaParams theta{Eigen::VectorXd::Constant(5, -20.0),
                               Eigen::VectorXd::Constant(5, -20.0)};
        CHECK(edge_count(sample_beta(theta, 3)) == 0);
    }
    SUBCASE("zero parameters fill half the dyads") {
        const BetaParams theta{Eigen::VectorXd::Zero(6), Eigen::VectorXd::Zero(6)};
        long long total = 0;
        const int reps = 2000;
        for (int rep = 0; rep < reps; ++rep) total += edge_count(sample_beta(theta, rep));
        const double density = static_cast<double>(total) / (reps * 30.0);
        CHECK(std::abs(density - 0.5) < 3.0 * std::sqrt(0.25 / (reps * 30.0)));
    }
    SUBCASE("expected degrees match the analytic means") {
        Rng prng(137);
        BetaParams theta{Eigen::VectorXd(4), Eigen::VectorXd(4)};
        for (int i = 0; i < 4; ++i) {
            theta.theta_in[i] = (prng.uniform() - 0.5) * 2;
            theta.theta_out[i] = (prng.uniform() - 0.5) * 2;
        }
        const Eigen::MatrixXd p = link_prob_matrix(theta);
        const int reps = 10000;
        Eigen::VectorXd mean_out = Eigen::VectorXd::Zero(4);
        for (int rep = 0; rep < reps; ++rep) {
            const Degrees d = degrees(sample_beta(theta, 10000 + rep));
            for (int i = 0; i < 4; ++i) mean_out[i] += static_cast<double>(d.out[i]) / reps;
        }
        for (int i = 0; i < 4; ++i) {
            double var = 0.0;
            for (int j = 0; j < 4; ++j)
                if (i != j) var += p(i, j) * (1 - p(i, j));
            CHECK(std::abs(mean_out[i] - p.row(i).sum()) < 3.0 * std::sqrt(var / reps));
        }
    }
    SUBCASE("deterministic in the seed") {
        const BetaParams theta{Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(5)};
        CHECK(sample_beta(theta, 42) == sample_beta(theta, 42));
    }
}
