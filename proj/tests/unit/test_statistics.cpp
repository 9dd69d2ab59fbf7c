#include <cmath>
#include <doctest.h>

#include "helpers.hpp"
#include "sdergm/statistics.hpp"

using namespace sdergm;
using test::change_by_recompute;
using test::random_graph;

namespace {

Adjacency triangle() {
    Adjacency y(3, false);
    y.set(0, 1, true);
    y.set(1, 2, true);
    y.set(0, 2, true);
    return y;
}

Adjacency complete(int n, bool directed) {
    Adjacency y(n, directed);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) y.set(i, j, true);
    return y;
}

}  // namespace

TEST_CASE("adjacency basics") {
    Adjacency y(3, true);
    CHECK_THROWS(y.set(1, 1, true));
    y.set(0, 1, true);
    CHECK(y.at(0, 1));
    CHECK(!y.at(1, 0));

    Adjacency u(3, false);
    u.set(0, 2, true);
    CHECK(u.at(2, 0));  // undirected writes both triangles

    CHECK_THROWS(Adjacency(1, true));
}

TEST_CASE("degrees") {
    SUBCASE("empty graph") {
        const Degrees d = degrees(Adjacency(3, true));
        CHECK(d.out == std::vector<int>{0, 0, 0});
        CHECK(d.in == std::vector<int>{0, 0, 0});
    }
    SUBCASE("hand-counted graph") {
        // links 0->1, 1->0, 0->2
        Adjacency y(3, true);
        y.set(0, 1, true);
        y.set(1, 0, true);
        y.set(0, 2, true);
        const Degrees d = degrees(y);
        CHECK(d.out == std::vector<int>{2, 1, 0});
        CHECK(d.in == std::vector<int>{1, 1, 1});
    }
    SUBCASE("complete directed graph") {
        const Degrees d = degrees(complete(4, true));
        for (int i = 0; i < 4; ++i) {
            CHECK(d.out[i] == 3);
            CHECK(d.in[i] == 3);
        }
    }
    SUBCASE("degree sums equal the edge count") {
        Rng rng(11);
        for (int rep = 0; rep < 20; ++rep) {
            const Adjacency y = random_graph(2 + rep % 7, true, 0.4, rng);
            const Degrees d = degrees(y);
            long long out_sum = 0, in_sum = 0;
            for (int v : d.out) out_sum += v;
            for (int v : d.in) in_sum += v;
            CHECK(out_sum == edge_count(y));
            CHECK(in_sum == edge_count(y));
        }
    }
}

TEST_CASE("edge_count") {
    CHECK(edge_count(Adjacency(4, true)) == 0);
    Adjacency cycle(4, true);
    cycle.set(0, 1, true);
    cycle.set(1, 2, true);
    cycle.set(2, 3, true);
    cycle.set(3, 0, true);
    CHECK(edge_count(cycle) == 4);
    CHECK(edge_count(triangle()) == 3);
}

TEST_CASE("esp_counts") {
    SUBCASE("empty graph") {
        const auto esp = esp_counts(Adjacency(5, false));
        for (long long v : esp) CHECK(v == 0);
    }
    SUBCASE("triangle") {
        const auto esp = esp_counts(triangle());
        CHECK(esp[0] == 3);
    }
    SUBCASE("complete n=4: every edge shares both remaining nodes") {
        const auto esp = esp_counts(complete(4, false));
        CHECK(esp[0] == 0);
        CHECK(esp[1] == 6);
    }
    SUBCASE("directed input needs the symmetrization flag") {
        const Adjacency y(3, true);
        CHECK_THROWS(esp_counts(y));
        CHECK_NOTHROW(esp_counts(y, true));
    }
    SUBCASE("totals bounded by the edge count") {
        Rng rng(5);
        for (int rep = 0; rep < 30; ++rep) {
            const Adjacency y = random_graph(3 + rep % 6, false, 0.5, rng);
            const auto esp = esp_counts(y);
            long long total = 0;
            for (long long v : esp) total += v;
            CHECK(total <= edge_count(y));
        }
    }
}

TEST_CASE("gwesp") {
    CHECK(gwesp(Adjacency(4, false), 0.5) == 0.0);
    for (double lambda : {0.1, 0.5, 2.0})
        CHECK(gwesp(triangle(), lambda) == doctest::Approx(3.0).epsilon(1e-12));
    // complete graph n=4, evaluated independently from the per-edge weights
    const double expected = 6.0 * std::exp(0.5) * (1.0 - std::pow(1.0 - std::exp(-0.5), 2));
    CHECK(gwesp(complete(4, false), 0.5) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(8.3608).epsilon(1e-4));
    CHECK_THROWS(gwesp(Adjacency(3, false), std::nan("")));
}

TEST_CASE("gwesp bounded by e^lambda * edges") {
    Rng rng(42);
    for (int rep = 0; rep < 30; ++rep) {
        const Adjacency y = random_graph(4 + rep % 5, false, 0.6, rng);
        const double g = gwesp(y, 0.5);
        CHECK(g >= 0.0);
        CHECK(g <= std::exp(0.5) * static_cast<double>(edge_count(y)) + 1e-12);
    }
}

TEST_CASE("change_statistic basics") {
    const Adjacency empty(4, false);
    CHECK(change_statistic(EdgesStat{}, empty, 0, 1) == 1.0);
    CHECK(change_statistic(GwespStat{0.5}, empty, 0, 1) == 0.0);
    CHECK_THROWS(change_statistic(EdgesStat{}, empty, 2, 2));

    // closing the triangle over the path 0-1-2 gives each of 3 edges one
    // shared partner: delta = 3 g(1) = 3 for any lambda
    Adjacency path(3, false);
    path.set(0, 1, true);
    path.set(1, 2, true);
    for (double lambda : {0.3, 0.5, 1.7})
        CHECK(change_statistic(GwespStat{lambda}, path, 0, 2) ==
              doctest::Approx(3.0).epsilon(1e-12));

    Adjacency dir(3, true);
    CHECK(change_statistic(OutDegreeStat{0}, dir, 0, 1) == 1.0);
    CHECK(change_statistic(OutDegreeStat{1}, dir, 0, 1) == 0.0);
    CHECK(change_statistic(InDegreeStat{1}, dir, 0, 1) == 1.0);
    CHECK(change_statistic(InDegreeStat{0}, dir, 0, 1) == 0.0);
}

TEST_CASE("change_statistic equals from-scratch recomputation") {
    Rng rng(7);
    for (int rep = 0; rep < 25; ++rep) {
        const int n = 3 + rep % 6;  // up to 8
        const Adjacency y = random_graph(n, false, 0.45, rng);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                CHECK(change_statistic(GwespStat{0.5}, y, i, j) ==
                      doctest::Approx(change_by_recompute(GwespStat{0.5}, y, i, j))
                          .epsilon(1e-10));
                CHECK(change_statistic(EdgesStat{}, y, i, j) ==
                      doctest::Approx(change_by_recompute(EdgesStat{}, y, i, j)));
            }
        const Adjacency d = random_graph(n, true, 0.45, rng);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                for (int node = 0; node < n; ++node) {
                    CHECK(change_statistic(OutDegreeStat{node}, d, i, j) ==
                          doctest::Approx(change_by_recompute(OutDegreeStat{node}, d, i, j)));
                    CHECK(change_statistic(InDegreeStat{node}, d, i, j) ==
                          doctest::Approx(change_by_recompute(InDegreeStat{node}, d, i, j)));
                }
            }
    }
}

TEST_CASE("change_statistic is independent of the current dyad value") {
    Rng rng(19);
    for (int rep = 0; rep < 10; ++rep) {
        Adjacency y = random_graph(6, false, 0.5, rng);
        Adjacency with = y, without = y;
        with.set(1, 4, true);
        without.set(1, 4, false);
        CHECK(change_statistic(GwespStat{0.5}, with, 1, 4) ==
              doctest::Approx(change_statistic(GwespStat{0.5}, without, 1, 4)).epsilon(1e-12));
    }
}

TEST_CASE("gwesp is monotone under edge addition for nonnegative decay") {
    Rng rng(23);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 4 + rep % 5;
        Adjacency y = random_graph(n, false, 0.4, rng);
        const double before = gwesp(y, 0.5);
        // add the first absent dyad
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (!y.at(i, j)) {
                    y.set(i, j, true);
                    CHECK(gwesp(y, 0.5) >= before - 1e-12);
                    y.set(i, j, false);
                }
    }
}

TEST_CASE("symmetrized support") {
    Adjacency y(3, true);
    y.set(0, 1, true);
    const Adjacency u = y.symmetrized();
    CHECK(u.at(0, 1));
    CHECK(u.at(1, 0));
    CHECK(edge_count(u) == 1);
}
