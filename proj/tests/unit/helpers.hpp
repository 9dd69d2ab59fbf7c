#pragma once

#include "sdergm/adjacency.hpp"
#include "sdergm/rng.hpp"
#include "sdergm/statistics.hpp"

namespace sdergm::test {

inline Adjacency random_graph(int n, bool directed, double density, Rng& rng) {
    Adjacency y(n, directed);
    for (int i = 0; i < n; ++i)
        for (int j = directed ? 0 : i + 1; j < n; ++j)
            if (i != j && rng.bernoulli(density)) y.set(i, j, true);
    return y;
}

// From-scratch change statistic: evaluate the statistic on the graph with
// the dyad forced present and forced absent. Independent of the
// incremental path under test.
inline double change_by_recompute(const StatisticKind& kind, const Adjacency& y, int i, int j) {
    Adjacency plus = y;
    plus.set(i, j, true);
    Adjacency minus = y;
    minus.set(i, j, false);
    return statistic_value(kind, plus) - statistic_value(kind, minus);
}

}  // namespace sdergm::test
