#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "sdergm/adjacency.hpp"

namespace sdergm {

// Network statistics available as ERGM sufficient statistics.
struct EdgesStat {};
struct GwespStat {
    double decay = 0.5;  // lambda, fixed (not estimated)
};
struct OutDegreeStat {
    int node = 0;
};
struct InDegreeStat {
    int node = 0;
};

using StatisticKind = std::variant<EdgesStat, GwespStat, OutDegreeStat, InDegreeStat>;

std::string statistic_name(const StatisticKind& kind);
bool statistic_equal(const StatisticKind& a, const StatisticKind& b);

struct Degrees {
    std::vector<int> out;  // out_i = sum_j Y_ij
    std::vector<int> in;   // in_i  = sum_j Y_ji
};

Degrees degrees(const Adjacency& y);

// Number of links: sum over ordered dyads if directed, unordered if not.
long long edge_count(const Adjacency& y);

// ESP_k = number of edges whose endpoints share exactly k neighbors,
// k = 1..n-2. Undirected input only; pass symmetrize=true to accept a
// directed matrix as its undirected support Y|Y^T.
std::vector<long long> esp_counts(const Adjacency& y, bool symmetrize = false);

// GWESP(Y) = e^l * sum_k [1 - (1 - e^-l)^k] * ESP_k(Y)
double gwesp(const Adjacency& y, double decay, bool symmetrize = false);

// Value of a single statistic on Y.
double statistic_value(const StatisticKind& kind, const Adjacency& y);

// h(Y with dyad forced present) - h(Y with dyad forced absent). Independent
// of the current value of Y_ij; for undirected statistics the toggle flips
// both (i,j) and (j,i).
double change_statistic(const StatisticKind& kind, const Adjacency& y, int i, int j);

}  // namespace sdergm
