#include "sdergm/statistics.hpp"

#include <stdexcept>

namespace sdergm {

std::string statistic_name(const StatisticKind& kind) {
    if (std::holds_alternative<EdgesStat>(kind)) return "edges";
    if (const auto* g = std::get_if<GwespStat>(&kind))
        return "gwesp(" + std::to_string(g->decay) + ")";
    if (const auto* o = std::get_if<OutDegreeStat>(&kind))
        return "out_degree(" + std::to_string(o->node) + ")";
    const auto& d = std::get<InDegreeStat>(kind);
    return "in_degree(" + std::to_string(d.node) + ")";
}

bool statistic_equal(const StatisticKind& a, const StatisticKind& b) {
    if (a.index() != b.index()) return false;
    if (const auto* g = std::get_if<GwespStat>(&a))
        return g->decay == std::get<GwespStat>(b).decay;
    if (const auto* o = std::get_if<OutDegreeStat>(&a))
        return o->node == std::get<OutDegreeStat>(b).node;
    if (const auto* i = std::get_if<InDegreeStat>(&a))
        return i->node == std::get<InDegreeStat>(b).node;
    return true;
}

Degrees degrees(const Adjacency& y) {
    const int n = y.n();
    Degrees d;
    d.out.assign(n, 0);
    d.in.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        d.out[i] = y.row_degree(i);
        for (int j = 0; j < n; ++j)
            if (y.at(j, i)) ++d.in[i];
    }
    return d;
}

long long edge_count(const Adjacency& y) {
    long long total = 0;
    for (int i = 0; i < y.n(); ++i) total += y.row_degree(i);
    return y.directed() ? total : total / 2;
}

namespace {

const Adjacency& as_undirected(const Adjacency& y, bool symmetrize, Adjacency& storage) {
    if (!y.directed()) return y;
    if (!symmetrize)
        throw std::invalid_argument(
            "shared-partner statistics are defined on undirected graphs; "
            "symmetrize the directed matrix to its support Y|Y^T first "
            "(or pass symmetrize=true where available)");
    storage = y.symmetrized();
    return storage;
}

// Per-edge weight of GWESP as a function of its shared-partner count:
// g(k) = e^l (1 - (1 - e^-l)^k), g(0) = 0.
inline double gwesp_edge_weight(int k, double decay) {
    if (k <= 0) return 0.0;
    return std::exp(decay) * (1.0 - std::pow(1.0 - std::exp(-decay), k));
}

}  // namespace

std::vector<long long> esp_counts(const Adjacency& y, bool symmetrize) {
    Adjacency storage(2, false);
    const Adjacency& u = as_undirected(y, symmetrize, storage);
    const int n = u.n();
    std::vector<long long> esp(n >= 2 ? n - 2 : 0, 0);  // esp[k-1] = ESP_k
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (u.at(i, j)) {
                const int k = u.common_neighbors(i, j);
                if (k > 0) ++esp[k - 1];
            }
    return esp;
}

double gwesp(const Adjacency& y, double decay, bool symmetrize) {
    if (!std::isfinite(decay)) throw std::invalid_argument("gwesp: decay must be finite");
    Adjacency storage(2, false);
    const Adjacency& u = as_undirected(y, symmetrize, storage);
    const int n = u.n();
    double total = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (u.at(i, j)) total += gwesp_edge_weight(u.common_neighbors(i, j), decay);
    return total;
}

double statistic_value(const StatisticKind& kind, const Adjacency& y) {
    if (std::holds_alternative<EdgesStat>(kind))
        return static_cast<double>(edge_count(y));
    if (const auto* g = std::get_if<GwespStat>(&kind))
        return gwesp(y, g->decay);
    if (const auto* o = std::get_if<OutDegreeStat>(&kind))
        return static_cast<double>(y.row_degree(o->node));
    const auto& d = std::get<InDegreeStat>(kind);
    int c = 0;
    for (int j = 0; j < y.n(); ++j)
        if (y.at(j, d.node)) ++c;
    return static_cast<double>(c);
}

namespace {

// GWESP change for toggling undirected edge (i,j), evaluated on the graph
// with that edge absent. Only edges incident to a common neighbor of i and
// j change their shared-partner count, each by exactly one.
double gwesp_change(const Adjacency& u, double decay, int i, int j) {
    const int n = u.n();
    const bool present = u.at(i, j);
    // work on Y with (i,j) forced absent
    Adjacency base = u;
    if (present) base.set(i, j, false);

    double delta = 0.0;
    int cn = 0;
    for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (base.at(i, k) && base.at(j, k)) {
            ++cn;
            const int cik = base.common_neighbors(i, k);
            const int cjk = base.common_neighbors(j, k);
            delta += gwesp_edge_weight(cik + 1, decay) - gwesp_edge_weight(cik, decay);
            delta += gwesp_edge_weight(cjk + 1, decay) - gwesp_edge_weight(cjk, decay);
        }
    }
    delta += gwesp_edge_weight(cn, decay);
    return delta;
}

}  // namespace

double change_statistic(const StatisticKind& kind, const Adjacency& y, int i, int j) {
    if (i == j) throw std::invalid_argument("change_statistic: i must differ from j");
    if (std::holds_alternative<EdgesStat>(kind)) return 1.0;
    if (const auto* g = std::get_if<GwespStat>(&kind)) {
        if (y.directed())
            throw std::invalid_argument(
                "change_statistic: gwesp requires an undirected matrix "
                "(symmetrize the input first)");
        return gwesp_change(y, g->decay, i, j);
    }
    if (const auto* o = std::get_if<OutDegreeStat>(&kind)) {
        if (!y.directed()) return (i == o->node || j == o->node) ? 1.0 : 0.0;
        return i == o->node ? 1.0 : 0.0;
    }
    const auto& d = std::get<InDegreeStat>(kind);
    if (!y.directed()) return (i == d.node || j == d.node) ? 1.0 : 0.0;
    return j == d.node ? 1.0 : 0.0;
}

}  // namespace sdergm
