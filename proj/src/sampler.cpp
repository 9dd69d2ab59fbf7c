#include "sdergm/sampler.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sdergm {

int dyad_count(int n, bool directed) { return directed ? n * (n - 1) : n * (n - 1) / 2; }

std::vector<std::pair<int, int>> dyad_order(int n, bool directed) {
    std::vector<std::pair<int, int>> order;
    order.reserve(dyad_count(n, directed));
    for (int i = 0; i < n; ++i)
        for (int j = directed ? 0 : i + 1; j < n; ++j)
            if (i != j) order.emplace_back(i, j);
    return order;
}

Adjacency decode_graph(std::uint64_t code, int n, bool directed) {
    Adjacency y(n, directed);
    const auto order = dyad_order(n, directed);
    for (std::size_t k = 0; k < order.size(); ++k)
        if ((code >> k) & 1ull) y.set(order[k].first, order[k].second, true);
    return y;
}

std::uint64_t encode_graph(const Adjacency& y) {
    const auto order = dyad_order(y.n(), y.directed());
    if (order.size() > 63) throw std::invalid_argument("encode_graph: too many dyads");
    std::uint64_t code = 0;
    for (std::size_t k = 0; k < order.size(); ++k)
        if (y.at(order[k].first, order[k].second)) code |= 1ull << k;
    return code;
}

PmfTable enumerate_pmf(const ErgmSpec& spec, const Eigen::VectorXd& theta, int n) {
    if (spec.directed ? n > 5 : n > 6)
        throw std::invalid_argument("enumerate_pmf: node count above the enumeration bound");
    if (theta.size() != spec.n_stats())
        throw std::invalid_argument("enumerate_pmf: theta length mismatch");
    const int dyads = dyad_count(n, spec.directed);
    const std::uint64_t total = 1ull << dyads;

    PmfTable table;
    table.n = n;
    table.directed = spec.directed;
    table.log_prob.resize(total);

    // unnormalized log weights, then log-sum-exp
    double max_w = -std::numeric_limits<double>::infinity();
    for (std::uint64_t code = 0; code < total; ++code) {
        const Adjacency y = decode_graph(code, n, spec.directed);
        double w = 0.0;
        for (int s = 0; s < spec.n_stats(); ++s)
            w += theta[s] * statistic_value(spec.stats[s], y);
        table.log_prob[code] = w;
        max_w = std::max(max_w, w);
    }
    double sum = 0.0;
    for (double w : table.log_prob) sum += std::exp(w - max_w);
    table.log_k = max_w + std::log(sum);
    for (double& w : table.log_prob) w -= table.log_k;
    return table;
}

void mcmc_sweeps(const ErgmSpec& spec, const Eigen::VectorXd& theta, Adjacency& y, int sweeps,
                 Rng& rng) {
    const auto order = dyad_order(y.n(), y.directed());
    const std::size_t dyads = order.size();
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (std::size_t step = 0; step < dyads; ++step) {
            const auto [i, j] = order[rng.uniform_index(dyads)];
            double delta_ll = 0.0;
            for (int s = 0; s < spec.n_stats(); ++s)
                delta_ll += theta[s] * change_statistic(spec.stats[s], y, i, j);
            const bool present = y.at(i, j);
            if (present) delta_ll = -delta_ll;
            if (delta_ll >= 0.0 || rng.uniform() < std::exp(delta_ll)) y.set(i, j, !present);
        }
    }
}

std::vector<Adjacency> sample_mcmc(const ErgmSpec& spec, const Eigen::VectorXd& theta, int n,
                                   int count, std::uint64_t seed, const McmcConfig& config) {
    if (count < 1) throw std::invalid_argument("sample_mcmc: count must be >= 1");
    if (theta.size() != spec.n_stats())
        throw std::invalid_argument("sample_mcmc: theta length mismatch");
    Rng rng(seed);
    Adjacency y(n, spec.directed);
    mcmc_sweeps(spec, theta, y, config.burn_in_sweeps, rng);
    std::vector<Adjacency> out;
    out.reserve(count);
    out.push_back(y);
    for (int k = 1; k < count; ++k) {
        mcmc_sweeps(spec, theta, y, config.thin_sweeps, rng);
        out.push_back(y);
    }
    return out;
}

}  // namespace sdergm
