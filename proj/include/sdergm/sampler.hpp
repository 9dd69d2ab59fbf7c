#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sdergm/adjacency.hpp"
#include "sdergm/ergm_pseudo.hpp"
#include "sdergm/rng.hpp"

namespace sdergm {

// Exact PMF over all graphs of a small node set. Graph codes pack the
// dyads in row-major (i,j) order, i != j for directed and i < j for
// undirected; bit k of the code is dyad k.
struct PmfTable {
    std::vector<double> log_prob;  // indexed by graph code
    double log_k = 0.0;            // log normalization
    int n = 0;
    bool directed = true;

    double prob(std::uint64_t code) const { return std::exp(log_prob[code]); }
    std::size_t n_graphs() const { return log_prob.size(); }
};

int dyad_count(int n, bool directed);
std::vector<std::pair<int, int>> dyad_order(int n, bool directed);
Adjacency decode_graph(std::uint64_t code, int n, bool directed);
std::uint64_t encode_graph(const Adjacency& y);

// Full enumeration of the ERGM PMF; n <= 5 directed, n <= 6 undirected.
PmfTable enumerate_pmf(const ErgmSpec& spec, const Eigen::VectorXd& theta, int n);

struct McmcConfig {
    int burn_in_sweeps = 100;  // one sweep = one proposed toggle per dyad
    int thin_sweeps = 10;
};

// Metropolis sampler on single-dyad toggles; acceptance uses the change
// statistics incrementally. Deterministic given the seed.
std::vector<Adjacency> sample_mcmc(const ErgmSpec& spec, const Eigen::VectorXd& theta, int n,
                                   int count, std::uint64_t seed, const McmcConfig& config = {});

// Continues a chain from a given state: runs `sweeps` sweeps in place.
void mcmc_sweeps(const ErgmSpec& spec, const Eigen::VectorXd& theta, Adjacency& y, int sweeps,
                 Rng& rng);

}  // namespace sdergm
