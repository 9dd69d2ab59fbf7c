#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "sdergm/adjacency.hpp"
#include "sdergm/beta_model.hpp"
#include "sdergm/sampler.hpp"
#include "sdergm/sd_filter.hpp"

namespace sdergm {

enum class DgpKind { Const, Steps, Sine, Ar1 };

// Parameter-path construction for the validation experiments. Odd-indexed
// parameters vary by default, even-indexed ones stay pinned at theta0.
struct DgpSpec {
    DgpKind kind = DgpKind::Const;
    Eigen::VectorXd theta0;
    Eigen::VectorXd theta1;         // per-parameter lower anchor of the excursion
    Eigen::VectorXd theta2;         // per-parameter upper anchor
    std::vector<bool> varying;      // which parameters move
    Eigen::VectorXd phases;         // Sine only; one per parameter
    double ar_coeff = 0.99;
    double ar_sigma = 0.1;
    int horizon = 250;
    std::uint64_t seed = 0;         // drives the Ar1 innovations

    void validate() const;
};

std::vector<bool> default_varying_mask(int k);

// phases uniform on [0, 2 pi)
Eigen::VectorXd random_phases(int k, std::uint64_t seed);

// Baseline beta parameters for a network whose in- and out-degrees
// interpolate linearly between d_min and d_max: targets are rounded,
// links allocated greedily largest-out to largest-in (unallocatable
// leftovers dropped), and the static model fitted to the result.
BetaParams build_theta0_beta(int n, int d_min, int d_max);

// Excursion anchors: c_s evenly spaced in [c_lo, c_hi],
// theta1_s = theta0_s + c_s (theta0_{s+1} - theta0_s) and theta2_s the
// mirror image; the last index uses the backward difference.
std::pair<Eigen::VectorXd, Eigen::VectorXd> build_bounds(const Eigen::VectorXd& theta0,
                                                         double c_lo = 0.4, double c_hi = 1.0);

// Full beta-model DGP: fitted theta0, bounds built separately for the in-
// and out-halves, fresh phases. Seed fixes phases and the Ar1 noise.
DgpSpec make_beta_dgp(DgpKind kind, int n, int d_min, int d_max, int horizon,
                      std::uint64_t seed);

// T x K matrix of parameter values, row t = parameters at time t+1.
Eigen::MatrixXd generate_paths(const DgpSpec& spec);

// How simulated snapshots are drawn from a parameter path.
struct BetaSimulator {};
struct ErgmSimulator {
    ErgmSpec spec;
    int n_nodes = 0;
    McmcConfig mcmc;
    bool warm_start = false;  // continue one chain across snapshots
    int step_sweeps = 30;     // sweeps between snapshots when warm
};
using SimulatorSpec = std::variant<BetaSimulator, ErgmSimulator>;

// One snapshot per path row; deterministic given the seed. Node names are
// zero-padded so registry order equals index order.
TemporalNetwork simulate_networks(const SimulatorSpec& sim, const Eigen::MatrixXd& paths,
                                  std::uint64_t seed);

// The score-driven recursion used as the data generator: sample a
// snapshot, update the parameters with its scaled score, repeat. If
// out_paths is given it receives the generated parameter path.
TemporalNetwork simulate_sd_process(const SimulatorSpec& sim, const SdStaticParams& params,
                                    const Eigen::VectorXd& theta_init, int horizon,
                                    std::uint64_t seed, Eigen::MatrixXd* out_paths = nullptr);

}  // namespace sdergm
