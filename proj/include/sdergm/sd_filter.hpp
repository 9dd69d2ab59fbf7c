#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <vector>

#include "sdergm/adjacency.hpp"
#include "sdergm/beta_model.hpp"
#include "sdergm/ergm_pseudo.hpp"
#include "sdergm/sampler.hpp"

namespace sdergm {

enum class Pooling {
    PerParameter,       // one (alpha, beta) pair per time-varying parameter
    PooledByDirection,  // beta backend only: one pair for all in-, one for all out-parameters
};

// Static parameters (w, alpha, beta) of the score-driven recursion
//   theta_{t+1} = w + beta . theta_t + alpha . (scaled score)_t.
// w always has one entry per parameter; alpha/beta have K entries under
// PerParameter and 2 entries (in, out) under PooledByDirection. Scaling is
// the inverse square root of the Fisher diagonal, floored at fisher_floor.
struct SdStaticParams {
    Eigen::VectorXd w;
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
    Pooling pooling = Pooling::PerParameter;

    void validate(int n_params) const;
};

inline constexpr double kFisherFloor = 1e-8;

// Observation model driving the filter: the snapshots, their conditional
// log-density, score, and Fisher scaling, plus simulation support. A
// backend instance is bound to one data set (so per-snapshot work such as
// change-statistic tables is cached across repeated filter passes).
class ModelBackend {
  public:
    virtual ~ModelBackend() = default;

    virtual int n_params() const = 0;
    virtual int n_times() const = 0;

    virtual double log_density(int t, const Eigen::VectorXd& theta) const = 0;
    virtual Eigen::VectorXd score(int t, const Eigen::VectorXd& theta) const = 0;
    virtual Eigen::VectorXd fisher_diag(int t, const Eigen::VectorXd& theta) const = 0;

    // Same quantities for a snapshot that is not part of the data
    // (simulated continuations).
    virtual Eigen::VectorXd score_of(const Adjacency& y, const Eigen::VectorXd& theta) const = 0;
    virtual Eigen::VectorXd fisher_diag_of(const Adjacency& y,
                                           const Eigen::VectorXd& theta) const = 0;

    // Full-sample static estimate over snapshots [t0, t1); full range by default.
    virtual Eigen::VectorXd static_fit() const;
    virtual Eigen::VectorXd static_fit_range(int t0, int t1) const = 0;

    virtual Adjacency sample(const Eigen::VectorXd& theta, std::uint64_t seed) const = 0;
    virtual Eigen::MatrixXd expected_adjacency(const Eigen::VectorXd& theta) const = 0;

    virtual bool is_beta() const { return false; }
};

// Exact-score backend for the directed beta model; requires all nodes
// active in every snapshot. Parameter order matches BetaParams::stacked.
class BetaBackend final : public ModelBackend {
  public:
    BetaBackend(TemporalNetwork data, BetaFitConfig fit_config = {});

    int n_params() const override { return 2 * n_; }
    int n_times() const override { return static_cast<int>(data_.snapshots.size()); }

    double log_density(int t, const Eigen::VectorXd& theta) const override;
    Eigen::VectorXd score(int t, const Eigen::VectorXd& theta) const override;
    Eigen::VectorXd fisher_diag(int t, const Eigen::VectorXd& theta) const override;
    Eigen::VectorXd score_of(const Adjacency& y, const Eigen::VectorXd& theta) const override;
    Eigen::VectorXd fisher_diag_of(const Adjacency& y,
                                   const Eigen::VectorXd& theta) const override;
    Eigen::VectorXd static_fit_range(int t0, int t1) const override;
    Adjacency sample(const Eigen::VectorXd& theta, std::uint64_t seed) const override;
    Eigen::MatrixXd expected_adjacency(const Eigen::VectorXd& theta) const override;
    bool is_beta() const override { return true; }

    const TemporalNetwork& data() const { return data_; }

  private:
    TemporalNetwork data_;
    int n_;
    BetaFitConfig fit_config_;
};

// Pseudo-likelihood backend for a general ERGM. Snapshots are reduced to
// their active subgraphs; change-statistic tables are built once.
class ErgmBackend final : public ModelBackend {
  public:
    ErgmBackend(ErgmSpec spec, TemporalNetwork data, McmcConfig mcmc = {},
                MpleConfig mple = {});

    int n_params() const override { return spec_.n_stats(); }
    int n_times() const override { return static_cast<int>(tables_.size()); }

    double log_density(int t, const Eigen::VectorXd& theta) const override;
    Eigen::VectorXd score(int t, const Eigen::VectorXd& theta) const override;
    Eigen::VectorXd fisher_diag(int t, const Eigen::VectorXd& theta) const override;
    Eigen::VectorXd score_of(const Adjacency& y, const Eigen::VectorXd& theta) const override;
    Eigen::VectorXd fisher_diag_of(const Adjacency& y,
                                   const Eigen::VectorXd& theta) const override;
    Eigen::VectorXd static_fit_range(int t0, int t1) const override;
    Adjacency sample(const Eigen::VectorXd& theta, std::uint64_t seed) const override;
    // Monte Carlo average of sampled matrices (the ERGM has no closed-form
    // link-probability matrix).
    Eigen::MatrixXd expected_adjacency(const Eigen::VectorXd& theta) const override;

    const ErgmSpec& spec() const { return spec_; }

  private:
    ErgmSpec spec_;
    TemporalNetwork data_;
    std::vector<ChangeStatTable> tables_;
    McmcConfig mcmc_;
    MpleConfig mple_;
    int sample_n_;
    std::uint64_t expectation_seed_ = 0x5de9a1;
    int expectation_samples_ = 50;
};

// Filtered trajectory. theta holds the raw recursion values (row t+1 is
// exactly sd_update of row t); identified re-centering for reporting is a
// separate step.
struct FilterPath {
    Eigen::MatrixXd theta;          // T x K, row t = parameters used for snapshot t
    Eigen::MatrixXd scaled_scores;  // T x K
    Eigen::VectorXd loglik_terms;   // length T
    double total_loglik = 0.0;
    Eigen::VectorXd theta_next;     // one-step-ahead parameter after the last snapshot
};

Eigen::VectorXd sd_update(const Eigen::VectorXd& theta, const Eigen::VectorXd& scaled_score,
                          const SdStaticParams& params);

FilterPath filter(const ModelBackend& backend, const SdStaticParams& params,
                  const Eigen::VectorXd& theta_init);

// w with the recursion's zero-score fixed point at theta_static.
Eigen::VectorXd target_w(const Eigen::VectorXd& beta_expanded,
                         const Eigen::VectorXd& theta_static);

struct EstimateConfig {
    bool targeting = true;
    Pooling pooling = Pooling::PerParameter;
    int max_iter = 4000;
    int n_starts = 3;
    int range_begin = 0;   // estimation window [begin, end); end=-1 means T
    int range_end = -1;
};

struct EstimateResult {
    SdStaticParams params;
    FilterPath path;
    Eigen::VectorXd theta_static;
    double loglik = 0.0;
};

// Maximum likelihood for (w, alpha, beta) by prediction-error decomposition,
// through the reparameterization alpha = exp(a), beta = tanh(b). With
// targeting, w is pinned by target_w at each candidate beta and only
// (alpha, beta) are free.
EstimateResult estimate_static(const ModelBackend& backend, const EstimateConfig& config = {});

struct LmTestResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Score test of parameter constancy against a score-driven alternative:
// auxiliary regression of 1 on the static-fit score and its scaled lagged
// product, chi-square(1) on the explained sum of squares.
LmTestResult lm_test(const ModelBackend& backend, int param_index);
LmTestResult lm_test_at(const ModelBackend& backend, const Eigen::VectorXd& theta_static,
                        int param_index);

// Multi-horizon forecast. Horizon 1 advances the recursion with the last
// observed snapshot and is deterministic; deeper horizons average n_sims
// simulated continuations of the score-driven process. Entry h-1 of the
// result is the expected adjacency at horizon h.
std::vector<Eigen::MatrixXd> forecast(const ModelBackend& backend, const SdStaticParams& params,
                                      const Eigen::VectorXd& theta_last, int horizon, int n_sims,
                                      std::uint64_t seed);

}  // namespace sdergm
