#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mvfs/model_sampler.hpp"
#include "mvfs/quadrature.hpp"
#include "mvfs/selectors.hpp"

namespace mvfs {

enum class SamplerKind { wishart_exact, data_simulation, asymptotic_gaussian };

/// Monte Carlo probability estimate. `trials` counts every repetition;
/// degenerate repetitions are in `discarded` and excluded from `value`.
struct RiskEstimate {
    double value = 0;
    double std_error = 0;
    long trials = 0;
    long discarded = 0;
    /// Number of counted trials whose top-ranked feature was a signal feature.
    long successes = 0;

    long effective_trials() const { return trials - discarded; }
    /// Estimate of E[L] from the same trials: exactly 1 - value.
    double expected_loss() const { return 1.0 - value; }
};

struct EstimateOptions {
    int workers = 1;
    DofConvention dof = DofConvention::sample;
    /// Multiplies the singular values of every drawn signal block. Draws for
    /// a given seed are otherwise unchanged, so probes across scales share
    /// their G1, D, G2.
    double signal_scale = 1.0;
};

/// Outcome of one trial: +1 signal feature on top, 0 noise feature on top,
/// -1 degenerate (discarded).
int selection_trial(const ModelParams& params, Method method, SamplerKind sampler, std::uint64_t trial_seed,
                    const EstimateOptions& options = {});

/// Draws the sample cross-covariance of a model through the chosen sampler.
MatrixXd draw_cross_cov(const CovarianceModel& model, SamplerKind sampler, int n, Engine& rng, DofConvention dof);

/// Top-rank success indicator for one sample matrix; nullopt when the
/// method cannot rank (SVD of a zero matrix).
std::optional<bool> top_is_signal(const MatrixXd& cross_cov, Method method, Index p_t);

/// P = probability that the top-ranked feature is correlated with Y.
/// Each trial draws a fresh signal block, then a sample matrix.
RiskEstimate estimate_selection_probability(const ModelParams& params, Method method, SamplerKind sampler,
                                            long mc_res, std::uint64_t root_seed, const EstimateOptions& options = {});

/// P[Z^2 <= x] for Z ~ N(sqrt(lambda), 1).
double noncentral_chisq1_cdf(double x, double lambda);

/// Asymptotic expected 1-0 loss of thresholding: probability that the
/// largest |entry| among the p_u x q central rows exceeds the largest
/// |entry| among the signal rows, whose means are `scaled_signal`
/// (p_t x q, entries sqrt(n0) * omega_ij; unit variance everywhere).
double asymptotic_thresholding_risk(const MatrixXd& scaled_signal, int p_u, const QuadratureConfig& quadrature = {});

struct SweepPoint {
    ModelParams params;
    std::optional<RiskEstimate> estimate;
    std::string error;
};

/// One estimate per grid point. Every point uses the same root seed, so
/// neighbouring points share their random numbers, and a singleton grid
/// reproduces estimate_selection_probability exactly.
std::vector<SweepPoint> sweep_risk_surface(const std::vector<ModelParams>& grid, Method method, SamplerKind sampler,
                                           long mc_res, std::uint64_t root_seed, const EstimateOptions& options = {});

}  // namespace mvfs
