#include "mvfs/risk.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "mvfs/error.hpp"
#include "mvfs/parallel.hpp"

namespace mvfs {

MatrixXd draw_cross_cov(const CovarianceModel& model, SamplerKind sampler, int n, Engine& rng, DofConvention dof) {
    switch (sampler) {
        case SamplerKind::wishart_exact: return sample_cross_cov_wishart(model, n, rng, dof);
        case SamplerKind::data_simulation: return sample_cross_cov_data(model, n, rng, dof);
        case SamplerKind::asymptotic_gaussian: return sample_cross_cov_asymptotic(model.cross_block(), n, rng, dof);
    }
    throw DomainError("unknown sampler");
}

std::optional<bool> top_is_signal(const MatrixXd& cross_cov, Method method, Index p_t) {
    if (method == Method::thresholding) return top_feature(score_thresholding(cross_cov)) < p_t;
    try {
        return top_feature(score_svd(cross_cov)) < p_t;
    } catch (const DegenerateMatrix&) {
        return std::nullopt;
    }
}

int selection_trial(const ModelParams& params, Method method, SamplerKind sampler, std::uint64_t trial_seed,
                    const EstimateOptions& options) {
    Engine signal_rng = make_engine(trial_seed, {0});
    SignalBlock signal = random_signal_block(params.p_t, signal_rng);
    if (options.signal_scale != 1.0) signal = signal.scaled(options.signal_scale);
    const CovarianceModel model = assemble_sigma(signal, params.p_u, params.q_u);

    Engine sample_rng = make_engine(trial_seed, {1});
    const MatrixXd cross_cov = draw_cross_cov(model, sampler, params.n, sample_rng, options.dof);
    const auto outcome = top_is_signal(cross_cov, method, params.p_t);
    if (!outcome) return -1;
    return *outcome ? 1 : 0;
}

RiskEstimate estimate_selection_probability(const ModelParams& params, Method method, SamplerKind sampler,
                                            long mc_res, std::uint64_t root_seed, const EstimateOptions& options) {
    params.validate();
    if (mc_res < 1) throw DomainError("mc_res must be >= 1");
    if (options.signal_scale < 0.0 || options.signal_scale > 1.0)
        throw DomainError("signal_scale must lie in [0, 1]");

    std::vector<signed char> outcomes(static_cast<std::size_t>(mc_res));
    parallel_for(outcomes.size(), options.workers, [&](std::size_t i) {
        outcomes[i] = static_cast<signed char>(
            selection_trial(params, method, sampler, derive_seed(root_seed, {static_cast<std::uint64_t>(i)}), options));
    });

    RiskEstimate estimate;
    estimate.trials = mc_res;
    for (auto o : outcomes) {
        if (o < 0)
            ++estimate.discarded;
        else
            estimate.successes += o;
    }
    const long counted = estimate.effective_trials();
    if (counted == 0) throw DegenerateMatrix("every Monte Carlo trial was degenerate");
    estimate.value = static_cast<double>(estimate.successes) / static_cast<double>(counted);
    estimate.std_error = std::sqrt(estimate.value * (1.0 - estimate.value) / static_cast<double>(counted));
    return estimate;
}

double noncentral_chisq1_cdf(double x, double lambda) {
    if (!(x >= 0.0) || !(lambda >= 0.0))
        throw DomainError("noncentral chi-squared CDF needs x >= 0 and lambda >= 0");
    if (x == 0.0) return 0.0;
    const double a = std::sqrt(x);
    const double m = std::sqrt(lambda);
    // Phi(a - m) - Phi(-a - m), written with erfc to avoid cancellation.
    return 0.5 * (std::erfc((m - a) / std::numbers::sqrt2) - std::erfc((a + m) / std::numbers::sqrt2));
}

double asymptotic_thresholding_risk(const MatrixXd& scaled_signal, int p_u, const QuadratureConfig& quadrature) {
    if (p_u < 0) throw DomainError("p_u must be nonnegative");
    if (scaled_signal.cols() < 1) throw InvalidDimension("q must be >= 1");
    if (!scaled_signal.allFinite()) throw DomainError("signal means must be finite");
    if (p_u == 0) return 0.0;

    const double noise_count = static_cast<double>(p_u) * static_cast<double>(scaled_signal.cols());
    const Eigen::ArrayXd means = scaled_signal.reshaped().cwiseAbs().array();

    // x = t^2 removes the x^{-1/2} singularity of the chi-squared density:
    // f(t^2) dx = 2 phi(t) dt and F(t^2) = erf(t / sqrt 2).
    auto integrand = [&](double t) {
        const double central_cdf = std::erf(t / std::numbers::sqrt2);
        const double density = 2.0 * std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
        double signal_below = 1.0;
        for (Eigen::Index k = 0; k < means.size() && signal_below > 0.0; ++k)
            signal_below *= noncentral_chisq1_cdf(t * t, means(k) * means(k));
        return noise_count * std::pow(central_cdf, noise_count - 1.0) * density * signal_below;
    };

    // Past `upper` the noise maximum has essentially no mass left.
    double upper = 1.0;
    while (noise_count * std::erfc(upper / std::numbers::sqrt2) > 1e-15) upper += 0.25;

    const auto result = integrate_adaptive<double>(integrand, 0.0, upper, quadrature);
    if (!result.converged)
        throw DegenerateMatrix("risk quadrature did not converge (error estimate " + std::to_string(result.error) + ")");
    return std::clamp(result.value, 0.0, 1.0);
}

std::vector<SweepPoint> sweep_risk_surface(const std::vector<ModelParams>& grid, Method method, SamplerKind sampler,
                                           long mc_res, std::uint64_t root_seed, const EstimateOptions& options) {
    if (grid.empty()) throw DomainError("risk sweep grid is empty");
    std::vector<SweepPoint> out;
    out.reserve(grid.size());
    for (const auto& params : grid) {
        SweepPoint point{params, std::nullopt, {}};
        try {
            point.estimate = estimate_selection_probability(params, method, sampler, mc_res, root_seed, options);
        } catch (const Error& e) {
            point.error = e.what();
        }
        out.push_back(std::move(point));
    }
    return out;
}

}  // namespace mvfs
