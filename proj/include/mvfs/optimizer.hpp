#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mvfs/model_sampler.hpp"
#include "mvfs/risk.hpp"

namespace mvfs {

/// (p_t, p_u, q_u)
using Theta = std::array<int, 3>;

inline ModelParams to_params(const Theta& theta, int n) { return {n, theta[0], theta[1], theta[2]}; }

struct ThetaBounds {
    Theta lower{1, 0, 0};
    Theta upper{10, 100, 100};

    bool contains(const Theta& theta) const;
    Theta clamp(const Theta& theta) const;
};

struct Candidate {
    int id = 0;
    Theta theta{};
    double sum_objective = 0;
    int batches = 0;
    int discovered_at = 0;

    double mean() const { return sum_objective / batches; }
};

struct SearchConfig {
    std::vector<Theta> initial_grid;
    int survivors = 10;
    long mc_res = 5000;
    int t_final = 5;
    int perturbations_per_survivor = 10;
    ThetaBounds bounds;

    void validate() const;

    /// 500-point grid p_t in {2..6}, p_u, q_u in {1, 6, ..., 46}, m = 10,
    /// ten perturbed copies per survivor, five steps.
    static SearchConfig reference_grid(long mc_res = 5000);
};

enum class Direction { exact_minus_asymptotic, asymptotic_minus_exact };

/// Paired: exact and asymptotic samples share each trial's signal block.
/// Independent: each side draws its own.
enum class Pairing { paired, independent };

struct DiscrepancyObjective {
    int n = 2;
    Method method = Method::thresholding;
    Direction direction = Direction::asymptotic_minus_exact;
    /// Either exact sampler; both have the Wishart(nu, Sigma/nu) law.
    SamplerKind exact_sampler = SamplerKind::data_simulation;
    Pairing pairing = Pairing::paired;
    DofConvention dof = DofConvention::sample;
    int workers = 1;
};

/// Mean over mc_res trials of the signed difference of top-rank success
/// indicators (asymptotic minus exact, or the reverse).
double evaluate_objective_batch(const DiscrepancyObjective& objective, const Theta& theta, long mc_res,
                                std::uint64_t seed);

/// One noisy batch measurement at theta.
using BatchObjective = std::function<double(const Theta& theta, long mc_res, std::uint64_t seed)>;

BatchObjective make_batch_objective(const DiscrepancyObjective& objective);

struct TraceRecord {
    int iteration = 0;
    int candidate_id = 0;
    Theta theta{};
    /// initial | survivor | perturbed | merged
    std::string event;
    int batches = 0;
    double batch_value = 0;
    double mean = 0;
    std::string note;
};

struct SearchResult {
    /// Every evaluated candidate, by descending mean (earlier id on ties).
    std::vector<Candidate> ranked;
    std::vector<TraceRecord> trace;
    /// survivors[t - 1] lists the candidate ids selected at step t.
    std::vector<std::vector<int>> survivors;
};

/// Population search for argmax E[X | theta] over a discrete box.
SearchResult run_search(const BatchObjective& objective, const SearchConfig& config, std::uint64_t root_seed);

/// theta + (d1, d2, d3), d1 ~ U{-1, 0, 1}, d2, d3 ~ U{-3, ..., 3},
/// clamped into the bounds.
Theta perturb(const Theta& theta, const ThetaBounds& bounds, Engine& rng);

}  // namespace mvfs
