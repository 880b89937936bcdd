#include "mvfs/optimizer.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "mvfs/error.hpp"
#include "mvfs/parallel.hpp"

namespace mvfs {

namespace {

constexpr std::uint64_t kPerturbStream = 0x7065727475726bULL;

std::string to_string(const Theta& theta) {
    return "(" + std::to_string(theta[0]) + "," + std::to_string(theta[1]) + "," + std::to_string(theta[2]) + ")";
}

void validate_theta(const Theta& theta) {
    if (theta[0] < 1 || theta[1] < 0 || theta[2] < 0)
        throw DomainError("invalid theta " + to_string(theta) + ": need p_t >= 1, p_u >= 0, q_u >= 0");
}

}  // namespace

bool ThetaBounds::contains(const Theta& theta) const {
    for (int k = 0; k < 3; ++k)
        if (theta[k] < lower[k] || theta[k] > upper[k]) return false;
    return true;
}

Theta ThetaBounds::clamp(const Theta& theta) const {
    Theta out;
    for (int k = 0; k < 3; ++k) out[k] = std::clamp(theta[k], lower[k], upper[k]);
    return out;
}

void SearchConfig::validate() const {
    if (initial_grid.empty()) throw DomainError("initial grid is empty");
    if (survivors < 1 || mc_res < 1 || t_final < 0 || perturbations_per_survivor < 1)
        throw DomainError("search counts must be >= 1");
    if (static_cast<std::size_t>(survivors) > initial_grid.size())
        throw DomainError("survivor count m exceeds the initial grid size k_0");
    for (int k = 0; k < 3; ++k)
        if (bounds.lower[k] > bounds.upper[k]) throw DomainError("empty bounds box");
    validate_theta(bounds.lower);
    for (const auto& theta : initial_grid)
        if (!bounds.contains(theta)) throw DomainError("grid point " + to_string(theta) + " lies outside the bounds");
}

SearchConfig SearchConfig::reference_grid(long mc_res) {
    SearchConfig config;
    for (int p_t = 2; p_t <= 6; ++p_t)
        for (int p_u = 1; p_u <= 46; p_u += 5)
            for (int q_u = 1; q_u <= 46; q_u += 5) config.initial_grid.push_back({p_t, p_u, q_u});
    config.survivors = 10;
    config.mc_res = mc_res;
    config.t_final = 5;
    config.perturbations_per_survivor = 10;
    config.bounds = ThetaBounds{{2, 0, 0}, {10, 100, 100}};
    return config;
}

double evaluate_objective_batch(const DiscrepancyObjective& objective, const Theta& theta, long mc_res,
                                std::uint64_t seed) {
    validate_theta(theta);
    if (mc_res < 1) throw DomainError("mc_res must be >= 1");
    const ModelParams params = to_params(theta, objective.n);
    params.validate();

    std::vector<signed char> diffs(static_cast<std::size_t>(mc_res));
    std::vector<char> counted(static_cast<std::size_t>(mc_res));
    parallel_for(diffs.size(), objective.workers, [&](std::size_t i) {
        const std::uint64_t trial_seed = derive_seed(seed, {static_cast<std::uint64_t>(i)});
        Engine signal_rng = make_engine(trial_seed, {0});
        const CovarianceModel model = assemble_sigma(random_signal_block(params.p_t, signal_rng), params.p_u, params.q_u);

        Engine exact_rng = make_engine(trial_seed, {1});
        const auto exact = top_is_signal(draw_cross_cov(model, objective.exact_sampler, params.n, exact_rng, objective.dof),
                                         objective.method, params.p_t);

        std::optional<bool> asymptotic;
        Engine asym_rng = make_engine(trial_seed, {2});
        if (objective.pairing == Pairing::paired) {
            asymptotic = top_is_signal(sample_cross_cov_asymptotic(model.cross_block(), params.n, asym_rng, objective.dof),
                                       objective.method, params.p_t);
        } else {
            Engine own_signal = make_engine(trial_seed, {3});
            const CovarianceModel other =
                assemble_sigma(random_signal_block(params.p_t, own_signal), params.p_u, params.q_u);
            asymptotic = top_is_signal(sample_cross_cov_asymptotic(other.cross_block(), params.n, asym_rng, objective.dof),
                                       objective.method, params.p_t);
        }
        if (!exact || !asymptotic) return;
        counted[i] = 1;
        const int d = static_cast<int>(*asymptotic) - static_cast<int>(*exact);
        diffs[i] = static_cast<signed char>(objective.direction == Direction::asymptotic_minus_exact ? d : -d);
    });

    long total = 0;
    long n_counted = 0;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        total += diffs[i];
        n_counted += counted[i];
    }
    if (n_counted == 0) throw DegenerateMatrix("every trial in the batch was degenerate");
    return static_cast<double>(total) / static_cast<double>(n_counted);
}

BatchObjective make_batch_objective(const DiscrepancyObjective& objective) {
    return [objective](const Theta& theta, long mc_res, std::uint64_t seed) {
        return evaluate_objective_batch(objective, theta, mc_res, seed);
    };
}

Theta perturb(const Theta& theta, const ThetaBounds& bounds, Engine& rng) {
    std::uniform_int_distribution<int> small(-1, 1);
    std::uniform_int_distribution<int> large(-3, 3);
    const int d1 = small(rng);
    const int d2 = large(rng);
    const int d3 = large(rng);
    return bounds.clamp({theta[0] + d1, theta[1] + d2, theta[2] + d3});
}

SearchResult run_search(const BatchObjective& objective, const SearchConfig& config, std::uint64_t root_seed) {
    config.validate();

    std::vector<Candidate> pool;
    std::map<Theta, int> index_of;
    SearchResult result;

    auto add_batch = [&](Candidate& c, int iteration, const std::string& event, const std::string& note) {
        const std::uint64_t seed =
            derive_seed(root_seed, {static_cast<std::uint64_t>(c.id), static_cast<std::uint64_t>(c.batches)});
        const double value = objective(c.theta, config.mc_res, seed);
        c.sum_objective += value;
        ++c.batches;
        result.trace.push_back({iteration, c.id, c.theta, event, c.batches, value, c.mean(), note});
    };

    auto find_or_create = [&](const Theta& theta, int iteration) -> std::pair<int, bool> {
        if (auto it = index_of.find(theta); it != index_of.end()) return {it->second, false};
        const int id = static_cast<int>(pool.size());
        pool.push_back({id, theta, 0.0, 0, iteration});
        index_of.emplace(theta, id);
        return {id, true};
    };

    for (const auto& theta : config.initial_grid) {
        auto [id, created] = find_or_create(theta, 0);
        add_batch(pool[static_cast<std::size_t>(id)], 0, created ? "initial" : "merged",
                  created ? "" : "duplicate grid point");
    }

    auto by_mean = [&](int a, int b) {
        const double ma = pool[static_cast<std::size_t>(a)].mean();
        const double mb = pool[static_cast<std::size_t>(b)].mean();
        return ma != mb ? ma > mb : a < b;
    };

    for (int t = 1; t <= config.t_final; ++t) {
        std::vector<int> ids(pool.size());
        for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
        const auto m = std::min<std::size_t>(static_cast<std::size_t>(config.survivors), ids.size());
        std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(m), ids.end(), by_mean);
        ids.resize(m);
        result.survivors.push_back(ids);

        for (int id : ids) add_batch(pool[static_cast<std::size_t>(id)], t, "survivor", "");

        Engine rng = make_engine(root_seed, {kPerturbStream, static_cast<std::uint64_t>(t)});
        for (int parent : ids) {
            for (int k = 0; k < config.perturbations_per_survivor; ++k) {
                const Theta child = perturb(pool[static_cast<std::size_t>(parent)].theta, config.bounds, rng);
                auto [id, created] = find_or_create(child, t);
                add_batch(pool[static_cast<std::size_t>(id)], t, created ? "perturbed" : "merged",
                          "parent " + std::to_string(parent));
            }
        }
    }

    std::vector<int> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), by_mean);
    result.ranked.reserve(pool.size());
    for (int id : order) result.ranked.push_back(pool[static_cast<std::size_t>(id)]);
    return result;
}

}  // namespace mvfs
