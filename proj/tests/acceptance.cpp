// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fixtures.hpp"
#include "mvfs/commands.hpp"
#include "mvfs/fdr.hpp"
#include "mvfs/optimizer.hpp"
#include "mvfs/risk.hpp"
#include "oracles.hpp"

using namespace mvfs;

namespace {

constexpr std::uint64_t kSeed = 20120101;

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string fmt(const RiskEstimate& e) { return fmt(e.value) + "+-" + fmt(e.std_error); }

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

double joint_se(const RiskEstimate& a, const RiskEstimate& b) {
    return std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int g_workers = 8;

EstimateOptions opts(int workers = g_workers) {
    EstimateOptions o;
    o.workers = workers;
    return o;
}

RiskEstimate estimate(const ModelParams& p, Method m, SamplerKind s, long mc_res, int workers = g_workers) {
    return estimate_selection_probability(p, m, s, mc_res, kSeed, opts(workers));
}

Outcome table_row_n2() {
    const auto t0 = std::chrono::steady_clock::now();
    const ModelParams p{2, 2, 5, 0};
    const auto exact = estimate(p, Method::thresholding, SamplerKind::wishart_exact, 20000, 1);
    const auto asym = estimate(p, Method::thresholding, SamplerKind::asymptotic_gaussian, 20000, 1);
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = within(exact.value, 0.26, 0.32) && within(asym.value, 0.31, 0.37) && secs < 120;
    o.detail = "exact=" + fmt(exact) + " in [0.26,0.32], asymptotic=" + fmt(asym) + " in [0.31,0.37], " +
               fmt(secs, 1) + "s single-threaded (< 120s)";
    return o;
}

Outcome table_row_n6() {
    const ModelParams p{6, 2, 3, 4};
    Outcome o;
    for (Method m : {Method::thresholding, Method::svd}) {
        const auto exact = estimate(p, m, SamplerKind::wishart_exact, 20000);
        const auto asym = estimate(p, m, SamplerKind::asymptotic_gaussian, 20000);
        o.pass = o.pass && within(exact.value, 0.49, 0.55) && within(asym.value, 0.54, 0.60);
        o.detail += to_string(m) + ": exact=" + fmt(exact) + " in [0.49,0.55], asymptotic=" + fmt(asym) +
                    " in [0.54,0.60]; ";
    }
    return o;
}

Outcome table_agreement_row() {
    const ModelParams p{2, 5, 35, 35};
    const auto exact = estimate(p, Method::thresholding, SamplerKind::wishart_exact, 20000);
    const auto asym = estimate(p, Method::thresholding, SamplerKind::asymptotic_gaussian, 20000);
    Outcome o;
    const double gap = std::abs(exact.value - asym.value);
    o.pass = gap < 0.02 && within(exact.value, 0.10, 0.14) && within(asym.value, 0.10, 0.14);
    o.detail = "exact=" + fmt(exact) + ", asymptotic=" + fmt(asym) + ", |diff|=" + fmt(gap) +
               " (< 0.02, both in [0.10,0.14])";
    return o;
}

Outcome search_end_to_end() {
    const auto t0 = std::chrono::steady_clock::now();
    DiscrepancyObjective objective;
    objective.n = 2;
    objective.method = Method::thresholding;
    objective.direction = Direction::asymptotic_minus_exact;
    // The reference values came from separate simulations of the two sides.
    objective.pairing = Pairing::independent;
    objective.workers = g_workers;
    const SearchConfig config = SearchConfig::reference_grid(2000);
    const SearchResult r = run_search(make_batch_objective(objective), config, kSeed);
    const double secs = seconds_since(t0);
    const Candidate& best = r.ranked.front();
    const int p = best.theta[0] + best.theta[1];
    const int q = best.theta[0] + best.theta[2];

    // Not part of the criterion: the returned theta re-measured with a
    // fresh 200,000-trial batch shows how much of its mean is selection bias.
    const double remeasured = evaluate_objective_batch(objective, best.theta, 200000, kSeed + 1);

    Outcome o;
    const bool value_ok = within(best.mean(), 0.03, 0.09);
    const bool theta_ok = best.theta[0] == 2 && p <= 12 && q <= 8;
    o.pass = value_ok && theta_ok && secs <= 1800;
    o.detail = "best theta=(" + std::to_string(best.theta[0]) + "," + std::to_string(best.theta[1]) + "," +
               std::to_string(best.theta[2]) + ") p=" + std::to_string(p) + " q=" + std::to_string(q) +
               " mean=" + fmt(best.mean()) + " over " + std::to_string(best.batches) + " batch(es) [value " +
               (value_ok ? "ok" : "out of [0.03,0.09]") + ", theta " + (theta_ok ? "ok" : "needs p_t=2, p<=12, q<=8") +
               "], " + std::to_string(r.ranked.size()) + " candidates, " + fmt(secs, 1) +
               "s; re-measured at 200k trials: " + fmt(remeasured);
    return o;
}

Outcome risk_oracle() {
    Outcome o;
    std::mt19937_64 rng(515);
    std::normal_distribution<double> z;
    const int p_u = 5;
    for (int k = 0; k < 5; ++k) {
        MatrixXd signal(2, 3);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 3; ++j) signal(i, j) = (0.5 + 0.5 * k) * z(rng);
        const long draws = 200000;
        long noise_wins = 0;
        for (long d = 0; d < draws; ++d) {
            double sig = 0, noise = 0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 3; ++j) sig = std::max(sig, std::abs(signal(i, j) + z(rng)));
            for (int i = 0; i < p_u * 3; ++i) noise = std::max(noise, std::abs(z(rng)));
            noise_wins += noise > sig;
        }
        const double f = double(noise_wins) / double(draws);
        const double se = std::sqrt(f * (1 - f) / double(draws));
        const double v = asymptotic_thresholding_risk(signal, p_u);
        const double z_score = std::abs(v - f) / se;
        o.pass = o.pass && z_score < 4;
        o.detail += "E[L]=" + fmt(v) + " vs MC " + fmt(f) + " (" + fmt(z_score, 2) + " SE); ";
    }
    const double zero = asymptotic_thresholding_risk(MatrixXd::Zero(2, 3), p_u);
    o.pass = o.pass && std::abs(zero - 5.0 / 7.0) < 1e-6;
    o.detail += "zero signal " + fmt(zero, 9) + " vs 5/7";
    return o;
}

Outcome large_model_corner() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto e = estimate({100, 10, 590, 190}, Method::thresholding, SamplerKind::data_simulation, 1000);
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = within(e.value, 0.70, 0.90) && secs <= 1200;
    o.detail = "P_thres=" + fmt(e) + " in [0.70,0.90], " + fmt(secs, 1) + "s";
    return o;
}

Outcome crossover() {
    Outcome o;
    for (int n : {12, 100}) {
        const ModelParams p{n, 50, 550, 150};
        const auto thres = estimate(p, Method::thresholding, SamplerKind::data_simulation, 1000);
        const auto svd = estimate(p, Method::svd, SamplerKind::data_simulation, 1000);
        const double se = joint_se(thres, svd);
        const double margin = n == 12 ? svd.value - thres.value : thres.value - svd.value;
        o.pass = o.pass && margin > 2 * se;
        o.detail += "n=" + std::to_string(n) + ": thres=" + fmt(thres) + " svd=" + fmt(svd) + " margin=" +
                    fmt(margin / se, 2) + " joint SE; ";
    }
    return o;
}

Outcome rank_one_equivalence() {
    int identical = 0;
    const int cases = 1000;
    for (int c = 0; c < cases; ++c) {
        Engine rng = make_engine(kSeed, {8, static_cast<std::uint64_t>(c)});
        std::uniform_int_distribution<int> dim(1, 12);
        const ModelParams p{2, dim(rng), dim(rng) - 1, dim(rng) - 1};
        const CovarianceModel model = assemble_sigma(random_signal_block(p.p_t, rng), p.p_u, p.q_u);
        const MatrixXd s = sample_cross_cov_data(model, p.n, rng);
        const Ranking a = ranking_from_scores(score_thresholding(s));
        const Ranking b = ranking_from_scores(score_svd(s));
        identical += a.order == b.order;
    }
    return {identical == cases, std::to_string(identical) + "/" + std::to_string(cases) + " identical rankings"};
}

Outcome harmonic() {
    const double c = harmonic_factor(585);
    return {std::round(c * 100) / 100 == 6.95, "c(585)=" + fmt(c, 6)};
}

Outcome fdr_calibration() {
    Outcome o;
    for (Method m : {Method::thresholding, Method::svd}) {
        int uniform = 0;
        double worst = 1;
        for (int rep = 0; rep < 50; ++rep) {
            Engine rng = make_engine(kSeed, {10, static_cast<std::uint64_t>(rep)});
            const auto d = fixture::independent(6, 20, 10, rng);
            PermutationOptions po;
            po.workers = g_workers;
            const auto pv = pvalues(DataMatrix::unlabeled(d.x), DataMatrix::unlabeled(d.y), m, NullKind::global, 1000,
                                    derive_seed(kSeed, {11, static_cast<std::uint64_t>(rep)}), po);
            const double ks = oracle::ks_uniform_pvalue(pv.p_values);
            worst = std::min(worst, ks);
            uniform += ks > 0.001;
        }
        o.pass = o.pass && uniform >= 48;
        o.detail += "KS uniform at 0.001 (" + to_string(m) + ") in " + std::to_string(uniform) +
                    "/50, min KS p=" + fmt(worst) + "; ";
    }

    for (Method m : {Method::thresholding, Method::svd}) {
        int hits = 0;
        for (int rep = 0; rep < 200; ++rep) {
            Engine rng = make_engine(kSeed, {12, static_cast<std::uint64_t>(rep)});
            const auto d = fixture::planted(30, 30, 10, 3, 0.95, rng);
            PermutationOptions po;
            po.workers = g_workers;
            const auto report = rank_features(DataMatrix::unlabeled(d.x), DataMatrix::unlabeled(d.y), m,
                                              NullKind::global, 100, Correction::harmonic,
                                              derive_seed(kSeed, {13, static_cast<std::uint64_t>(rep)}), po);
            std::set<Index> top;
            for (int r = 0; r < 3; ++r) top.insert(report.features[static_cast<std::size_t>(r)].feature_index);
            hits += top == std::set<Index>{0, 1, 2};
        }
        o.pass = o.pass && hits >= 190;
        o.detail += "planted top-3 (" + to_string(m) + ") " + std::to_string(hits) + "/200; ";
    }
    return o;
}

Outcome property_suites() {
    Outcome o;
    auto record = [&](bool ok, const std::string& what) {
        o.pass = o.pass && ok;
        o.detail += what + (ok ? " ok; " : " FAILED; ");
    };

    {
        bool ok = true;
        Engine rng = make_engine(kSeed, {20});
        std::uniform_int_distribution<int> level(0, 3);
        for (int c = 0; c < 500 && ok; ++c) {
            VectorXd s(17);
            for (Index i = 0; i < s.size(); ++i) s(i) = level(rng);
            const Ranking r = ranking_from_scores(s);
            std::vector<Index> sorted = r.order;
            std::sort(sorted.begin(), sorted.end());
            std::vector<Index> ids(17);
            std::iota(ids.begin(), ids.end(), Index{0});
            ok = sorted == ids && r.order == oracle::selection_sort_order(s);
        }
        record(ok, "ranking bijectivity");
    }
    {
        bool ok = true;
        Engine rng = make_engine(kSeed, {21});
        for (int c = 0; c < 200 && ok; ++c) {
            const MatrixXd t = standard_normal_matrix<double>(9, 5, rng);
            for (Method m : {Method::thresholding, Method::svd})
                for (double k : {1e-3, 7.0, 1e4})
                    ok = ok && ranking_from_scores(score(m, t)).order == ranking_from_scores(score(m, MatrixXd(k * t))).order;
        }
        record(ok, "scale invariance");
    }
    {
        bool ok = true;
        for (int i = 0; i < 50; ++i)
            for (int j = 0; j < 50; ++j) {
                const double x = 0.3 * i, lambda = 0.4 * j;
                ok = ok && noncentral_chisq1_cdf(x + 0.3, lambda) >= noncentral_chisq1_cdf(x, lambda) &&
                     noncentral_chisq1_cdf(x, lambda + 0.4) <= noncentral_chisq1_cdf(x, lambda);
            }
        record(ok, "CDF monotonicity grid");
    }
    {
        bool ok = true;
        std::string worst;
        for (const ModelParams& p : {ModelParams{2, 2, 5, 0}, ModelParams{4, 2, 4, 3}, ModelParams{7, 3, 3, 3}})
            for (Method m : {Method::thresholding, Method::svd}) {
                const auto w = estimate(p, m, SamplerKind::wishart_exact, 20000);
                const auto d = estimate_selection_probability(p, m, SamplerKind::data_simulation, 20000, kSeed + 7,
                                                              opts());
                const double zs = std::abs(w.value - d.value) / joint_se(w, d);
                ok = ok && zs < 4;
                worst += fmt(zs, 2) + " ";
            }
        record(ok, "sampler consistency (|z|: " + worst + ")");
    }
    {
        bool ok = true;
        std::string values;
        for (Method m : {Method::thresholding, Method::svd}) {
            RiskEstimate prev;
            bool first = true;
            for (int n : {4, 8, 16, 32}) {
                const auto e = estimate({n, 2, 10, 10}, m, SamplerKind::data_simulation, 20000);
                if (!first) ok = ok && e.value >= prev.value - 3 * joint_se(e, prev);
                values += fmt(e.value, 3) + " ";
                prev = e;
                first = false;
            }
        }
        record(ok, "sample-size monotonicity (" + values + ")");
    }
    {
        bool ok = true;
        std::string values;
        for (Method m : {Method::thresholding, Method::svd}) {
            RiskEstimate prev;
            bool first = true;
            for (double lambda : {0.25, 0.5, 1.0}) {
                EstimateOptions eo = opts();
                eo.signal_scale = lambda;
                const auto e =
                    estimate_selection_probability({8, 2, 10, 10}, m, SamplerKind::data_simulation, 20000, kSeed, eo);
                if (!first) ok = ok && e.value >= prev.value - 3 * joint_se(e, prev);
                values += fmt(e.value, 3) + " ";
                prev = e;
                first = false;
            }
        }
        record(ok, "signal-strength monotonicity (" + values + ")");
    }
    {
        bool ok = true;
        const ModelParams p{5, 3, 20, 10};
        for (auto s : {SamplerKind::wishart_exact, SamplerKind::data_simulation, SamplerKind::asymptotic_gaussian}) {
            const auto a = estimate(p, Method::svd, s, 2000, 1);
            for (int w : {1, 4, 8}) ok = ok && estimate(p, Method::svd, s, 2000, w).value == a.value;
        }
        DiscrepancyObjective obj;
        obj.n = 3;
        const double base = evaluate_objective_batch(obj, {2, 6, 3}, 1000, 9);
        for (int w : {4, 8}) {
            obj.workers = w;
            ok = ok && evaluate_objective_batch(obj, {2, 6, 3}, 1000, 9) == base;
        }
        Engine rng = make_engine(kSeed, {22});
        const auto d = fixture::planted(12, 15, 6, 2, 0.8, rng);
        const auto x = DataMatrix::unlabeled(d.x), y = DataMatrix::unlabeled(d.y);
        for (NullKind null : {NullKind::global, NullKind::local}) {
            const auto ref = pvalues(x, y, Method::svd, null, 500, 4);
            for (int w : {1, 4, 8}) {
                PermutationOptions po;
                po.workers = w;
                ok = ok && pvalues(x, y, Method::svd, null, 500, 4, po).p_values == ref.p_values;
            }
        }
        SimulateConfig sim;
        sim.run.mc_res = 200;
        sim.n_values = {3, 9};
        sim.p_t_values = {2, 4};
        sim.p = 20;
        sim.q = 10;
        const std::string payload = cmd_simulate(sim).payload.to_csv();
        for (int w : {4, 8}) {
            sim.run.workers = w;
            ok = ok && cmd_simulate(sim).payload.to_csv() == payload;
        }
        record(ok, "determinism and worker invariance");
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    app.add_option("--workers", g_workers, "Worker threads for the parallel criteria")->check(CLI::PositiveNumber);
    app.add_option("--only", only, "Run only these criterion numbers")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"selection probability at n=2, theta=(2,5,0)", table_row_n2},
        {"selection probability at n=6, theta=(2,3,4), both methods", table_row_n6},
        {"exact and asymptotic agree at n=2, theta=(5,35,35)", table_agreement_row},
        {"population search end to end at n=2", search_end_to_end},
        {"closed-form risk against Gaussian Monte Carlo", risk_oracle},
        {"p=600, q=200, p_t=10, n=100 thresholding", large_model_corner},
        {"method crossover at p_t=50, n=12 and n=100", crossover},
        {"n=2 rank-1 equivalence of the two rankings", rank_one_equivalence},
        {"harmonic correction factor for p=585", harmonic},
        {"permutation p-value calibration and planted recovery", fdr_calibration},
        {"property suites", property_suites},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i + 1);
        if (!only.empty() && std::find(only.begin(), only.end(), number) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << number << ". " << criteria[i].first << " | " << o.detail
                  << " (" << fmt(seconds_since(t0), 1) << "s)" << std::endl;
    }
    std::cout << (failed ? std::to_string(failed) + " criterion/criteria failed" : "all criteria passed") << std::endl;
    return failed ? 1 : 0;
}
