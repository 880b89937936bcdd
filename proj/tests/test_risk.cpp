#include "doctest.h"
#include "mvfs/error.hpp"
#include "mvfs/risk.hpp"
#include "oracles.hpp"

using namespace mvfs;

TEST_CASE("noncentral_chisq1_cdf") {
    CHECK(noncentral_chisq1_cdf(1.0, 0.0) == doctest::Approx(0.6826894921370859).epsilon(1e-14));
    CHECK(noncentral_chisq1_cdf(0.0, 3.0) == 0.0);
    CHECK_THROWS_AS(noncentral_chisq1_cdf(-1.0, 0.0), DomainError);
    CHECK_THROWS_AS(noncentral_chisq1_cdf(1.0, -0.5), DomainError);

    SUBCASE("agrees with direct simulation") {
        std::mt19937_64 rng(77);
        std::normal_distribution<double> z(std::sqrt(1.8), 1.0);
        const long draws = 10'000'000;
        long below = 0;
        for (long i = 0; i < draws; ++i) {
            const double v = z(rng);
            below += v * v <= 2.5;
        }
        const double f = double(below) / draws;
        CHECK(std::abs(noncentral_chisq1_cdf(2.5, 1.8) - f) < 4 * std::sqrt(f * (1 - f) / draws));
    }

    SUBCASE("monotone on a 50 x 50 grid") {
        for (int i = 0; i < 50; ++i) {
            for (int j = 0; j < 50; ++j) {
                const double x = 0.3 * i;
                const double lambda = 0.4 * j;
                CHECK(noncentral_chisq1_cdf(x + 0.3, lambda) >= noncentral_chisq1_cdf(x, lambda));
                CHECK(noncentral_chisq1_cdf(x, lambda + 0.4) <= noncentral_chisq1_cdf(x, lambda));
            }
        }
    }
}

TEST_CASE("asymptotic_thresholding_risk") {
    CHECK(asymptotic_thresholding_risk(MatrixXd::Zero(2, 4), 3) == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(std::abs(asymptotic_thresholding_risk(MatrixXd::Zero(2, 3), 5) - 5.0 / 7.0) < 1e-6);
    CHECK(std::abs(asymptotic_thresholding_risk(MatrixXd::Zero(10, 200), 590) - 590.0 / 600.0) < 1e-6);
    CHECK(asymptotic_thresholding_risk(MatrixXd::Constant(2, 2, 100.0), 5) < 1e-6);
    CHECK(asymptotic_thresholding_risk(MatrixXd::Constant(2, 2, 1.0), 0) == 0.0);
    CHECK_THROWS_AS(asymptotic_thresholding_risk(MatrixXd::Zero(2, 0), 3), InvalidDimension);

    SUBCASE("agrees with simulation of the Gaussian limit") {
        std::mt19937_64 rng(2024);
        std::normal_distribution<double> z;
        MatrixXd signal(2, 3);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 3; ++j) signal(i, j) = 1.5 * z(rng);
        const long draws = 200'000;
        long noise_wins = 0;
        for (long k = 0; k < draws; ++k) {
            double sig = 0, noise = 0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 3; ++j) sig = std::max(sig, std::abs(signal(i, j) + z(rng)));
            for (int i = 0; i < 5 * 3; ++i) noise = std::max(noise, std::abs(z(rng)));
            noise_wins += noise > sig;
        }
        const double f = double(noise_wins) / draws;
        CHECK(std::abs(asymptotic_thresholding_risk(signal, 5) - f) < 4 * std::sqrt(f * (1 - f) / draws));
    }
}

TEST_CASE("estimate_selection_probability") {
    const ModelParams noiseless{5, 3, 0, 4};
    for (auto sampler : {SamplerKind::wishart_exact, SamplerKind::data_simulation, SamplerKind::asymptotic_gaussian})
        for (auto method : {Method::thresholding, Method::svd}) {
            const RiskEstimate e = estimate_selection_probability(noiseless, method, sampler, 200, 1);
            CHECK(e.value == 1.0);
            CHECK(e.std_error == 0.0);
        }

    const ModelParams params{4, 2, 5, 3};
    const RiskEstimate a = estimate_selection_probability(params, Method::svd, SamplerKind::wishart_exact, 3000, 42);
    const RiskEstimate b = estimate_selection_probability(params, Method::svd, SamplerKind::wishart_exact, 3000, 42);
    CHECK(a.value == b.value);
    CHECK(a.trials == 3000);
    CHECK(a.discarded == 0);
    CHECK(a.std_error == doctest::Approx(std::sqrt(a.value * (1 - a.value) / 3000)));
    CHECK(a.expected_loss() == 1.0 - a.value);
    CHECK(a.value == double(a.successes) / 3000);

    EstimateOptions four;
    four.workers = 4;
    const RiskEstimate c =
        estimate_selection_probability(params, Method::svd, SamplerKind::wishart_exact, 3000, 42, four);
    CHECK(c.value == a.value);

    CHECK_THROWS_AS(estimate_selection_probability({1, 2, 3, 3}, Method::svd, SamplerKind::wishart_exact, 10, 1),
                    InvalidSampleSize);
    CHECK_THROWS_AS(estimate_selection_probability(params, Method::svd, SamplerKind::wishart_exact, 0, 1), DomainError);

    SUBCASE("n = 2 exact thresholding picks uniformly among features") {
        // With one degree of freedom S_xy = x y^T, so the top row is argmax |x_i|
        // and x ~ N(0, I): P = p_t / p.
        const RiskEstimate e =
            estimate_selection_probability({2, 2, 5, 0}, Method::thresholding, SamplerKind::wishart_exact, 20000, 9);
        CHECK(std::abs(e.value - 2.0 / 7.0) < 4 * e.std_error);
    }
}

TEST_CASE("sweep_risk_surface") {
    const std::vector<ModelParams> one{{3, 2, 4, 1}};
    const auto sweep = sweep_risk_surface(one, Method::svd, SamplerKind::data_simulation, 500, 77);
    REQUIRE(sweep.size() == 1);
    const auto direct = estimate_selection_probability(one[0], Method::svd, SamplerKind::data_simulation, 500, 77);
    CHECK(sweep[0].estimate->value == direct.value);

    std::vector<ModelParams> grid;
    for (int n : {3, 6})
        for (int p_t : {1, 3}) grid.push_back({n, p_t, 6, 4});
    grid.push_back({1, 2, 2, 2});
    EstimateOptions serial, parallel;
    parallel.workers = 8;
    const auto a = sweep_risk_surface(grid, Method::thresholding, SamplerKind::wishart_exact, 400, 5, serial);
    const auto b = sweep_risk_surface(grid, Method::thresholding, SamplerKind::wishart_exact, 400, 5, parallel);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        REQUIRE(a[i].estimate);
        CHECK(a[i].estimate->value == b[i].estimate->value);
    }
    CHECK(!a.back().estimate);
    CHECK(!a.back().error.empty());
    CHECK_THROWS_AS(sweep_risk_surface({}, Method::svd, SamplerKind::data_simulation, 10, 1), DomainError);
}
