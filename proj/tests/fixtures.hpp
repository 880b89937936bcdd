#pragma once

// Simulated data sets shared by the fdr, command and acceptance tests.

#include <cmath>
#include <random>

#include <Eigen/Dense>

namespace fixture {

struct PairedData {
    Eigen::MatrixXd x;  // n x p
    Eigen::MatrixXd y;  // n x q
};

/// X and Y independent standard normal.
template <class Rng>
PairedData independent(int n, int p, int q, Rng& rng) {
    std::normal_distribution<double> z;
    PairedData d{Eigen::MatrixXd(n, p), Eigen::MatrixXd(n, q)};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) d.x(i, j) = z(rng);
        for (int j = 0; j < q; ++j) d.y(i, j) = z(rng);
    }
    return d;
}

/// A shared latent factor z drives the first `planted` X features and the
/// first `planted` Y variates: each is sqrt(rho) z + sqrt(1 - rho) noise, so
/// every planted (feature, variate) pair has population correlation rho.
template <class Rng>
PairedData planted(int n, int p, int q, int planted, double rho, Rng& rng) {
    std::normal_distribution<double> z;
    PairedData d = independent(n, p, q, rng);
    const double load = std::sqrt(rho);
    const double noise = std::sqrt(1.0 - rho);
    for (int i = 0; i < n; ++i) {
        const double latent = z(rng);
        for (int j = 0; j < planted; ++j) {
            d.x(i, j) = load * latent + noise * d.x(i, j);
            d.y(i, j) = load * latent + noise * d.y(i, j);
        }
    }
    return d;
}

}  // namespace fixture
