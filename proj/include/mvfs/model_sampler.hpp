#pragma once

#include <optional>

#include <Eigen/Dense>

#include "mvfs/random.hpp"

namespace mvfs {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Simulation model parameters. The correlated block is square
/// (q_t = p_t), so p = p_t + p_u and q = p_t + q_u.
struct ModelParams {
    int n = 2;
    int p_t = 1;
    int p_u = 0;
    int q_u = 0;

    int q_t() const { return p_t; }
    int p() const { return p_t + p_u; }
    int q() const { return p_t + q_u; }

    /// Throws InvalidSampleSize / InvalidDimension.
    void validate() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Degrees-of-freedom convention for the sample covariance.
/// `sample`: nu = n - 1 (centered data). `uncentered`: nu = n.
enum class DofConvention { sample, uncentered };

int effective_dof(int n, DofConvention convention);

/// Sigma_{X_t Y_t} = G1 * diag(d) * G2^T.
struct SignalBlock {
    MatrixXd matrix;
    VectorXd singular_values;
    MatrixXd left;   // G1
    MatrixXd right;  // G2

    Index size() const { return matrix.rows(); }
    /// Same G1, G2, with singular values multiplied by `factor`.
    SignalBlock scaled(double factor) const;
};

/// Joint covariance of (X, Y) with identity diagonal blocks. The cross block
/// is zero outside its leading `active_p` x `active_q` corner.
struct CovarianceModel {
    MatrixXd sigma;
    Index p = 0;
    Index q = 0;
    Index active_p = 0;
    Index active_q = 0;
    std::optional<SignalBlock> signal;

    auto cross_block() const { return sigma.topRightCorner(p, q); }
};

/// Local-alternative model: cross block (sqrt(n0)/sqrt(n)) * omega.
struct ScaledOmegaModel {
    MatrixXd omega;
    int n0 = 1;

    void validate() const;
};

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, R's
/// diagonal made positive).
MatrixXd random_orthogonal(Index dim, Engine& rng);

SignalBlock random_signal_block(Index p_t, Engine& rng);

CovarianceModel assemble_sigma(const SignalBlock& signal, Index p_u, Index q_u);

CovarianceModel scaled_sigma_n(const ScaledOmegaModel& scaled, int n);

/// Off-diagonal p x q block of one Wishart(nu, Sigma/nu) draw, via the
/// Bartlett decomposition (lower-trapezoidal when nu < p + q).
MatrixXd sample_cross_cov_wishart(const CovarianceModel& model, int n, Engine& rng,
                                  DofConvention dof = DofConvention::sample);

/// Same distribution as sample_cross_cov_wishart, built from nu Gaussian
/// observations: X ~ N(0, I_p), Y = C^T X + L Z with L L^T = I - C^T C
/// restricted to the active corner. Cost O(nu * p * q).
MatrixXd sample_cross_cov_data(const CovarianceModel& model, int n, Engine& rng,
                               DofConvention dof = DofConvention::sample);

/// Asymptotic Gaussian sampler: independent entries N(sigma_xy(i, j), 1/nu).
MatrixXd sample_cross_cov_asymptotic(const MatrixXd& sigma_xy, int n, Engine& rng,
                                     DofConvention dof = DofConvention::sample);

/// Symmetric square root L (L L^T = m) by Cholesky, falling back to an
/// eigendecomposition with eigenvalues >= -1e-8 clipped to zero.
MatrixXd psd_factor(const MatrixXd& m);

}  // namespace mvfs
