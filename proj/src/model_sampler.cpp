#include "mvfs/model_sampler.hpp"

#include <cmath>
#include <string>

#include "mvfs/error.hpp"

namespace mvfs {

namespace {

constexpr double kPsdTolerance = 1e-8;

void require_sample_size(int n) {
    if (n < 2) throw InvalidSampleSize("sample size n must be >= 2, got " + std::to_string(n));
}

}  // namespace

void ModelParams::validate() const {
    require_sample_size(n);
    if (p_t < 1) throw InvalidDimension("p_t must be >= 1, got " + std::to_string(p_t));
    if (p_u < 0 || q_u < 0) throw InvalidDimension("p_u and q_u must be nonnegative");
}

int effective_dof(int n, DofConvention convention) {
    require_sample_size(n);
    return convention == DofConvention::sample ? n - 1 : n;
}

SignalBlock SignalBlock::scaled(double factor) const {
    SignalBlock out = *this;
    out.singular_values *= factor;
    out.matrix *= factor;
    return out;
}

void ScaledOmegaModel::validate() const {
    if (n0 < 1) throw DomainError("n0 must be >= 1");
    if (omega.size() == 0) throw InvalidDimension("omega must be nonempty");
    Eigen::JacobiSVD<MatrixXd> svd(omega);
    if (svd.singularValues()(0) > 1.0 + 1e-12)
        throw DomainError("largest singular value of omega exceeds 1; Sigma(n0) would not be PSD");
}

MatrixXd random_orthogonal(Index dim, Engine& rng) {
    if (dim < 1) throw InvalidDimension("orthogonal matrix dimension must be >= 1");
    const MatrixXd gaussian = standard_normal_matrix(dim, dim, rng);
    Eigen::HouseholderQR<MatrixXd> qr(gaussian);
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(dim, dim);
    const VectorXd r_diag = qr.matrixQR().diagonal();
    for (Index j = 0; j < dim; ++j)
        if (r_diag(j) < 0) q.col(j) = -q.col(j);
    return q;
}

SignalBlock random_signal_block(Index p_t, Engine& rng) {
    if (p_t < 1) throw InvalidDimension("p_t must be >= 1");
    SignalBlock block;
    block.left = random_orthogonal(p_t, rng);
    block.right = random_orthogonal(p_t, rng);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    block.singular_values.resize(p_t);
    for (Index i = 0; i < p_t; ++i) block.singular_values(i) = uniform(rng);
    block.matrix = block.left * block.singular_values.asDiagonal() * block.right.transpose();
    return block;
}

CovarianceModel assemble_sigma(const SignalBlock& signal, Index p_u, Index q_u) {
    const Index p_t = signal.size();
    if (p_t < 1) throw InvalidDimension("signal block is empty");
    if (p_u < 0 || q_u < 0) throw InvalidDimension("p_u and q_u must be nonnegative");
    CovarianceModel model;
    model.p = p_t + p_u;
    model.q = p_t + q_u;
    model.active_p = p_t;
    model.active_q = p_t;
    model.sigma = MatrixXd::Identity(model.p + model.q, model.p + model.q);
    model.sigma.block(0, model.p, p_t, p_t) = signal.matrix;
    model.sigma.block(model.p, 0, p_t, p_t) = signal.matrix.transpose();
    model.signal = signal;
    return model;
}

CovarianceModel scaled_sigma_n(const ScaledOmegaModel& scaled, int n) {
    scaled.validate();
    if (n < scaled.n0)
        throw DomainError("n = " + std::to_string(n) + " is below n0 = " + std::to_string(scaled.n0) +
                          "; Sigma(n) is only guaranteed PSD for n >= n0");
    CovarianceModel model;
    model.p = scaled.omega.rows();
    model.q = scaled.omega.cols();
    model.active_p = model.p;
    model.active_q = model.q;
    const double factor = n == scaled.n0 ? 1.0 : std::sqrt(static_cast<double>(scaled.n0) / n);
    model.sigma = MatrixXd::Identity(model.p + model.q, model.p + model.q);
    model.sigma.topRightCorner(model.p, model.q) = factor * scaled.omega;
    model.sigma.bottomLeftCorner(model.q, model.p) = factor * scaled.omega.transpose();
    return model;
}

MatrixXd psd_factor(const MatrixXd& m) {
    Eigen::LLT<MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m);
    VectorXd values = eig.eigenvalues();
    if (values.minCoeff() < -kPsdTolerance)
        throw DegenerateMatrix("covariance matrix is not positive semidefinite (eigenvalue " +
                               std::to_string(values.minCoeff()) + ")");
    values = values.cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * values.asDiagonal();
}

MatrixXd sample_cross_cov_wishart(const CovarianceModel& model, int n, Engine& rng, DofConvention dof) {
    const int nu = effective_dof(n, dof);
    const Index d = model.p + model.q;
    const Index m = std::min<Index>(d, nu);
    const MatrixXd factor = psd_factor(model.sigma);

    // Bartlett factor: chi(nu - i) on the diagonal, N(0, 1) below it.
    MatrixXd bartlett = MatrixXd::Zero(d, m);
    std::normal_distribution<double> normal;
    for (Index j = 0; j < m; ++j) {
        std::chi_squared_distribution<double> chi2(static_cast<double>(nu - j));
        bartlett(j, j) = std::sqrt(chi2(rng));
        for (Index i = j + 1; i < d; ++i) bartlett(i, j) = normal(rng);
    }
    const MatrixXd root = factor * bartlett;
    return root.topRows(model.p) * root.bottomRows(model.q).transpose() / static_cast<double>(nu);
}

MatrixXd sample_cross_cov_data(const CovarianceModel& model, int n, Engine& rng, DofConvention dof) {
    const int nu = effective_dof(n, dof);
    const Index pa = model.active_p;
    const Index qa = model.active_q;
    const auto cross = model.sigma.block(0, model.p, pa, qa);

    MatrixXd conditional;
    if (model.signal) {
        const VectorXd residual = (1.0 - model.signal->singular_values.array().square()).max(0.0).sqrt();
        conditional = model.signal->right * residual.asDiagonal();
    } else {
        conditional = psd_factor(MatrixXd::Identity(qa, qa) - cross.transpose() * cross);
    }

    const MatrixXd x = standard_normal_matrix(model.p, nu, rng);
    MatrixXd y = standard_normal_matrix(model.q, nu, rng);
    y.topRows(qa) = cross.transpose() * x.topRows(pa) + conditional * y.topRows(qa);
    return x * y.transpose() / static_cast<double>(nu);
}

MatrixXd sample_cross_cov_asymptotic(const MatrixXd& sigma_xy, int n, Engine& rng, DofConvention dof) {
    const int nu = effective_dof(n, dof);
    const double scale = 1.0 / std::sqrt(static_cast<double>(nu));
    return sigma_xy + scale * standard_normal_matrix(sigma_xy.rows(), sigma_xy.cols(), rng);
}

}  // namespace mvfs
