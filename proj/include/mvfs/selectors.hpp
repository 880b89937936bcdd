#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mvfs/error.hpp"
#include "mvfs/random.hpp"

namespace mvfs {

template <typename Scalar>
using ScoreVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class Method { thresholding, svd };

/// order[r] is the (0-based) feature holding rank r + 1.
struct Ranking {
    std::vector<Eigen::Index> order;

    Eigen::Index top() const { return order.front(); }
    Eigen::Index size() const { return static_cast<Eigen::Index>(order.size()); }
    /// position[i] = 0-based rank of feature i.
    std::vector<Eigen::Index> positions() const {
        std::vector<Eigen::Index> pos(order.size());
        for (std::size_t r = 0; r < order.size(); ++r) pos[static_cast<std::size_t>(order[r])] = static_cast<Eigen::Index>(r);
        return pos;
    }
};

/// Row-wise infinity norm: s(i) = max_j |T(i, j)|.
template <typename Derived>
ScoreVector<typename Derived::Scalar> score_thresholding(const Eigen::MatrixBase<Derived>& t) {
    return t.cwiseAbs().rowwise().maxCoeff();
}

template <typename Scalar>
struct SingularVectorResult {
    ScoreVector<Scalar> u;
    Scalar sigma = 0;
    int iterations = 0;
    bool dense_fallback = false;
    /// Top two singular values coincide; u is some vector of the top subspace.
    bool tied_top = false;
};

struct PowerIterationSettings {
    double tolerance = 1e-11;
    int max_iterations = 10000;
    /// Give up on power iteration once it has cost this many dense
    /// eigensolves' worth of work (per unit of Gram dimension).
    int iterations_per_dimension = 10;
};

namespace detail {

template <typename Scalar>
void fix_sign(ScoreVector<Scalar>& u) {
    Eigen::Index k;
    u.cwiseAbs().maxCoeff(&k);
    if (u(k) < 0) u = -u;
}

}  // namespace detail

/// First left singular vector of T by power iteration on the smaller Gram
/// matrix, with a dense symmetric eigensolver as fallback when the spectral
/// gap is too small to converge within budget.
template <typename Derived>
SingularVectorResult<typename Derived::Scalar> first_left_singular_vector(const Eigen::MatrixBase<Derived>& t,
                                                                          const PowerIterationSettings& settings = {}) {
    using Scalar = typename Derived::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = ScoreVector<Scalar>;

    if (t.size() == 0 || t.cwiseAbs().maxCoeff() == Scalar(0))
        throw DegenerateMatrix("cross-covariance matrix is zero; no principal direction");

    const bool left_gram = t.rows() <= t.cols();
    const Matrix gram = left_gram ? Matrix(t * t.transpose()) : Matrix(t.transpose() * t);
    const Eigen::Index k = gram.rows();

    SingularVectorResult<Scalar> result;
    Vector x(k);
    {
        Engine start = make_engine(0x5eed5eedULL, {static_cast<std::uint64_t>(k)});
        std::normal_distribution<Scalar> normal;
        for (Eigen::Index i = 0; i < k; ++i) x(i) = normal(start);
        x.normalize();
    }

    const int budget = std::min<int>(settings.max_iterations,
                                     std::max<int>(100, settings.iterations_per_dimension * static_cast<int>(k)));
    Scalar rho = 0;
    bool converged = false;
    Vector w(k);
    for (int it = 1; it <= budget; ++it) {
        w.noalias() = gram * x;
        rho = x.dot(w);
        result.iterations = it;
        if (!(rho > Scalar(0))) break;
        const Scalar residual = (w - rho * x).norm();
        x = w / w.norm();
        if (residual <= Scalar(settings.tolerance) * rho) {
            converged = true;
            break;
        }
    }

    if (!converged) {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
        const auto& values = eig.eigenvalues();
        x = eig.eigenvectors().col(k - 1);
        rho = values(k - 1);
        result.dense_fallback = true;
        result.tied_top = k > 1 && values(k - 1) - values(k - 2) <= Scalar(1e-12) * values(k - 1);
    }

    result.sigma = std::sqrt(rho);
    if (left_gram) {
        result.u = x;
    } else {
        result.u = t * x;
        result.u.normalize();
    }
    detail::fix_sign(result.u);
    return result;
}

/// s(i) = |u_1(i)|.
template <typename Derived>
ScoreVector<typename Derived::Scalar> score_svd(const Eigen::MatrixBase<Derived>& t) {
    return first_left_singular_vector(t).u.cwiseAbs();
}

template <typename Derived>
ScoreVector<typename Derived::Scalar> score(Method method, const Eigen::MatrixBase<Derived>& t) {
    return method == Method::thresholding ? score_thresholding(t) : score_svd(t);
}

/// Descending score order; equal scores go to the lower index first.
template <typename Derived>
Ranking ranking_from_scores(const Eigen::MatrixBase<Derived>& s) {
    Ranking ranking;
    ranking.order.resize(static_cast<std::size_t>(s.size()));
    std::iota(ranking.order.begin(), ranking.order.end(), Eigen::Index{0});
    std::stable_sort(ranking.order.begin(), ranking.order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return s(a) > s(b); });
    return ranking;
}

/// Equivalent to ranking_from_scores(s).top() without the sort.
template <typename Derived>
Eigen::Index top_feature(const Eigen::MatrixBase<Derived>& s) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < s.size(); ++i)
        if (s(i) > s(best)) best = i;
    return best;
}

/// 1 iff the top-ranked feature is a noise feature (0-based index >= p_t).
inline int zero_one_loss(const Ranking& psi, Eigen::Index p_t) {
    if (p_t < 0 || p_t > psi.size())
        throw DomainError("p_t must lie in [0, p]; got " + std::to_string(p_t));
    return psi.top() >= p_t ? 1 : 0;
}

}  // namespace mvfs
