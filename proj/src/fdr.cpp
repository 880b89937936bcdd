#include "mvfs/fdr.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "mvfs/error.hpp"
#include "mvfs/parallel.hpp"
#include "mvfs/random.hpp"

namespace mvfs {

namespace {

constexpr int kMaxRedraws = 100;

void check_pair(const DataMatrix& x, const DataMatrix& y, Index min_observations) {
    x.validate();
    y.validate();
    if (x.observations() != y.observations())
        throw DataError("X has " + std::to_string(x.observations()) + " observations but Y has " +
                        std::to_string(y.observations()));
    if (x.observations() < min_observations)
        throw DataError("need at least " + std::to_string(min_observations) + " observations");
}

MatrixXd centered(const MatrixXd& m) { return m.rowwise() - m.colwise().mean(); }

/// Centers and scales columns to unit norm; constant columns become zero.
MatrixXd unit_columns(const MatrixXd& m, std::vector<Index>* constant = nullptr) {
    MatrixXd c = centered(m);
    for (Index j = 0; j < c.cols(); ++j) {
        const double norm = c.col(j).norm();
        const double scale = m.col(j).cwiseAbs().maxCoeff();
        if (norm <= 1e-14 * std::max(scale, 1.0) * std::sqrt(static_cast<double>(c.rows()))) {
            c.col(j).setZero();
            if (constant) constant->push_back(j);
        } else {
            c.col(j) /= norm;
        }
    }
    return c;
}

MatrixXd statistic_matrix(const MatrixXd& x_prepared, const MatrixXd& y, Statistic statistic) {
    if (statistic == Statistic::correlation) return x_prepared.transpose() * unit_columns(y);
    return x_prepared.transpose() * centered(y) / static_cast<double>(y.rows() - 1);
}

MatrixXd prepare_x(const DataMatrix& x, Statistic statistic) {
    return statistic == Statistic::correlation ? unit_columns(x.values) : centered(x.values);
}

}  // namespace

void DataMatrix::validate() const {
    if (values.rows() < 1 || values.cols() < 1) throw DataError("data matrix is empty");
    if (static_cast<Index>(feature_names.size()) != values.cols() ||
        static_cast<Index>(observation_ids.size()) != values.rows())
        throw DataError("label counts do not match the matrix shape");
    if (!values.allFinite()) throw DataError("data matrix contains non-finite values");
    auto unique = [](const std::vector<std::string>& labels, const char* what) {
        std::set<std::string> seen;
        for (const auto& l : labels)
            if (!seen.insert(l).second) throw DataError(std::string("duplicate ") + what + " label '" + l + "'");
    };
    unique(feature_names, "feature");
    unique(observation_ids, "observation");
}

DataMatrix DataMatrix::unlabeled(MatrixXd values) {
    DataMatrix m;
    m.values = std::move(values);
    for (Index j = 0; j < m.values.cols(); ++j) m.feature_names.push_back("f" + std::to_string(j + 1));
    for (Index i = 0; i < m.values.rows(); ++i) m.observation_ids.push_back("o" + std::to_string(i + 1));
    return m;
}

CrossMatrix cross_correlation(const DataMatrix& x, const DataMatrix& y) {
    check_pair(x, y, 3);
    CrossMatrix out;
    std::vector<Index> constant_x, constant_y;
    out.matrix = unit_columns(x.values, &constant_x).transpose() * unit_columns(y.values, &constant_y);
    for (Index j : constant_x)
        out.warnings.push_back("X feature '" + x.feature_names[static_cast<std::size_t>(j)] +
                               "' is constant; its correlations are set to 0");
    for (Index j : constant_y)
        out.warnings.push_back("Y feature '" + y.feature_names[static_cast<std::size_t>(j)] +
                               "' is constant; its correlations are set to 0");
    return out;
}

CrossMatrix cross_covariance(const DataMatrix& x, const DataMatrix& y) {
    check_pair(x, y, 2);
    return {centered(x.values).transpose() * centered(y.values) / static_cast<double>(x.observations() - 1), {}};
}

PValueResult pvalues(const DataMatrix& x, const DataMatrix& y, Method method, NullKind null, long mc_res,
                     std::uint64_t seed, const PermutationOptions& options) {
    if (mc_res < 1) throw DomainError("mc_res must be >= 1");
    const CrossMatrix observed = options.statistic == Statistic::correlation ? cross_correlation(x, y)
                                                                             : cross_covariance(x, y);
    const MatrixXd x_prepared = prepare_x(x, options.statistic);
    const Index p = x.features();
    const Index n = y.observations();
    const Index q = y.features();

    PValueResult result;
    result.warnings = observed.warnings;
    const VectorXd s = score(method, observed.matrix);
    result.scores.assign(s.data(), s.data() + s.size());

    MatrixXd null_scores(p, mc_res);
    std::vector<int> redraws(static_cast<std::size_t>(mc_res), 0);
    parallel_for(static_cast<std::size_t>(mc_res), options.workers, [&](std::size_t i) {
        for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
            Engine rng = make_engine(seed, {static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(attempt)});
            MatrixXd permuted(n, q);
            if (null == NullKind::local) {
                std::vector<Index> perm(static_cast<std::size_t>(n));
                std::iota(perm.begin(), perm.end(), Index{0});
                std::shuffle(perm.begin(), perm.end(), rng);
                for (Index r = 0; r < n; ++r) permuted.row(r) = y.values.row(perm[static_cast<std::size_t>(r)]);
            } else if (options.shuffle == GlobalShuffle::within_rows) {
                std::vector<double> row(static_cast<std::size_t>(q));
                for (Index r = 0; r < n; ++r) {
                    for (Index c = 0; c < q; ++c) row[static_cast<std::size_t>(c)] = y.values(r, c);
                    std::shuffle(row.begin(), row.end(), rng);
                    for (Index c = 0; c < q; ++c) permuted(r, c) = row[static_cast<std::size_t>(c)];
                }
            } else {
                std::vector<double> col(static_cast<std::size_t>(n));
                for (Index c = 0; c < q; ++c) {
                    for (Index r = 0; r < n; ++r) col[static_cast<std::size_t>(r)] = y.values(r, c);
                    std::shuffle(col.begin(), col.end(), rng);
                    for (Index r = 0; r < n; ++r) permuted(r, c) = col[static_cast<std::size_t>(r)];
                }
            }
            try {
                null_scores.col(static_cast<Index>(i)) =
                    score(method, statistic_matrix(x_prepared, permuted, options.statistic));
                return;
            } catch (const DegenerateMatrix&) {
                ++redraws[i];
            }
        }
        throw DegenerateMatrix("permutation replicate " + std::to_string(i) + " stayed degenerate after " +
                               std::to_string(kMaxRedraws) + " redraws");
    });
    result.redrawn = std::accumulate(redraws.begin(), redraws.end(), 0L);

    const double extra = options.add_one ? 1.0 : 0.0;
    result.p_values.resize(static_cast<std::size_t>(p));
    if (null == NullKind::global) {
        std::vector<double> pool(null_scores.data(), null_scores.data() + null_scores.size());
        std::sort(pool.begin(), pool.end());
        const double denominator = static_cast<double>(pool.size());
        for (Index j = 0; j < p; ++j) {
            const auto at_least = pool.end() - std::lower_bound(pool.begin(), pool.end(), s(j));
            result.p_values[static_cast<std::size_t>(j)] =
                (static_cast<double>(at_least) + extra) / (denominator + extra);
        }
    } else {
        for (Index j = 0; j < p; ++j) {
            const auto at_least = (null_scores.row(j).array() >= s(j)).count();
            result.p_values[static_cast<std::size_t>(j)] =
                (static_cast<double>(at_least) + extra) / (static_cast<double>(mc_res) + extra);
        }
    }
    return result;
}

std::vector<Index> ascending_ranks(const std::vector<double>& p_values, const std::vector<double>& scores) {
    if (!scores.empty() && scores.size() != p_values.size())
        throw DomainError("scores and p-values differ in length");
    std::vector<Index> order(p_values.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        const auto ua = static_cast<std::size_t>(a);
        const auto ub = static_cast<std::size_t>(b);
        if (p_values[ua] != p_values[ub]) return p_values[ua] < p_values[ub];
        if (!scores.empty()) return scores[ua] > scores[ub];
        return false;
    });
    std::vector<Index> tau(p_values.size());
    for (std::size_t r = 0; r < order.size(); ++r) tau[static_cast<std::size_t>(order[r])] = static_cast<Index>(r + 1);
    return tau;
}

double harmonic_factor(Index p) {
    double sum = 0.0;
    for (Index j = p; j >= 1; --j) sum += 1.0 / static_cast<double>(j);
    return sum;
}

std::vector<double> qvalues(const std::vector<double>& p_values, const std::vector<Index>& tau, Correction correction) {
    if (tau.size() != p_values.size()) throw DomainError("ranking and p-values differ in length");
    const auto p = static_cast<Index>(p_values.size());
    const double c = correction == Correction::harmonic ? harmonic_factor(p) : 1.0;
    std::vector<double> q(p_values.size());
    for (std::size_t j = 0; j < q.size(); ++j) {
        if (tau[j] < 1 || tau[j] > p) throw DomainError("ranking entry out of range");
        q[j] = c * static_cast<double>(p) * p_values[j] / static_cast<double>(tau[j]);
    }
    return q;
}

FeatureReport rank_features(const DataMatrix& x, const DataMatrix& y, Method method, NullKind null, long mc_res,
                            Correction correction, std::uint64_t seed, const PermutationOptions& options) {
    const PValueResult pv = pvalues(x, y, method, null, mc_res, seed, options);
    const auto tau = ascending_ranks(pv.p_values, pv.scores);
    const auto q = qvalues(pv.p_values, tau, correction);

    FeatureReport report;
    report.redrawn = pv.redrawn;
    report.warnings = pv.warnings;
    report.features.resize(pv.p_values.size());
    for (std::size_t j = 0; j < pv.p_values.size(); ++j) {
        auto& f = report.features[static_cast<std::size_t>(tau[j] - 1)];
        f.feature_name = x.feature_names[j];
        f.feature_index = static_cast<Index>(j);
        f.score = pv.scores[j];
        f.p_value = pv.p_values[j];
        f.rank = tau[j];
        f.q_value = q[j];
    }
    return report;
}

}  // namespace mvfs
