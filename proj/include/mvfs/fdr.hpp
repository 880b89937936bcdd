#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mvfs/selectors.hpp"

namespace mvfs {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Observations in rows, features in columns.
struct DataMatrix {
    MatrixXd values;
    std::vector<std::string> feature_names;
    std::vector<std::string> observation_ids;

    Index observations() const { return values.rows(); }
    Index features() const { return values.cols(); }
    /// Checks shape/label agreement, uniqueness and finiteness; throws DataError.
    void validate() const;
    /// Generates "f1".., "o1".. labels.
    static DataMatrix unlabeled(MatrixXd values);
};

struct CrossMatrix {
    MatrixXd matrix;
    std::vector<std::string> warnings;
};

/// Pearson correlation of every X feature with every Y feature. A constant
/// column gives a zero row/column (0/0 read as 0) and a warning.
CrossMatrix cross_correlation(const DataMatrix& x, const DataMatrix& y);

/// Sample cross-covariance, divisor n - 1.
CrossMatrix cross_covariance(const DataMatrix& x, const DataMatrix& y);

enum class NullKind { global, local };
enum class Statistic { correlation, covariance };
enum class Correction { none, harmonic };
/// How the global null scrambles Y: entries within each observation row
/// (the default), or each column independently across observations.
enum class GlobalShuffle { within_rows, per_column };

struct PermutationOptions {
    Statistic statistic = Statistic::correlation;
    GlobalShuffle shuffle = GlobalShuffle::within_rows;
    /// (1 + count) / (1 + denominator) instead of count / denominator.
    bool add_one = false;
    int workers = 1;
};

struct PValueResult {
    std::vector<double> p_values;
    std::vector<double> scores;
    /// Replicates whose SVD was degenerate and were redrawn.
    long redrawn = 0;
    std::vector<std::string> warnings;
};

/// Permutation p-values. Global: pooled over all features and replicates,
/// p(j) = #{(i, k) : s(j) <= s_i(k)} / (mc_res p). Local: per feature,
/// p(j) = #{i : s(j) <= s_i(j)} / mc_res.
PValueResult pvalues(const DataMatrix& x, const DataMatrix& y, Method method, NullKind null, long mc_res,
                     std::uint64_t seed, const PermutationOptions& options = {});

/// 1-based ascending ranks of p-values; ties go to the higher score, then
/// to the lower index. Pass empty scores for pure index tie-breaking.
std::vector<Index> ascending_ranks(const std::vector<double>& p_values, const std::vector<double>& scores = {});

/// sum_{j=1}^{p} 1/j
double harmonic_factor(Index p);

/// q(j) = c p p(j) / tau(j), c = 1 or the harmonic factor; not clipped at 1.
std::vector<double> qvalues(const std::vector<double>& p_values, const std::vector<Index>& tau, Correction correction);

struct FeatureInference {
    std::string feature_name;
    Index feature_index = 0;
    double score = 0;
    double p_value = 0;
    Index rank = 0;
    double q_value = 0;
};

struct FeatureReport {
    std::vector<FeatureInference> features;  // sorted by rank
    long redrawn = 0;
    std::vector<std::string> warnings;
};

FeatureReport rank_features(const DataMatrix& x, const DataMatrix& y, Method method, NullKind null, long mc_res,
                            Correction correction, std::uint64_t seed, const PermutationOptions& options = {});

}  // namespace mvfs
