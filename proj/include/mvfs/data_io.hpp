#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mvfs/fdr.hpp"

namespace mvfs {

/// observations_as_rows: header = corner label then feature names, one
/// observation per line led by its id. features_as_rows: the transpose.
enum class Orientation { observations_as_rows, features_as_rows };

/// Raw records of any CSV this tool writes (quoted fields unescaped).
std::vector<std::vector<std::string>> read_csv_records(std::istream& in);

DataMatrix read_csv(std::istream& in, Orientation orientation, const std::string& source = "<stream>");
DataMatrix ingest_csv(const std::string& path, Orientation orientation);

void write_csv(std::ostream& out, const DataMatrix& m, Orientation orientation = Orientation::observations_as_rows);
void write_csv_file(const std::string& path, const DataMatrix& m,
                    Orientation orientation = Orientation::observations_as_rows);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

struct StandardizeResult {
    DataMatrix matrix;
    int iterations = 0;
    bool converged = false;
};

/// Alternates column and row standardization (mean 0, variance 1 with
/// divisor n; the n - 1 divisor has no joint fixed point unless square)
/// until every row and column is within tol, or max_iter rounds elapse.
StandardizeResult standardize_rows_columns(const DataMatrix& m, double tol = 1e-8, int max_iter = 50);

struct LogProportionResult {
    DataMatrix matrix;
    /// Observations that contained zero counts and received the pseudocount.
    std::vector<std::string> pseudocounted;
};

/// Per observation: add `pseudocount` to every entry if the row has a zero,
/// divide by the row sum, take natural logs.
LogProportionResult counts_to_log_proportions(const DataMatrix& m, double pseudocount = 0.5);

}  // namespace mvfs
