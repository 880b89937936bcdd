#include "mvfs/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mvfs/error.hpp"

namespace mvfs {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cell += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else {
            cell += ch;
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& raw, const std::string& where) {
    const std::string text = trim(raw);
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(value))
        throw DataError("non-numeric cell '" + text + "' at " + where);
    return value;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

void check_spread(const Eigen::Ref<const Eigen::VectorXd>& v, const std::string& what) {
    if (v.maxCoeff() == v.minCoeff()) throw DataError(what + " is constant; standardization is undefined");
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::vector<std::vector<std::string>> read_csv_records(std::istream& in) {
    std::vector<std::vector<std::string>> records;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        records.push_back(split_line(line));
    }
    return records;
}

DataMatrix read_csv(std::istream& in, Orientation orientation, const std::string& source) {
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) {
            header = split_line(line);
            break;
        }
    }
    if (header.size() < 2) throw DataError(source + ": missing header row with at least one column label");
    for (auto& h : header) h = trim(h);

    std::vector<std::string> row_labels;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != header.size())
            throw DataError(source + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                            " cells, header has " + std::to_string(header.size()));
        row_labels.push_back(trim(cells[0]));
        std::vector<double> values;
        for (std::size_t c = 1; c < cells.size(); ++c)
            values.push_back(parse_number(cells[c], source + " line " + std::to_string(line_no) + ", column " +
                                                        std::to_string(c + 1) + " ('" + header[c] + "')"));
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw DataError(source + ": no data rows");

    const Index r = static_cast<Index>(rows.size());
    const Index c = static_cast<Index>(header.size() - 1);
    MatrixXd body(r, c);
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < c; ++j) body(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    std::vector<std::string> column_labels(header.begin() + 1, header.end());

    DataMatrix m;
    if (orientation == Orientation::observations_as_rows) {
        m.values = std::move(body);
        m.observation_ids = std::move(row_labels);
        m.feature_names = std::move(column_labels);
    } else {
        m.values = body.transpose();
        m.observation_ids = std::move(column_labels);
        m.feature_names = std::move(row_labels);
    }
    m.validate();
    return m;
}

DataMatrix ingest_csv(const std::string& path, Orientation orientation) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_csv(in, orientation, path);
}

void write_csv(std::ostream& out, const DataMatrix& m, Orientation orientation) {
    const bool obs_rows = orientation == Orientation::observations_as_rows;
    const auto& row_labels = obs_rows ? m.observation_ids : m.feature_names;
    const auto& col_labels = obs_rows ? m.feature_names : m.observation_ids;
    out << (obs_rows ? "observation" : "feature");
    for (const auto& l : col_labels) out << ',' << quote_if_needed(l);
    out << '\n';
    for (std::size_t i = 0; i < row_labels.size(); ++i) {
        out << quote_if_needed(row_labels[i]);
        for (std::size_t j = 0; j < col_labels.size(); ++j) {
            const double v = obs_rows ? m.values(static_cast<Index>(i), static_cast<Index>(j))
                                      : m.values(static_cast<Index>(j), static_cast<Index>(i));
            out << ',' << format_double(v);
        }
        out << '\n';
    }
}

void write_csv_file(const std::string& path, const DataMatrix& m, Orientation orientation) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    write_csv(out, m, orientation);
}

StandardizeResult standardize_rows_columns(const DataMatrix& m, double tol, int max_iter) {
    m.validate();
    if (m.observations() < 2 || m.features() < 2)
        throw DataError("standardization needs at least two rows and two columns");
    for (Index j = 0; j < m.features(); ++j) check_spread(m.values.col(j), "column '" + m.feature_names[static_cast<std::size_t>(j)] + "'");
    for (Index i = 0; i < m.observations(); ++i)
        check_spread(m.values.row(i).transpose(), "row '" + m.observation_ids[static_cast<std::size_t>(i)] + "'");

    StandardizeResult result{m, 0, false};
    MatrixXd& v = result.matrix.values;
    auto standardize_columns = [](MatrixXd& a) {
        a.rowwise() -= a.colwise().mean();
        const Eigen::RowVectorXd sd = (a.colwise().squaredNorm() / static_cast<double>(a.rows())).cwiseSqrt();
        a.array().rowwise() /= sd.array();
    };
    auto within_tolerance = [&](const MatrixXd& a) {
        const double nr = static_cast<double>(a.rows());
        const double nc = static_cast<double>(a.cols());
        const Eigen::RowVectorXd col_mean = a.colwise().mean();
        const Eigen::VectorXd row_mean = a.rowwise().mean();
        const Eigen::RowVectorXd col_var = (a.rowwise() - col_mean).colwise().squaredNorm() / nr;
        const Eigen::VectorXd row_var = (a.colwise() - row_mean).rowwise().squaredNorm() / nc;
        return col_mean.cwiseAbs().maxCoeff() <= tol && row_mean.cwiseAbs().maxCoeff() <= tol &&
               (col_var.array() - 1).abs().maxCoeff() <= tol && (row_var.array() - 1).abs().maxCoeff() <= tol;
    };

    if (within_tolerance(v)) {
        result.converged = true;
        return result;
    }
    for (int it = 1; it <= max_iter; ++it) {
        standardize_columns(v);
        MatrixXd t = v.transpose();
        standardize_columns(t);
        v = t.transpose();
        result.iterations = it;
        if (!v.allFinite()) throw DataError("standardization produced non-finite values (a row or column collapsed)");
        if (within_tolerance(v)) {
            result.converged = true;
            break;
        }
    }
    return result;
}

LogProportionResult counts_to_log_proportions(const DataMatrix& m, double pseudocount) {
    m.validate();
    if ((m.values.array() < 0).any()) throw DomainError("count matrix has negative entries");
    if (!(pseudocount > 0)) throw DomainError("pseudocount must be positive");
    LogProportionResult result{m, {}};
    MatrixXd& v = result.matrix.values;
    for (Index i = 0; i < v.rows(); ++i) {
        if (v.row(i).sum() <= 0)
            throw DataError("observation '" + m.observation_ids[static_cast<std::size_t>(i)] + "' has no counts");
        if ((v.row(i).array() == 0).any()) {
            v.row(i).array() += pseudocount;
            result.pseudocounted.push_back(m.observation_ids[static_cast<std::size_t>(i)]);
        }
        v.row(i) /= v.row(i).sum();
    }
    v = v.array().log().matrix();
    return result;
}

}  // namespace mvfs
