#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mvfs/data_io.hpp"
#include "mvfs/fdr.hpp"
#include "mvfs/optimizer.hpp"
#include "mvfs/risk.hpp"

namespace mvfs {

inline constexpr const char* kToolVersion = "1.0.0";

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const;
};

struct ResultEnvelope {
    std::string command;
    nlohmann::json config;
    std::string version = kToolVersion;
    double wall_time_seconds = 0;
    Table payload;
    /// Secondary tables (e.g. the optimizer trace), keyed by file suffix.
    std::map<std::string, Table> extras;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
};

struct RunConfig {
    std::uint64_t seed = 20120101;
    int workers = 1;
    long mc_res = 1000;

    void validate() const;
};

struct SimulateConfig {
    RunConfig run;
    std::vector<int> n_values{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    std::vector<int> p_t_values{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    int p = 600;
    int q = 200;
    std::vector<Method> methods{Method::thresholding, Method::svd};
    SamplerKind sampler = SamplerKind::data_simulation;
    DofConvention dof = DofConvention::sample;
};

enum class OptimizeObjective { discrepancy, l1_test };

struct OptimizeConfig {
    RunConfig run;
    DiscrepancyObjective objective;
    SearchConfig search = SearchConfig::reference_grid();
    OptimizeObjective kind = OptimizeObjective::discrepancy;
    Theta test_target{2, 5, 0};
};

struct DataInputs {
    std::string x_path;
    std::string y_path;
    Orientation orientation = Orientation::observations_as_rows;
    bool standardize = false;
    bool log_proportions_y = false;
    double pseudocount = 0.5;
};

struct SelectConfig {
    RunConfig run;
    DataInputs inputs;
    Method method = Method::svd;
    Statistic statistic = Statistic::covariance;
};

struct FdrConfig {
    RunConfig run;
    DataInputs inputs;
    Method method = Method::svd;
    NullKind null = NullKind::global;
    /// Unset: harmonic for svd, none for thresholding.
    std::optional<Correction> correction;
    Statistic statistic = Statistic::correlation;
    GlobalShuffle shuffle = GlobalShuffle::within_rows;
    bool add_one = false;
};

struct AsymRiskConfig {
    /// p_t x q matrix of sqrt(n0) * omega, or empty to use a constant value.
    std::string signal_path;
    int p_t = 2;
    int q = 3;
    double signal_value = 0.0;
    int p_u = 5;
    QuadratureConfig quadrature;
};

ResultEnvelope cmd_simulate(const SimulateConfig& config);
ResultEnvelope cmd_optimize(const OptimizeConfig& config);
ResultEnvelope cmd_select(const SelectConfig& config);
ResultEnvelope cmd_fdr(const FdrConfig& config);
ResultEnvelope cmd_asymrisk(const AsymRiskConfig& config);

/// Writes <prefix>.csv, <prefix>.json and <prefix>_<extra>.csv.
void write_envelope(const ResultEnvelope& envelope, const std::string& prefix);

std::string to_string(Method m);
std::string to_string(SamplerKind s);
std::string to_string(NullKind k);
std::string to_string(Correction c);
std::string to_string(Direction d);

}  // namespace mvfs
