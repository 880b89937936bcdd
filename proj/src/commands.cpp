#include "mvfs/commands.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "mvfs/error.hpp"

namespace mvfs {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string quote_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

json run_json(const RunConfig& run) {
    return {{"seed", run.seed}, {"workers", run.workers}, {"mc_res", run.mc_res}};
}

json inputs_json(const DataInputs& in) {
    return {{"x", in.x_path},
            {"y", in.y_path},
            {"orientation", in.orientation == Orientation::observations_as_rows ? "observations-as-rows" : "features-as-rows"},
            {"standardize", in.standardize},
            {"log_proportions_y", in.log_proportions_y},
            {"pseudocount", in.pseudocount}};
}

std::string theta_cell(int v) { return std::to_string(v); }

struct LoadedData {
    DataMatrix x;
    DataMatrix y;
    std::vector<std::string> warnings;
};

LoadedData load_inputs(const DataInputs& in) {
    LoadedData d{ingest_csv(in.x_path, in.orientation), ingest_csv(in.y_path, in.orientation), {}};
    if (d.x.observation_ids != d.y.observation_ids)
        d.warnings.push_back("X and Y observation labels differ; rows are paired by position");
    if (in.log_proportions_y) {
        auto lp = counts_to_log_proportions(d.y, in.pseudocount);
        for (const auto& id : lp.pseudocounted)
            d.warnings.push_back("pseudocount " + format_double(in.pseudocount) + " added to observation '" + id + "'");
        d.y = std::move(lp.matrix);
    }
    if (in.standardize) {
        for (auto* m : {&d.x, &d.y}) {
            auto s = standardize_rows_columns(*m);
            if (!s.converged)
                d.warnings.push_back("row/column standardization did not converge in " + std::to_string(s.iterations) +
                                     " rounds");
            *m = std::move(s.matrix);
        }
    }
    return d;
}

}  // namespace

std::string to_string(Method m) { return m == Method::thresholding ? "thres" : "svd"; }

std::string to_string(SamplerKind s) {
    switch (s) {
        case SamplerKind::wishart_exact: return "wishart";
        case SamplerKind::data_simulation: return "data";
        case SamplerKind::asymptotic_gaussian: return "asymptotic";
    }
    return "?";
}

std::string to_string(NullKind k) { return k == NullKind::global ? "global" : "local"; }
std::string to_string(Correction c) { return c == Correction::none ? "none" : "harmonic"; }

std::string to_string(Direction d) {
    return d == Direction::asymptotic_minus_exact ? "asymptotic-minus-exact" : "exact-minus-asymptotic";
}

std::string Table::to_csv() const {
    std::ostringstream out;
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << quote_cell(columns[c]);
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << quote_cell(row[c]);
        out << '\n';
    }
    return out.str();
}

json ResultEnvelope::to_json() const {
    json j;
    j["tool"] = "mvfs";
    j["version"] = version;
    j["command"] = command;
    j["config"] = config;
    j["wall_time_seconds"] = wall_time_seconds;
    j["payload_rows"] = payload.rows.size();
    j["payload_columns"] = payload.columns;
    j["warnings"] = warnings;
    return j;
}

void RunConfig::validate() const {
    if (workers < 1) throw DomainError("workers must be >= 1");
    if (mc_res < 1) throw DomainError("mc_res must be >= 1");
}

ResultEnvelope cmd_simulate(const SimulateConfig& config) {
    const auto start = Clock::now();
    config.run.validate();
    if (config.n_values.empty() || config.p_t_values.empty() || config.methods.empty())
        throw DomainError("simulate needs at least one n, one p_t and one method");

    std::vector<ModelParams> grid;
    for (int n : config.n_values)
        for (int p_t : config.p_t_values) {
            if (p_t > config.p || p_t > config.q)
                throw DomainError("p_t = " + std::to_string(p_t) + " exceeds p or q");
            ModelParams params{n, p_t, config.p - p_t, config.q - p_t};
            params.validate();
            grid.push_back(params);
        }

    ResultEnvelope env;
    env.command = "simulate";
    json methods = json::array();
    for (auto m : config.methods) methods.push_back(to_string(m));
    json n_values = config.n_values;
    json p_t_values = config.p_t_values;
    env.config = {{"run", run_json(config.run)},
                  {"n", n_values},
                  {"p_t", p_t_values},
                  {"p", config.p},
                  {"q", config.q},
                  {"methods", methods},
                  {"sampler", to_string(config.sampler)},
                  {"dof", config.dof == DofConvention::sample ? "n-1" : "n"}};
    env.payload.columns = {"n", "p_t", "p_u", "q_u", "p", "q", "method", "sampler",
                           "value", "stderr", "trials", "discarded", "error"};

    EstimateOptions options;
    options.workers = config.run.workers;
    options.dof = config.dof;
    for (auto method : config.methods) {
        const auto points = sweep_risk_surface(grid, method, config.sampler, config.run.mc_res, config.run.seed, options);
        for (const auto& pt : points) {
            std::vector<std::string> row{theta_cell(pt.params.n),   theta_cell(pt.params.p_t), theta_cell(pt.params.p_u),
                                         theta_cell(pt.params.q_u), theta_cell(pt.params.p()), theta_cell(pt.params.q()),
                                         to_string(method),         to_string(config.sampler)};
            if (pt.estimate) {
                row.push_back(format_double(pt.estimate->value));
                row.push_back(format_double(pt.estimate->std_error));
                row.push_back(std::to_string(pt.estimate->trials));
                row.push_back(std::to_string(pt.estimate->discarded));
                row.push_back("");
            } else {
                row.insert(row.end(), {"", "", "", "", pt.error});
                env.warnings.push_back("grid point failed: " + pt.error);
            }
            env.payload.rows.push_back(std::move(row));
        }
    }
    env.wall_time_seconds = seconds_since(start);
    return env;
}

ResultEnvelope cmd_optimize(const OptimizeConfig& config) {
    const auto start = Clock::now();
    config.run.validate();
    SearchConfig search = config.search;
    search.mc_res = config.run.mc_res;
    search.validate();

    DiscrepancyObjective objective = config.objective;
    objective.workers = config.run.workers;

    BatchObjective f;
    if (config.kind == OptimizeObjective::l1_test) {
        const Theta target = config.test_target;
        f = [target](const Theta& theta, long, std::uint64_t) {
            double d = 0;
            for (int k = 0; k < 3; ++k) d += std::abs(theta[k] - target[k]);
            return -d;
        };
    } else {
        f = make_batch_objective(objective);
    }
    const SearchResult result = run_search(f, search, config.run.seed);

    ResultEnvelope env;
    env.command = "optimize";
    json grid = json::array();
    for (const auto& t : search.initial_grid) grid.push_back({t[0], t[1], t[2]});
    env.config = {{"run", run_json(config.run)},
                  {"objective", config.kind == OptimizeObjective::l1_test ? "l1-test" : "discrepancy"},
                  {"n", objective.n},
                  {"method", to_string(objective.method)},
                  {"direction", to_string(objective.direction)},
                  {"exact_sampler", to_string(objective.exact_sampler)},
                  {"pairing", objective.pairing == Pairing::paired ? "paired" : "independent"},
                  {"survivors", search.survivors},
                  {"t_final", search.t_final},
                  {"perturbations_per_survivor", search.perturbations_per_survivor},
                  {"bounds_lower", {search.bounds.lower[0], search.bounds.lower[1], search.bounds.lower[2]}},
                  {"bounds_upper", {search.bounds.upper[0], search.bounds.upper[1], search.bounds.upper[2]}},
                  {"initial_grid", grid}};
    if (config.kind == OptimizeObjective::l1_test)
        env.config["target"] = {config.test_target[0], config.test_target[1], config.test_target[2]};

    env.payload.columns = {"rank", "candidate", "p_t", "p_u", "q_u", "p", "q", "mean", "batches", "discovered_at"};
    for (std::size_t r = 0; r < result.ranked.size(); ++r) {
        const auto& c = result.ranked[r];
        env.payload.rows.push_back({std::to_string(r + 1), std::to_string(c.id), theta_cell(c.theta[0]),
                                    theta_cell(c.theta[1]), theta_cell(c.theta[2]), theta_cell(c.theta[0] + c.theta[1]),
                                    theta_cell(c.theta[0] + c.theta[2]), format_double(c.mean()),
                                    std::to_string(c.batches), std::to_string(c.discovered_at)});
    }
    Table trace;
    trace.columns = {"iteration", "candidate", "p_t", "p_u", "q_u", "event", "batches", "batch_value", "mean", "note"};
    for (const auto& t : result.trace)
        trace.rows.push_back({std::to_string(t.iteration), std::to_string(t.candidate_id), theta_cell(t.theta[0]),
                              theta_cell(t.theta[1]), theta_cell(t.theta[2]), t.event, std::to_string(t.batches),
                              format_double(t.batch_value), format_double(t.mean), t.note});
    env.extras["trace"] = std::move(trace);
    env.wall_time_seconds = seconds_since(start);
    return env;
}

ResultEnvelope cmd_select(const SelectConfig& config) {
    const auto start = Clock::now();
    config.run.validate();
    LoadedData data = load_inputs(config.inputs);
    CrossMatrix cross = config.statistic == Statistic::correlation ? cross_correlation(data.x, data.y)
                                                                    : cross_covariance(data.x, data.y);
    const VectorXd s = score(config.method, cross.matrix);
    const Ranking ranking = ranking_from_scores(s);

    ResultEnvelope env;
    env.command = "select";
    env.config = {{"run", run_json(config.run)},
                  {"inputs", inputs_json(config.inputs)},
                  {"method", to_string(config.method)},
                  {"statistic", config.statistic == Statistic::correlation ? "cor" : "cov"}};
    env.warnings = data.warnings;
    env.warnings.insert(env.warnings.end(), cross.warnings.begin(), cross.warnings.end());
    env.payload.columns = {"rank", "feature", "index", "score"};
    for (Index r = 0; r < ranking.size(); ++r) {
        const Index j = ranking.order[static_cast<std::size_t>(r)];
        env.payload.rows.push_back({std::to_string(r + 1), data.x.feature_names[static_cast<std::size_t>(j)],
                                    std::to_string(j + 1), format_double(s(j))});
    }
    env.wall_time_seconds = seconds_since(start);
    return env;
}

ResultEnvelope cmd_fdr(const FdrConfig& config) {
    const auto start = Clock::now();
    config.run.validate();
    LoadedData data = load_inputs(config.inputs);
    PermutationOptions options;
    options.statistic = config.statistic;
    options.shuffle = config.shuffle;
    options.add_one = config.add_one;
    options.workers = config.run.workers;
    const Correction correction =
        config.correction.value_or(config.method == Method::svd ? Correction::harmonic : Correction::none);
    const FeatureReport report = rank_features(data.x, data.y, config.method, config.null, config.run.mc_res,
                                               correction, config.run.seed, options);

    ResultEnvelope env;
    env.command = "fdr";
    env.config = {{"run", run_json(config.run)},
                  {"inputs", inputs_json(config.inputs)},
                  {"method", to_string(config.method)},
                  {"null", to_string(config.null)},
                  {"correction", to_string(correction)},
                  {"statistic", config.statistic == Statistic::correlation ? "cor" : "cov"},
                  {"shuffle", config.shuffle == GlobalShuffle::within_rows ? "within-rows" : "per-column"},
                  {"add_one", config.add_one}};
    env.warnings = data.warnings;
    env.warnings.insert(env.warnings.end(), report.warnings.begin(), report.warnings.end());
    if (report.redrawn > 0)
        env.warnings.push_back(std::to_string(report.redrawn) + " degenerate permutation replicates were redrawn");
    env.payload.columns = {"rank", "feature", "index", "score", "p_value", "q_value"};
    for (const auto& f : report.features)
        env.payload.rows.push_back({std::to_string(f.rank), f.feature_name, std::to_string(f.feature_index + 1),
                                    format_double(f.score), format_double(f.p_value), format_double(f.q_value)});
    env.wall_time_seconds = seconds_since(start);
    return env;
}

ResultEnvelope cmd_asymrisk(const AsymRiskConfig& config) {
    const auto start = Clock::now();
    MatrixXd signal;
    if (!config.signal_path.empty()) {
        signal = ingest_csv(config.signal_path, Orientation::observations_as_rows).values;
    } else {
        if (config.p_t < 0 || config.q < 1) throw DomainError("need p_t >= 0 and q >= 1");
        signal = MatrixXd::Constant(config.p_t, config.q, config.signal_value);
    }
    const double value = asymptotic_thresholding_risk(signal, config.p_u, config.quadrature);

    ResultEnvelope env;
    env.command = "asymrisk";
    env.config = {{"signal", config.signal_path.empty() ? json(config.signal_value) : json(config.signal_path)},
                  {"p_t", signal.rows()},
                  {"q", signal.cols()},
                  {"p_u", config.p_u},
                  {"abs_tolerance", config.quadrature.abs_tolerance}};
    env.payload.columns = {"p_t", "p_u", "q", "expected_loss", "selection_probability"};
    env.payload.rows.push_back({std::to_string(signal.rows()), std::to_string(config.p_u), std::to_string(signal.cols()),
                                format_double(value), format_double(1.0 - value)});
    env.wall_time_seconds = seconds_since(start);
    return env;
}

void write_envelope(const ResultEnvelope& envelope, const std::string& prefix) {
    auto write = [](const std::string& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError("cannot write '" + path + "'");
        out << text;
    };
    write(prefix + ".csv", envelope.payload.to_csv());
    nlohmann::json j = envelope.to_json();
    j["payload_csv"] = prefix + ".csv";
    for (const auto& [name, table] : envelope.extras) {
        const std::string path = prefix + "_" + name + ".csv";
        write(path, table.to_csv());
        j["extra_csv"][name] = path;
    }
    write(prefix + ".json", j.dump(2) + "\n");
}

}  // namespace mvfs
