// Command-line front end: simulate, optimize, select, fdr, asymrisk.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "mvfs/commands.hpp"
#include "mvfs/error.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

const std::map<std::string, mvfs::Method> kMethods{{"thres", mvfs::Method::thresholding}, {"svd", mvfs::Method::svd}};
const std::map<std::string, mvfs::SamplerKind> kSamplers{{"wishart", mvfs::SamplerKind::wishart_exact},
                                                         {"data", mvfs::SamplerKind::data_simulation},
                                                         {"asymptotic", mvfs::SamplerKind::asymptotic_gaussian}};
const std::map<std::string, mvfs::NullKind> kNulls{{"global", mvfs::NullKind::global}, {"local", mvfs::NullKind::local}};
const std::map<std::string, mvfs::Correction> kCorrections{{"none", mvfs::Correction::none},
                                                           {"harmonic", mvfs::Correction::harmonic}};
const std::map<std::string, mvfs::Statistic> kStatistics{{"cor", mvfs::Statistic::correlation},
                                                         {"cov", mvfs::Statistic::covariance}};
const std::map<std::string, mvfs::Direction> kDirections{
    {"asymptotic-minus-exact", mvfs::Direction::asymptotic_minus_exact},
    {"exact-minus-asymptotic", mvfs::Direction::exact_minus_asymptotic}};
const std::map<std::string, mvfs::Orientation> kOrientations{
    {"observations-as-rows", mvfs::Orientation::observations_as_rows},
    {"features-as-rows", mvfs::Orientation::features_as_rows}};
const std::map<std::string, mvfs::DofConvention> kDof{{"n-1", mvfs::DofConvention::sample},
                                                      {"n", mvfs::DofConvention::uncentered}};

void add_run_options(CLI::App* cmd, mvfs::RunConfig& run, std::string& out) {
    cmd->add_option("--seed", run.seed, "Root random seed")->capture_default_str();
    cmd->add_option("--workers", run.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--mc-res", run.mc_res, "Monte Carlo repetitions")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--out", out, "Output prefix: writes <out>.csv and <out>.json (stdout if omitted)");
}

void add_inputs(CLI::App* cmd, mvfs::DataInputs& in) {
    cmd->add_option("--x", in.x_path, "CSV of features to rank (X)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--y", in.y_path, "CSV of response variates (Y)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--orientation", in.orientation, "CSV layout")
        ->transform(CLI::CheckedTransformer(kOrientations, CLI::ignore_case));
    cmd->add_flag("--standardize", in.standardize, "Row/column standardize X and Y");
    cmd->add_flag("--log-proportions-y", in.log_proportions_y, "Convert Y counts to log proportions first");
    cmd->add_option("--pseudocount", in.pseudocount, "Pseudocount for zero counts")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-covariance feature selection: risk simulation, stochastic search, permutation FDR"};
    app.set_config("--config", "", "TOML/INI config file; command-line flags override it");
    app.require_subcommand(1);
    std::string out;

    mvfs::SimulateConfig sim;
    std::vector<std::string> sim_methods{"thres", "svd"};
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo selection probabilities over an (n, p_t) grid");
    add_run_options(simulate, sim.run, out);
    simulate->add_option("--n", sim.n_values, "Sample sizes")->delimiter(',');
    simulate->add_option("--p-t", sim.p_t_values, "Correlated feature counts")->delimiter(',');
    simulate->add_option("--p", sim.p, "Total features")->capture_default_str();
    simulate->add_option("--q", sim.q, "Total response variates")->capture_default_str();
    simulate->add_option("--method", sim_methods, "Methods (thres,svd)")->delimiter(',')->check(CLI::IsMember({"thres", "svd"}));
    simulate->add_option("--sampler", sim.sampler, "Sampler")->transform(CLI::CheckedTransformer(kSamplers, CLI::ignore_case));
    simulate->add_option("--dof", sim.dof, "Degrees of freedom convention")->transform(CLI::CheckedTransformer(kDof));

    mvfs::OptimizeConfig opt;
    opt.run.mc_res = 5000;
    std::string objective_kind = "discrepancy";
    std::string pairing = "paired";
    std::vector<int> target;
    auto* optimize = app.add_subcommand("optimize", "Population stochastic search for the largest |P - P~|");
    add_run_options(optimize, opt.run, out);
    optimize->add_option("--n", opt.objective.n, "Sample size")->capture_default_str();
    optimize->add_option("--method", opt.objective.method, "thres or svd")
        ->transform(CLI::CheckedTransformer(kMethods, CLI::ignore_case));
    optimize->add_option("--direction", opt.objective.direction, "Sign of the discrepancy")
        ->transform(CLI::CheckedTransformer(kDirections, CLI::ignore_case));
    optimize->add_option("--sampler", opt.objective.exact_sampler, "Exact sampler (wishart or data)")
        ->transform(CLI::CheckedTransformer(kSamplers, CLI::ignore_case));
    optimize->add_option("--pairing", pairing, "paired or independent")->check(CLI::IsMember({"paired", "independent"}));
    optimize->add_option("--survivors", opt.search.survivors, "Survivors m per step")->capture_default_str();
    optimize->add_option("--t-final", opt.search.t_final, "Search steps")->capture_default_str();
    optimize->add_option("--perturbations", opt.search.perturbations_per_survivor, "Perturbed copies per survivor")
        ->capture_default_str();
    optimize->add_option("--objective", objective_kind, "discrepancy or l1-test")
        ->check(CLI::IsMember({"discrepancy", "l1-test"}));
    optimize->add_option("--target", target, "l1-test maximizer p_t,p_u,q_u")->delimiter(',')->expected(3);

    mvfs::SelectConfig sel;
    auto* select = app.add_subcommand("select", "Rank X features by thresholding or SVD scores");
    add_run_options(select, sel.run, out);
    add_inputs(select, sel.inputs);
    select->add_option("--method", sel.method, "thres or svd")->transform(CLI::CheckedTransformer(kMethods, CLI::ignore_case));
    select->add_option("--statistic", sel.statistic, "cov or cor")
        ->transform(CLI::CheckedTransformer(kStatistics, CLI::ignore_case));

    mvfs::FdrConfig fdr;
    std::string shuffle = "within-rows";
    auto* fdr_cmd = app.add_subcommand("fdr", "Permutation-null p-values and q-values for a feature ranking");
    add_run_options(fdr_cmd, fdr.run, out);
    add_inputs(fdr_cmd, fdr.inputs);
    fdr_cmd->add_option("--method", fdr.method, "thres or svd")->transform(CLI::CheckedTransformer(kMethods, CLI::ignore_case));
    fdr_cmd->add_option("--null", fdr.null, "global or local")->transform(CLI::CheckedTransformer(kNulls, CLI::ignore_case));
    mvfs::Correction correction = mvfs::Correction::harmonic;
    auto* correction_opt = fdr_cmd->add_option("--correction", correction, "none or harmonic (default: harmonic for svd, none for thres)")
        ->transform(CLI::CheckedTransformer(kCorrections, CLI::ignore_case));
    fdr_cmd->add_option("--statistic", fdr.statistic, "cor or cov")
        ->transform(CLI::CheckedTransformer(kStatistics, CLI::ignore_case));
    fdr_cmd->add_option("--shuffle", shuffle, "Global null scrambling: within-rows or per-column")
        ->check(CLI::IsMember({"within-rows", "per-column"}));
    fdr_cmd->add_flag("--add-one", fdr.add_one, "Add-one smoothing of permutation p-values");

    mvfs::AsymRiskConfig risk;
    auto* asymrisk = app.add_subcommand("asymrisk", "Closed-form asymptotic risk of thresholding");
    asymrisk->add_option("--signal", risk.signal_path, "CSV of sqrt(n0)*omega for the signal rows (p_t x q)")
        ->check(CLI::ExistingFile);
    asymrisk->add_option("--p-t", risk.p_t, "Signal rows when --signal is absent")->capture_default_str();
    asymrisk->add_option("--q", risk.q, "Columns when --signal is absent")->capture_default_str();
    asymrisk->add_option("--signal-value", risk.signal_value, "Constant signal mean when --signal is absent")
        ->capture_default_str();
    asymrisk->add_option("--p-u", risk.p_u, "Noise features")->capture_default_str();
    asymrisk->add_option("--out", out, "Output prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        mvfs::ResultEnvelope env;
        if (*simulate) {
            sim.methods.clear();
            for (const auto& m : sim_methods) sim.methods.push_back(kMethods.at(m));
            env = mvfs::cmd_simulate(sim);
        } else if (*optimize) {
            opt.objective.pairing = pairing == "paired" ? mvfs::Pairing::paired : mvfs::Pairing::independent;
            if (objective_kind == "l1-test") {
                opt.kind = mvfs::OptimizeObjective::l1_test;
                if (!target.empty()) opt.test_target = {target[0], target[1], target[2]};
            }
            env = mvfs::cmd_optimize(opt);
        } else if (*select) {
            env = mvfs::cmd_select(sel);
        } else if (*fdr_cmd) {
            fdr.shuffle = shuffle == "within-rows" ? mvfs::GlobalShuffle::within_rows : mvfs::GlobalShuffle::per_column;
            if (correction_opt->count() > 0) fdr.correction = correction;
            env = mvfs::cmd_fdr(fdr);
        } else if (*asymrisk) {
            env = mvfs::cmd_asymrisk(risk);
        }
        for (const auto& w : env.warnings) std::cerr << "warning: " << w << '\n';
        if (out.empty()) {
            std::cout << env.payload.to_csv();
            std::cerr << env.to_json().dump(2) << '\n';
        } else {
            mvfs::write_envelope(env, out);
        }
    } catch (const mvfs::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.kind()) {
            case mvfs::ErrorKind::config: return kExitConfig;
            case mvfs::ErrorKind::data: return kExitData;
            case mvfs::ErrorKind::numerical: return kExitNumerical;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
