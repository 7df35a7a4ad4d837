#include "crowdagg/cli.hpp"

#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "crowdagg/errors.hpp"
#include "crowdagg/experiment.hpp"
#include "crowdagg/json_io.hpp"

namespace crowdagg {

namespace {

using nlohmann::json;

void print_error(const std::string& code, const std::string& message) {
    json j;
    j["error"] = code;
    j["message"] = message;
    std::cerr << j.dump() << "\n";
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << "\n";
    } else {
        write_text_file(out_path, text);
    }
}

std::string csv_stem(const std::string& path) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv")
        return path.substr(0, path.size() - 4);
    return path;
}

struct SynthArgs {
    std::string config_path;
    std::string out_path;
    std::optional<uint64_t> seed;
};

int run_synth(const SynthArgs& args) {
    const TomlTable table = load_toml_file(args.config_path);
    SynthConfig cfg = synth_config_from_toml(table, "synth.");
    if (args.seed) cfg.seed = *args.seed;
    bool paired = false;
    if (auto it = table.find("synth.paired"); it != table.end()) paired = it->second.as_bool();

    const std::string stem = csv_stem(args.out_path);
    json manifest;
    if (paired) {
        PairedSynthOutput out = sample_paired(cfg);
        save_csv(out.indv, stem + "_indv.csv");
        save_csv(out.simul, stem + "_simul.csv");
        write_text_file(stem + "_truth.json", parameter_set_to_json(out.truth, 2));
        manifest["indv"] = stem + "_indv.csv";
        manifest["simul"] = stem + "_simul.csv";
        manifest["truth"] = stem + "_truth.json";
    } else {
        SynthOutput out = sample(cfg);
        save_csv(out.dataset, args.out_path);
        write_text_file(stem + ".truth.json", parameter_set_to_json(out.truth, 2));
        manifest["dataset"] = args.out_path;
        manifest["truth"] = stem + ".truth.json";
    }
    std::cout << manifest.dump() << "\n";
    return 0;
}

struct FitArgs {
    std::string config_path;
    std::string data_path;
    std::string model;
    std::string out_path;
    std::optional<uint64_t> seed;
};

int run_fit(const FitArgs& args) {
    const ModelKind kind = model_kind_from_string(args.model);

    ExperimentConfig cfg;
    if (!args.config_path.empty()) cfg = experiment_config_from_file(args.config_path);

    RatingDataset ds;
    if (!args.data_path.empty()) {
        ds = load_csv(args.data_path);
    } else if (!cfg.simul_path.empty()) {
        ds = load_csv(cfg.simul_path);
    } else if (!cfg.indv_path.empty()) {
        ds = load_csv(cfg.indv_path);
    } else if (cfg.synth) {
        if (has_impression(cfg.synth->kind)) {
            bool paired = false;
            if (!args.config_path.empty()) {
                const TomlTable table = load_toml_file(args.config_path);
                if (auto it = table.find("synth.paired"); it != table.end())
                    paired = it->second.as_bool();
            }
            ds = paired ? sample_paired(*cfg.synth).simul : sample(*cfg.synth).dataset;
        } else {
            ds = sample(*cfg.synth).dataset;
        }
    } else {
        raise(ErrorCode::ConfigError, "fit needs --data or a config with data paths or [synth]");
    }

    const uint64_t seed = args.seed ? *args.seed : cfg.base_seed;
    const FitResult result = fit(kind, ds, cfg.hyper, cfg.optimizer, seed);
    emit(fit_result_to_json(result, 2), args.out_path);
    return 0;
}

struct ExperimentArgs {
    std::string config_path;
    std::string out_path;
    std::string format = "json";
    std::optional<uint64_t> seed;
};

int run_experiment_cmd(const ExperimentArgs& args) {
    ExperimentConfig cfg = experiment_config_from_file(args.config_path);
    if (args.seed) cfg.base_seed = *args.seed;
    const ExperimentReport report = run_experiment(cfg);
    if (args.format == "csv") {
        emit(experiment_report_to_csv(report), args.out_path);
    } else {
        emit(experiment_report_to_json(report, 2), args.out_path);
    }
    return 0;
}

struct AnalyzeArgs {
    std::string config_path;
    std::string indv_path;
    std::string simul_path;
    std::string out_path;
};

int run_analyze(const AnalyzeArgs& args) {
    std::string indv = args.indv_path;
    std::string simul = args.simul_path;
    if ((indv.empty() || simul.empty()) && !args.config_path.empty()) {
        const ExperimentConfig cfg = experiment_config_from_file(args.config_path);
        if (indv.empty()) indv = cfg.indv_path;
        if (simul.empty()) simul = cfg.simul_path;
    }
    if (indv.empty() || simul.empty())
        raise(ErrorCode::ConfigError, "analyze needs --indv and --simul (or a config with both)");
    const StatReport report = run_bias_analysis(indv, simul, args.out_path);
    if (args.out_path.empty()) std::cout << stat_report_to_json(report, 2) << "\n";
    return 0;
}

int run_validate(const std::string& path) {
    const RatingDataset ds = load_csv(path);
    size_t indv = 0, simul = 0;
    for (const auto& r : ds.responses())
        (r.condition == Condition::Indv ? indv : simul) += 1;
    json j;
    j["path"] = path;
    j["workers"] = ds.worker_count();
    j["targets"] = ds.target_count();
    j["criteria"] = ds.criterion_count();
    j["responses"] = ds.responses().size();
    j["by_condition"]["INDV"] = indv;
    j["by_condition"]["SIMUL"] = simul;
    std::cout << j.dump() << "\n";
    return 0;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args) {
    CLI::App app{"Multi-criteria crowd rating aggregation"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic rating dataset");
    synth_cmd->add_option("--config", synth_args.config_path, "TOML config with a [synth] section")
        ->required();
    synth_cmd->add_option("--out", synth_args.out_path, "Output CSV path")->required();
    synth_cmd->add_option("--seed", synth_args.seed, "Override the synth seed");

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "Fit one model to a dataset (MAP)");
    fit_cmd->add_option("--model", fit_args.model, "CIM, CDM, ImpCIM, or ImpCDM")->required();
    fit_cmd->add_option("--config", fit_args.config_path, "TOML/JSON config");
    fit_cmd->add_option("--data", fit_args.data_path, "Dataset CSV (overrides config)");
    fit_cmd->add_option("--out", fit_args.out_path, "Write FitResult JSON here");
    fit_cmd->add_option("--seed", fit_args.seed, "Initialization seed");

    ExperimentArgs exp_args;
    auto* exp_cmd = app.add_subcommand("experiment", "Run the evaluation protocol");
    exp_cmd->add_option("--config", exp_args.config_path, "TOML/JSON config")->required();
    exp_cmd->add_option("--out", exp_args.out_path, "Report path");
    exp_cmd->add_option("--format", exp_args.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    exp_cmd->add_option("--seed", exp_args.seed, "Override base_seed");

    AnalyzeArgs an_args;
    auto* an_cmd = app.add_subcommand("analyze", "Bias analysis of INDV vs SIMUL responses");
    an_cmd->add_option("--config", an_args.config_path, "Config with [data] paths");
    an_cmd->add_option("--indv", an_args.indv_path, "INDV arm CSV");
    an_cmd->add_option("--simul", an_args.simul_path, "SIMUL arm CSV");
    an_cmd->add_option("--out", an_args.out_path, "Report path");

    std::string validate_path;
    auto* val_cmd = app.add_subcommand("validate", "Load and validate a dataset CSV");
    val_cmd->add_option("path", validate_path, "Dataset CSV")->required();

    try {
        // CLI11 wants argv-style reversed vector.
        std::vector<std::string> rargs(args.rbegin(), args.rend());
        app.parse(rargs);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help() << std::flush;
            return 0;
        }
        print_error("UsageError", e.what());
        std::cerr << app.help() << std::flush;
        return 1;
    }

    try {
        if (synth_cmd->parsed()) return run_synth(synth_args);
        if (fit_cmd->parsed()) return run_fit(fit_args);
        if (exp_cmd->parsed()) return run_experiment_cmd(exp_args);
        if (an_cmd->parsed()) return run_analyze(an_args);
        if (val_cmd->parsed()) return run_validate(validate_path);
        print_error("UsageError", "no subcommand given");
        return 1;
    } catch (const Error& e) {
        print_error(e.code_name(), e.what());
        return error_exit_code(e.code());
    } catch (const std::exception& e) {
        print_error("InternalError", e.what());
        return 3;
    }
}

int cli_dispatch(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli_dispatch(args);
}

}  // namespace crowdagg
