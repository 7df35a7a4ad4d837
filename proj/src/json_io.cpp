#include "crowdagg/json_io.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "crowdagg/errors.hpp"

namespace crowdagg {

using nlohmann::json;

namespace {

json matrix_rows(const Matrix& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_rows(const json& rows, const char* name) {
    if (!rows.is_array() || rows.empty() || !rows[0].is_array())
        raise(ErrorCode::ConfigError, std::string("expected nested arrays for ") + name);
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows[0].size())
            raise(ErrorCode::ConfigError, std::string("ragged rows for ") + name);
        for (size_t c = 0; c < rows[r].size(); ++c)
            m(static_cast<int>(r), static_cast<int>(c)) = rows[r][c].get<double>();
    }
    return m;
}

json column_vector(const Matrix& m) {
    json out = json::array();
    for (int r = 0; r < m.rows(); ++r) out.push_back(m(r, 0));
    return out;
}

Matrix column_matrix_from(const json& arr, const char* name) {
    if (!arr.is_array()) raise(ErrorCode::ConfigError, std::string("expected array for ") + name);
    Matrix m(static_cast<int>(arr.size()), 1);
    for (size_t r = 0; r < arr.size(); ++r) m(static_cast<int>(r), 0) = arr[r].get<double>();
    return m;
}

json parse(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) raise(ErrorCode::ConfigError, "invalid JSON");
    return j;
}

const char* test_name(StatTest t) {
    switch (t) {
        case StatTest::FTwoSided: return "FTwoSided";
        case StatTest::WelchT: return "WelchT";
        case StatTest::BrunnerMunzel: return "BrunnerMunzel";
    }
    return "WelchT";
}

json test_result_json(const TestResult& r) {
    json j;
    j["test"] = test_name(r.test);
    j["statistic"] = r.statistic;
    j["p_value"] = r.p_value;
    if (r.test == StatTest::FTwoSided) {
        j["df"] = json::array({r.df1, r.df2});
    } else {
        j["df"] = r.df1;
    }
    j["degenerate"] = r.degenerate;
    if (r.test == StatTest::BrunnerMunzel) j["small_sample"] = r.small_sample;
    return j;
}

json moment_summary_json(const MomentSummary& s) {
    json j;
    j["n_groups"] = s.n_groups;
    j["mean_of_means"] = s.mean_of_means;
    j["sd_of_means"] = s.sd_of_means;
    j["mean_of_variances"] = s.mean_of_variances;
    j["sd_of_variances"] = s.sd_of_variances;
    j["means"] = s.means;
    j["variances"] = s.variances;
    return j;
}

std::string mode_name(PotentialTruthMode m) {
    return m == PotentialTruthMode::PooledMean ? "pooled_mean" : "overall_criterion";
}

}  // namespace

std::string parameter_set_to_json(const ParameterSet& p, int indent) {
    json j;
    j["kind"] = to_string(p.kind);
    j["t"] = p.potential;
    j["q"] = matrix_rows(p.criterion_offset);
    j["b"] = p.worker_bias;
    j["c"] = p.criterion_bias;
    if (per_criterion_variance(p.kind)) {
        j["r_raw"] = matrix_rows(p.target_var_raw);
        j["w_raw"] = matrix_rows(p.worker_var_raw);
    } else {
        j["r_raw"] = column_vector(p.target_var_raw);
        j["w_raw"] = column_vector(p.worker_var_raw);
    }
    if (has_impression(p.kind)) j["mu"] = matrix_rows(p.impression);
    return j.dump(indent);
}

ParameterSet parameter_set_from_json(const std::string& text) {
    const json j = parse(text);
    ParameterSet p;
    p.kind = model_kind_from_string(j.at("kind").get<std::string>());
    p.potential = j.at("t").get<std::vector<double>>();
    p.criterion_offset = matrix_from_rows(j.at("q"), "q");
    p.worker_bias = j.at("b").get<std::vector<double>>();
    p.criterion_bias = j.at("c").get<std::vector<double>>();
    if (per_criterion_variance(p.kind)) {
        p.target_var_raw = matrix_from_rows(j.at("r_raw"), "r_raw");
        p.worker_var_raw = matrix_from_rows(j.at("w_raw"), "w_raw");
    } else {
        p.target_var_raw = column_matrix_from(j.at("r_raw"), "r_raw");
        p.worker_var_raw = column_matrix_from(j.at("w_raw"), "w_raw");
    }
    if (has_impression(p.kind)) p.impression = matrix_from_rows(j.at("mu"), "mu");
    return p;
}

ParameterSet parameter_set_from_json(const std::string& text, const RatingDataset& ds) {
    ParameterSet p = parameter_set_from_json(text);
    if (has_impression(p.kind)) p.impression_pairs = observed_pairs(ds);
    check_shapes(p, ds);
    return p;
}

std::string fit_result_to_json(const FitResult& r, int indent) {
    json j;
    j["kind"] = to_string(r.kind);
    j["seed"] = r.seed;
    if (r.failed) {
        j["failed"] = true;
        j["error"] = r.error;
        return j.dump(indent);
    }
    j["final_objective"] = r.final_objective;
    j["steps_taken"] = r.steps_taken;
    j["converged"] = r.converged;
    j["params"] = json::parse(parameter_set_to_json(r.params));
    return j.dump(indent);
}

std::string stat_report_to_json(const StatReport& report, int indent) {
    json j;
    j["grade_distribution"]["INDV"] = report.grade_dist_indv;
    j["grade_distribution"]["SIMUL"] = report.grade_dist_simul;

    j["moments"]["inter_criteria"]["INDV"] = moment_summary_json(report.inter_criteria_indv);
    j["moments"]["inter_criteria"]["SIMUL"] = moment_summary_json(report.inter_criteria_simul);
    j["moments"]["inter_target"]["INDV"] = moment_summary_json(report.inter_target_indv);
    j["moments"]["inter_target"]["SIMUL"] = moment_summary_json(report.inter_target_simul);

    j["tests"]["inter_criteria"]["mean_f"] = test_result_json(report.mean_f_inter_criteria);
    j["tests"]["inter_criteria"]["variance_welch"] =
        test_result_json(report.var_welch_inter_criteria);
    j["tests"]["inter_criteria"]["variance_brunner_munzel"] =
        test_result_json(report.var_bm_inter_criteria);
    j["tests"]["inter_target"]["mean_f"] = test_result_json(report.mean_f_inter_target);
    j["tests"]["inter_target"]["variance_welch"] = test_result_json(report.var_welch_inter_target);
    j["tests"]["inter_target"]["variance_brunner_munzel"] =
        test_result_json(report.var_bm_inter_target);
    return j.dump(indent);
}

std::string optimizer_config_to_json(const OptimizerConfig& cfg) {
    json j;
    j["learning_rate"] = cfg.learning_rate;
    j["beta1"] = cfg.beta1;
    j["beta2"] = cfg.beta2;
    j["epsilon"] = cfg.epsilon;
    j["max_steps"] = cfg.max_steps;
    j["convergence_tol"] = cfg.convergence_tol;
    j["restarts"] = cfg.restarts;
    return j.dump();
}

namespace {

OptimizerConfig optimizer_config_from(const json& j) {
    OptimizerConfig cfg;
    if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("beta1")) cfg.beta1 = j["beta1"].get<double>();
    if (j.contains("beta2")) cfg.beta2 = j["beta2"].get<double>();
    if (j.contains("epsilon")) cfg.epsilon = j["epsilon"].get<double>();
    if (j.contains("max_steps")) cfg.max_steps = j["max_steps"].get<int>();
    if (j.contains("convergence_tol")) cfg.convergence_tol = j["convergence_tol"].get<double>();
    if (j.contains("restarts")) cfg.restarts = j["restarts"].get<int>();
    return cfg;
}

}  // namespace

OptimizerConfig optimizer_config_from_json(const std::string& text) {
    return optimizer_config_from(parse(text));
}

ExperimentConfig experiment_config_from_json_text(const std::string& text) {
    const json j = parse(text);
    ExperimentConfig cfg;
    if (j.contains("base_seed")) cfg.base_seed = j["base_seed"].get<uint64_t>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
    if (j.contains("models")) {
        cfg.models.clear();
        for (const auto& m : j["models"])
            cfg.models.push_back(model_kind_from_string(m.get<std::string>()));
    }
    if (j.contains("n_workers_range"))
        cfg.n_workers_range = j["n_workers_range"].get<std::vector<int>>();
    if (j.contains("potential_truth_mode")) {
        const std::string mode = j["potential_truth_mode"].get<std::string>();
        if (mode == "pooled_mean") {
            cfg.potential_truth_mode = PotentialTruthMode::PooledMean;
        } else if (mode == "overall_criterion") {
            cfg.potential_truth_mode = PotentialTruthMode::OverallCriterion;
        } else {
            raise(ErrorCode::ConfigError, "unknown potential_truth_mode '" + mode + "'");
        }
    }
    if (j.contains("overall_criterion"))
        cfg.overall_criterion_id = j["overall_criterion"].get<std::string>();
    if (j.contains("data")) {
        if (j["data"].contains("indv")) cfg.indv_path = j["data"]["indv"].get<std::string>();
        if (j["data"].contains("simul")) cfg.simul_path = j["data"]["simul"].get<std::string>();
    }
    if (j.contains("synth")) {
        const auto& s = j["synth"];
        SynthConfig sc;
        if (s.contains("targets")) sc.n_targets = s["targets"].get<int>();
        if (s.contains("workers")) sc.n_workers = s["workers"].get<int>();
        if (s.contains("criteria")) sc.n_criteria = s["criteria"].get<int>();
        if (s.contains("kind")) sc.kind = model_kind_from_string(s["kind"].get<std::string>());
        if (s.contains("seed")) sc.seed = s["seed"].get<uint64_t>();
        if (s.contains("impression_strength"))
            sc.impression_strength = s["impression_strength"].get<double>();
        if (s.contains("discretize")) sc.discretize = s["discretize"].get<bool>();
        if (s.contains("t")) sc.truth.potential = s["t"].get<std::vector<double>>();
        if (s.contains("q")) sc.truth.criterion_offset = matrix_from_rows(s["q"], "q");
        if (s.contains("b")) sc.truth.worker_bias = s["b"].get<std::vector<double>>();
        if (s.contains("c")) sc.truth.criterion_bias = s["c"].get<std::vector<double>>();
        cfg.synth = std::move(sc);
    }
    if (j.contains("optimizer")) cfg.optimizer = optimizer_config_from(j["optimizer"]);
    return cfg;
}

namespace {

json experiment_meta(const ExperimentReport& report) {
    const auto& cfg = report.config;
    json meta;
    meta["timestamp"] = report.timestamp;
    meta["base_seed"] = cfg.base_seed;
    meta["trials"] = cfg.trials;
    json models = json::array();
    for (auto m : cfg.models) models.push_back(to_string(m));
    meta["models"] = std::move(models);
    meta["n_workers_range"] = cfg.n_workers_range;
    meta["optimizer"] = json::parse(optimizer_config_to_json(cfg.optimizer));
    meta["potential_truth_mode"] = mode_name(cfg.potential_truth_mode);
    if (cfg.synth) {
        json src;
        src["type"] = "synth";
        src["kind"] = to_string(cfg.synth->kind);
        src["targets"] = cfg.synth->n_targets;
        src["workers"] = cfg.synth->n_workers;
        src["criteria"] = cfg.synth->n_criteria;
        src["seed"] = cfg.synth->seed;
        src["impression_strength"] = cfg.synth->impression_strength;
        src["discretize"] = cfg.synth->discretize;
        meta["source"] = std::move(src);
    } else {
        json src;
        src["type"] = "files";
        src["indv"] = cfg.indv_path;
        src["simul"] = cfg.simul_path;
        meta["source"] = std::move(src);
    }
    return meta;
}

}  // namespace

std::string experiment_report_to_json(const ExperimentReport& report, int indent) {
    json j;
    j["meta"] = experiment_meta(report);
    j["criteria"] = report.criteria;

    json results = json::array();
    for (const auto& cell : report.cells) {
        json cj;
        cj["model"] = to_string(cell.model);
        cj["n_workers"] = cell.n_workers;
        cj["excluded"] = cell.excluded;
        json mean;
        mean["potential"] = cell.mean_potential;
        json mc;
        for (size_t m = 0; m < report.criteria.size(); ++m)
            mc[report.criteria[m]] = cell.mean_per_criterion[m];
        mean["criteria"] = std::move(mc);
        cj["mean"] = std::move(mean);

        json trials = json::array();
        for (const auto& t : cell.trials) {
            json tj;
            tj["seed"] = t.seed;
            if (t.failed) {
                tj["failed"] = true;
                tj["error"] = t.error;
            } else {
                tj["potential"] = t.potential;
                json tc;
                for (size_t m = 0; m < report.criteria.size(); ++m)
                    tc[report.criteria[m]] = t.per_criterion[m];
                tj["criteria"] = std::move(tc);
            }
            trials.push_back(std::move(tj));
        }
        cj["trials"] = std::move(trials);
        results.push_back(std::move(cj));
    }
    j["results"] = std::move(results);
    return j.dump(indent);
}

std::string experiment_report_to_csv(const ExperimentReport& report) {
    const auto columns = report_column_order(report.criteria);
    std::vector<size_t> col_index(columns.size());
    for (size_t k = 0; k < columns.size(); ++k) {
        for (size_t m = 0; m < report.criteria.size(); ++m)
            if (report.criteria[m] == columns[k]) col_index[k] = m;
    }

    auto num = [](double v) { return json(v).dump(); };  // shortest round-trip repr

    std::string out = "model,n_workers,potential";
    for (const auto& c : columns) out += "," + c;
    out += "\n";
    for (const auto& cell : report.cells) {
        out += to_string(cell.model) + "," + std::to_string(cell.n_workers) + "," +
               num(cell.mean_potential);
        for (size_t k = 0; k < columns.size(); ++k)
            out += "," + num(cell.mean_per_criterion[col_index[k]]);
        out += "\n";
    }
    return out;
}

}  // namespace crowdagg
