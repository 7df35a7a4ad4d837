#include "crowdagg/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ctime>

#include "crowdagg/errors.hpp"
#include "crowdagg/json_io.hpp"
#include "crowdagg/parallel.hpp"

namespace crowdagg {

namespace {

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct AlignedTruth {
    std::vector<double> potential;  // per sub-dataset target
    Matrix criterion;               // sub targets x sub criteria
};

// The fitted dataset's targets/criteria may be a subset (or reordering) of the
// ground-truth dataset's, so align by id.
AlignedTruth align_truth(const GroundTruth& gt, const RatingDataset& sub) {
    AlignedTruth out;
    const int ti = sub.target_count();
    const int cm = sub.criterion_count();
    std::vector<int> target_map(ti), criterion_map(cm);
    for (int i = 0; i < ti; ++i) {
        auto it = std::lower_bound(gt.targets.begin(), gt.targets.end(), sub.targets()[i]);
        if (it == gt.targets.end() || *it != sub.targets()[i])
            raise(ErrorCode::MissingCoverage,
                  "ground truth missing target '" + sub.targets()[i] + "'");
        target_map[i] = static_cast<int>(it - gt.targets.begin());
    }
    for (int m = 0; m < cm; ++m) {
        auto it = std::lower_bound(gt.criteria.begin(), gt.criteria.end(), sub.criteria()[m]);
        if (it == gt.criteria.end() || *it != sub.criteria()[m])
            raise(ErrorCode::MissingCoverage,
                  "ground truth missing criterion '" + sub.criteria()[m] + "'");
        criterion_map[m] = static_cast<int>(it - gt.criteria.begin());
    }
    out.potential.resize(ti);
    out.criterion = Matrix(ti, cm);
    for (int i = 0; i < ti; ++i) {
        out.potential[i] = gt.potential[target_map[i]];
        for (int m = 0; m < cm; ++m)
            out.criterion(i, m) = gt.criterion_truth(target_map[i], criterion_map[m]);
    }
    return out;
}

TrialScore score_fit(const FitResult& fr, const AlignedTruth& truth) {
    TrialScore score;
    score.seed = fr.seed;
    const auto& p = fr.params;
    score.potential = spearman(p.potential, truth.potential);

    const int ti = static_cast<int>(p.potential.size());
    const int cm = p.criterion_offset.cols();
    score.per_criterion.resize(cm);
    std::vector<double> est(ti), ref(ti);
    for (int m = 0; m < cm; ++m) {
        for (int i = 0; i < ti; ++i) {
            est[i] = p.potential[i] + p.criterion_offset(i, m);
            ref[i] = truth.criterion(i, m);
        }
        score.per_criterion[m] = spearman(est, ref);
    }
    return score;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) raise(ErrorCode::ConfigError, "trials must be >= 1");
    for (int n : cfg.n_workers_range)
        if (n < 1) raise(ErrorCode::ConfigError, "n_workers_range values must be >= 1");
    if (cfg.models.empty()) raise(ErrorCode::ConfigError, "at least one model is required");

    RatingDataset indv, simul;
    if (cfg.synth) {
        PairedSynthOutput paired = sample_paired(*cfg.synth);
        indv = std::move(paired.indv);
        simul = std::move(paired.simul);
    } else if (!cfg.indv_path.empty() && !cfg.simul_path.empty()) {
        indv = load_csv(cfg.indv_path);
        simul = load_csv(cfg.simul_path);
    } else {
        raise(ErrorCode::ConfigError,
              "experiment needs either both dataset paths or a synth config");
    }

    const GroundTruth gt =
        ground_truth(indv, cfg.potential_truth_mode, cfg.overall_criterion_id);

    ExperimentReport report;
    report.criteria = simul.criteria();
    report.timestamp = utc_timestamp();
    report.config = cfg;

    const size_t n_cells = cfg.models.size() * cfg.n_workers_range.size();
    report.cells.resize(n_cells);

    // One task per (n_workers, trial): the worker subsample is shared by all
    // models within a trial. Slots are preassigned so concurrency cannot
    // reorder anything.
    struct TrialSlot {
        size_t cell;
        int trial;
    };
    const size_t n_tasks = cfg.n_workers_range.size() * static_cast<size_t>(cfg.trials);

    for (size_t mi = 0; mi < cfg.models.size(); ++mi)
        for (size_t ni = 0; ni < cfg.n_workers_range.size(); ++ni) {
            auto& cell = report.cells[mi * cfg.n_workers_range.size() + ni];
            cell.model = cfg.models[mi];
            cell.n_workers = cfg.n_workers_range[ni];
            cell.trials.resize(cfg.trials);
        }

    parallel_for(n_tasks, [&](size_t task) {
        const size_t ni = task / cfg.trials;
        const int k = static_cast<int>(task % cfg.trials);
        const int n = cfg.n_workers_range[ni];
        const uint64_t seed = cfg.base_seed + static_cast<uint64_t>(k);

        const RatingDataset sub = subsample_workers(simul, n, seed, Condition::Simul);
        const AlignedTruth truth = align_truth(gt, sub);

        for (size_t mi = 0; mi < cfg.models.size(); ++mi) {
            auto& slot =
                report.cells[mi * cfg.n_workers_range.size() + ni].trials[k];
            try {
                const FitResult fr = fit(cfg.models[mi], sub, cfg.hyper, cfg.optimizer, seed);
                slot = score_fit(fr, truth);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NonFiniteObjective) throw;
                slot.seed = seed;
                slot.failed = true;
                slot.error = std::string(e.code_name()) + ": " + e.what();
            }
        }
    });

    // Aggregate: plain arithmetic means over non-excluded trials.
    for (auto& cell : report.cells) {
        const int cm = static_cast<int>(report.criteria.size());
        double pot_sum = 0.0;
        std::vector<double> crit_sum(cm, 0.0);
        int kept = 0;
        for (const auto& t : cell.trials) {
            if (t.failed) {
                ++cell.excluded;
                continue;
            }
            pot_sum += t.potential;
            for (int m = 0; m < cm; ++m) crit_sum[m] += t.per_criterion[m];
            ++kept;
        }
        cell.mean_per_criterion.assign(cm, std::nan(""));
        cell.mean_potential = std::nan("");
        if (kept > 0) {
            cell.mean_potential = pot_sum / kept;
            for (int m = 0; m < cm; ++m) cell.mean_per_criterion[m] = crit_sum[m] / kept;
        }
    }
    return report;
}

std::vector<std::string> report_column_order(const std::vector<std::string>& criteria) {
    // When the criteria are the five from the evaluation-table layout, order
    // them that way; otherwise keep index (lexicographic) order.
    auto canon = [](std::string s) {
        for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        std::replace(s.begin(), s.end(), ' ', '_');
        return s;
    };
    const std::vector<std::string> layout = {"coherence", "organization", "writing_style",
                                             "readability", "overall"};
    if (criteria.size() == layout.size()) {
        std::vector<std::string> ordered;
        for (const auto& want : layout) {
            for (const auto& c : criteria)
                if (canon(c) == want) ordered.push_back(c);
        }
        if (ordered.size() == criteria.size()) return ordered;
    }
    return criteria;
}

StatReport run_bias_analysis(const std::string& indv_path, const std::string& simul_path,
                             const std::string& out_path) {
    const RatingDataset indv = load_csv(indv_path);
    const RatingDataset simul = load_csv(simul_path);
    StatReport report = build_stat_report(indv, simul);
    if (!out_path.empty()) write_text_file(out_path, stat_report_to_json(report));
    return report;
}

namespace {

std::vector<double> toml_doubles(const TomlValue& v) {
    std::vector<double> out;
    for (const auto& item : v.as_array()) out.push_back(item.as_double());
    return out;
}

Matrix toml_matrix(const TomlValue& v) {
    const auto& rows = v.as_array();
    if (rows.empty()) raise(ErrorCode::ConfigError, "matrix override cannot be empty");
    const auto first = toml_doubles(rows[0]);
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(first.size()));
    for (size_t r = 0; r < rows.size(); ++r) {
        const auto row = toml_doubles(rows[r]);
        if (row.size() != first.size())
            raise(ErrorCode::ConfigError, "matrix override rows differ in length");
        for (size_t c = 0; c < row.size(); ++c) m(static_cast<int>(r), static_cast<int>(c)) = row[c];
    }
    return m;
}

}  // namespace

SynthConfig synth_config_from_toml(const TomlTable& t, const std::string& prefix) {
    SynthConfig cfg;
    auto get = [&](const char* key) -> const TomlValue* {
        auto it = t.find(prefix + key);
        return it == t.end() ? nullptr : &it->second;
    };
    if (auto* v = get("targets")) cfg.n_targets = static_cast<int>(v->as_int());
    if (auto* v = get("workers")) cfg.n_workers = static_cast<int>(v->as_int());
    if (auto* v = get("criteria")) cfg.n_criteria = static_cast<int>(v->as_int());
    if (auto* v = get("kind")) cfg.kind = model_kind_from_string(v->as_string());
    if (auto* v = get("seed")) cfg.seed = static_cast<uint64_t>(v->as_int());
    if (auto* v = get("impression_strength")) cfg.impression_strength = v->as_double();
    if (auto* v = get("discretize")) cfg.discretize = v->as_bool();
    if (auto* v = get("t")) cfg.truth.potential = toml_doubles(*v);
    if (auto* v = get("q")) cfg.truth.criterion_offset = toml_matrix(*v);
    if (auto* v = get("b")) cfg.truth.worker_bias = toml_doubles(*v);
    if (auto* v = get("c")) cfg.truth.criterion_bias = toml_doubles(*v);
    return cfg;
}

ExperimentConfig experiment_config_from_toml(const TomlTable& t) {
    ExperimentConfig cfg;
    auto get = [&](const std::string& key) -> const TomlValue* {
        auto it = t.find(key);
        return it == t.end() ? nullptr : &it->second;
    };

    if (auto* v = get("base_seed")) cfg.base_seed = static_cast<uint64_t>(v->as_int());
    if (auto* v = get("trials")) cfg.trials = static_cast<int>(v->as_int());
    if (auto* v = get("models")) {
        cfg.models.clear();
        for (const auto& item : v->as_array())
            cfg.models.push_back(model_kind_from_string(item.as_string()));
    }
    if (auto* v = get("n_workers_range")) {
        cfg.n_workers_range.clear();
        for (const auto& item : v->as_array())
            cfg.n_workers_range.push_back(static_cast<int>(item.as_int()));
    }
    if (auto* v = get("potential_truth_mode")) {
        const std::string& mode = v->as_string();
        if (mode == "pooled_mean") {
            cfg.potential_truth_mode = PotentialTruthMode::PooledMean;
        } else if (mode == "overall_criterion") {
            cfg.potential_truth_mode = PotentialTruthMode::OverallCriterion;
        } else {
            raise(ErrorCode::ConfigError, "unknown potential_truth_mode '" + mode + "'");
        }
    }
    if (auto* v = get("overall_criterion")) cfg.overall_criterion_id = v->as_string();

    if (auto* v = get("data.indv")) cfg.indv_path = v->as_string();
    if (auto* v = get("data.simul")) cfg.simul_path = v->as_string();
    if (t.count("synth.kind") || t.count("synth.targets") || t.count("synth.workers") ||
        t.count("synth.criteria") || t.count("synth.seed"))
        cfg.synth = synth_config_from_toml(t, "synth.");

    auto& opt = cfg.optimizer;
    if (auto* v = get("optimizer.learning_rate")) opt.learning_rate = v->as_double();
    if (auto* v = get("optimizer.beta1")) opt.beta1 = v->as_double();
    if (auto* v = get("optimizer.beta2")) opt.beta2 = v->as_double();
    if (auto* v = get("optimizer.epsilon")) opt.epsilon = v->as_double();
    if (auto* v = get("optimizer.max_steps")) opt.max_steps = static_cast<int>(v->as_int());
    if (auto* v = get("optimizer.convergence_tol")) opt.convergence_tol = v->as_double();
    if (auto* v = get("optimizer.restarts")) opt.restarts = static_cast<int>(v->as_int());
    if (opt.learning_rate <= 0 || opt.epsilon <= 0 || opt.beta1 <= 0 || opt.beta1 >= 1 ||
        opt.beta2 <= 0 || opt.beta2 >= 1)
        raise(ErrorCode::ConfigError, "optimizer constants out of range");
    return cfg;
}

ExperimentConfig experiment_config_from_file(const std::string& path) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
        return experiment_config_from_json_text(read_text_file(path));
    return experiment_config_from_toml(load_toml_file(path));
}

}  // namespace crowdagg
