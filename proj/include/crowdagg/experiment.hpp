#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crowdagg/config.hpp"
#include "crowdagg/dataset.hpp"
#include "crowdagg/inference.hpp"
#include "crowdagg/stats.hpp"
#include "crowdagg/synth.hpp"

namespace crowdagg {

// One evaluation run: fit each model on worker subsamples of the SIMUL data
// and score the estimates against INDV-derived ground truth.
struct ExperimentConfig {
    // Data source: either both file paths, or a synth config for paired data.
    std::string indv_path;
    std::string simul_path;
    std::optional<SynthConfig> synth;

    std::vector<ModelKind> models = {ModelKind::Cim, ModelKind::Cdm,
                                     ModelKind::ImpCim, ModelKind::ImpCdm};
    std::vector<int> n_workers_range = {5, 6, 7, 8, 9, 10};
    int trials = 20;
    uint64_t base_seed = 0;
    OptimizerConfig optimizer;
    HyperParams hyper;
    PotentialTruthMode potential_truth_mode = PotentialTruthMode::PooledMean;
    std::string overall_criterion_id = "overall";
};

struct TrialScore {
    uint64_t seed = 0;
    bool failed = false;
    std::string error;
    double potential = 0.0;
    std::vector<double> per_criterion;  // aligned with ExperimentReport::criteria
};

struct CellReport {
    ModelKind model = ModelKind::Cim;
    int n_workers = 0;
    int excluded = 0;  // failed trials, not counted in the means
    double mean_potential = 0.0;
    std::vector<double> mean_per_criterion;
    std::vector<TrialScore> trials;
};

struct ExperimentReport {
    std::vector<std::string> criteria;  // criterion column ids, index order
    std::vector<CellReport> cells;      // ordered by (model, n_workers)
    std::string timestamp;              // metadata only, excluded from determinism
    ExperimentConfig config;            // echoed into the report metadata
};

// Trial k subsamples n workers from the SIMUL data with seed base_seed + k and
// fits every model on that subsample with the same seed; scores are Spearman
// correlations of estimated potential (t) and criteria quality (t + q) against
// the ground truth. Deterministic under (config, base_seed).
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Column order for CSV flattening: potential first, then criteria.
std::vector<std::string> report_column_order(const std::vector<std::string>& criteria);

// Loads the two arms, builds the bias StatReport, writes it as JSON.
StatReport run_bias_analysis(const std::string& indv_path, const std::string& simul_path,
                             const std::string& out_path);

ExperimentConfig experiment_config_from_file(const std::string& path);
ExperimentConfig experiment_config_from_toml(const TomlTable& table);

// Reads the keys under `prefix` (e.g. "synth."): kind, targets, workers,
// criteria, seed, impression_strength, discretize, and t/q/b/c overrides.
SynthConfig synth_config_from_toml(const TomlTable& table, const std::string& prefix);

}  // namespace crowdagg
