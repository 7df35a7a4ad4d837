#pragma once

#include <string>

#include "crowdagg/experiment.hpp"
#include "crowdagg/inference.hpp"
#include "crowdagg/models.hpp"
#include "crowdagg/stats.hpp"

namespace crowdagg {

// JSON wire formats. Parameter sets are keyed by parameter name (t, q, b, c,
// r_raw, w_raw, mu) with nested arrays; per-criterion matrices are row-major
// lists of rows, shared-variance vectors are flat lists.
std::string parameter_set_to_json(const ParameterSet& p, int indent = -1);
ParameterSet parameter_set_from_json(const std::string& text);
// Restores impression_pairs from the dataset the parameters were built for.
ParameterSet parameter_set_from_json(const std::string& text, const RatingDataset& ds);

std::string fit_result_to_json(const FitResult& r, int indent = -1);

std::string stat_report_to_json(const StatReport& report, int indent = 2);

std::string experiment_report_to_json(const ExperimentReport& report, int indent = 2);
std::string experiment_report_to_csv(const ExperimentReport& report);

std::string optimizer_config_to_json(const OptimizerConfig& cfg);
OptimizerConfig optimizer_config_from_json(const std::string& text);

// JSON mirror of the TOML experiment config layout.
ExperimentConfig experiment_config_from_json_text(const std::string& text);


}  // namespace crowdagg
