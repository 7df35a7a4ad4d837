#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crowdagg/dataset.hpp"
#include "crowdagg/models.hpp"

namespace crowdagg {

// Fixes quality parameters instead of drawing them from their priors.
struct TruthOverrides {
    std::optional<std::vector<double>> potential;       // t, length I
    std::optional<Matrix> criterion_offset;             // q, I x M
    std::optional<std::vector<double>> worker_bias;     // b, length J
    std::optional<std::vector<double>> criterion_bias;  // c, length M
};

struct SynthConfig {
    int n_targets = 10;    // I
    int n_workers = 10;    // J
    int n_criteria = 5;    // M
    ModelKind kind = ModelKind::Cim;
    uint64_t seed = 0;
    TruthOverrides truth;
    double impression_strength = 1.0;  // variance of the impression draw; 1 = unit
    bool discretize = true;
};

struct SynthOutput {
    RatingDataset dataset;          // condition = SIMUL, complete I x J x M grid
    ParameterSet truth;             // the generating parameters
    std::vector<double> raw;        // pre-discretization values, aligned with dataset.responses()
};

// Draws parameters from their priors unless overridden, then one response per
// (target, worker, criterion) cell from the kind's normal law. Stored grades
// are clamp(round(raw), 1, 5); with discretize = false the raw vector is the
// intended observation record and the integral grades are a rounded view.
SynthOutput sample(const SynthConfig& cfg);

struct PairedSynthOutput {
    RatingDataset indv;             // condition = INDV
    RatingDataset simul;            // condition = SIMUL
    ParameterSet truth;             // shared t/q/b/c plus the simul arm's parameters
    std::vector<double> indv_raw;
    std::vector<double> simul_raw;
};

// Two arms over the same workers/targets/criteria and the same t, q, b, c.
// The simul arm draws one impression per (target, worker) (variance =
// impression_strength) shared across criteria; the indv arm has no shared
// impression and instead folds the same variance into independent
// per-criterion noise, so the arms' marginal response variances match while
// the simul arm's inter-criteria spread collapses. Requires an Imp kind.
PairedSynthOutput sample_paired(const SynthConfig& cfg);

int discretize_grade(double raw);

}  // namespace crowdagg
