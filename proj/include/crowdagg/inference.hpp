#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crowdagg/models.hpp"

namespace crowdagg {

struct OptimizerConfig {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int max_steps = 5000;
    double convergence_tol = 1e-6;  // absolute objective change over a 10-step window
    int restarts = 20;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;

    explicit AdamState(size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// One ascent step on the log-posterior: bias-corrected moments, then
// theta += lr * m_hat / (sqrt(v_hat) + eps).
void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state, const OptimizerConfig& cfg);

struct FitResult {
    ModelKind kind = ModelKind::Cim;
    ParameterSet params;
    double final_objective = 0.0;
    int steps_taken = 0;
    bool converged = false;
    uint64_t seed = 0;

    // Restart-level failure marker (fit_restarts records instead of aborting).
    bool failed = false;
    std::string error;

    // Objective value after each step; [0] is the value at initialization.
    std::vector<double> objective_trace;
};

// Full-batch MAP ascent from init_parameters(seed). Stops at max_steps or when
// |objective[k] - objective[k-10]| < convergence_tol. Deterministic given
// (kind, ds, h, cfg, seed). Throws NonFiniteObjective on divergence.
FitResult fit(ModelKind kind, const RatingDataset& ds, const HyperParams& h,
              const OptimizerConfig& cfg, uint64_t seed);

// Runs fit with seeds base_seed .. base_seed + restarts - 1, in seed order.
// Per-restart errors become failure-marker entries.
std::vector<FitResult> fit_restarts(ModelKind kind, const RatingDataset& ds,
                                    const HyperParams& h, const OptimizerConfig& cfg,
                                    uint64_t base_seed);

// Highest final objective among successful restarts; nullptr if none succeeded.
const FitResult* best_fit(const std::vector<FitResult>& results);

}  // namespace crowdagg
