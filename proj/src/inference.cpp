#include "crowdagg/inference.hpp"

#include <algorithm>
#include <cmath>

#include "crowdagg/errors.hpp"
#include "crowdagg/parallel.hpp"

namespace crowdagg {

void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state, const OptimizerConfig& cfg) {
    if (params.size() != grads.size() || params.size() != state.m.size() ||
        params.size() != state.v.size())
        raise(ErrorCode::LengthMismatch, "adam_step vector lengths differ");

    state.step += 1;
    const double b1 = cfg.beta1, b2 = cfg.beta2;
    const double m_corr = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double v_corr = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
        const double m_hat = state.m[i] / m_corr;
        const double v_hat = state.v[i] / v_corr;
        params[i] += cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
}

namespace {

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

FitResult fit(ModelKind kind, const RatingDataset& ds, const HyperParams& h,
              const OptimizerConfig& cfg, uint64_t seed) {
    if (ds.responses().empty())
        raise(ErrorCode::ShapeMismatch, "fit requires a non-empty dataset");

    ParameterSet params = init_parameters(kind, ds, seed);
    std::vector<double> flat = flatten(params);
    std::vector<double> grad_flat(flat.size());
    AdamState state(flat.size());

    ParameterSet grad;
    double objective = log_posterior_with_gradient(params, h, ds, grad);
    if (!std::isfinite(objective))
        raise(ErrorCode::NonFiniteObjective, "objective non-finite at initialization");

    FitResult result;
    result.kind = kind;
    result.seed = seed;
    result.objective_trace.reserve(cfg.max_steps + 1);
    result.objective_trace.push_back(objective);

    for (int k = 1; k <= cfg.max_steps; ++k) {
        flatten_into(grad, grad_flat);
        if (!all_finite(grad_flat))
            raise(ErrorCode::NonFiniteObjective, "gradient non-finite at step " + std::to_string(k));
        adam_step(flat, grad_flat, state, cfg);
        unflatten(flat, params);
        objective = log_posterior_with_gradient(params, h, ds, grad);
        if (!std::isfinite(objective))
            raise(ErrorCode::NonFiniteObjective, "objective non-finite at step " + std::to_string(k));
        result.objective_trace.push_back(objective);
        result.steps_taken = k;
        if (k >= 10) {
            const double window = std::fabs(result.objective_trace[k] -
                                            result.objective_trace[k - 10]);
            if (window < cfg.convergence_tol) {
                result.converged = true;
                break;
            }
        }
    }

    result.params = std::move(params);
    result.final_objective = objective;
    return result;
}

std::vector<FitResult> fit_restarts(ModelKind kind, const RatingDataset& ds,
                                    const HyperParams& h, const OptimizerConfig& cfg,
                                    uint64_t base_seed) {
    const int n = std::max(1, cfg.restarts);
    std::vector<FitResult> results(n);
    parallel_for(static_cast<size_t>(n), [&](size_t k) {
        const uint64_t seed = base_seed + static_cast<uint64_t>(k);
        try {
            results[k] = fit(kind, ds, h, cfg, seed);
        } catch (const Error& e) {
            FitResult failure;
            failure.kind = kind;
            failure.seed = seed;
            failure.failed = true;
            failure.error = std::string(e.code_name()) + ": " + e.what();
            results[k] = std::move(failure);
        }
    });
    return results;
}

const FitResult* best_fit(const std::vector<FitResult>& results) {
    const FitResult* best = nullptr;
    for (const auto& r : results) {
        if (r.failed) continue;
        if (!best || r.final_objective > best->final_objective) best = &r;
    }
    return best;
}

}  // namespace crowdagg
