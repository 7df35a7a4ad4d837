#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crowdagg/dataset.hpp"
#include "crowdagg/matrix.hpp"

namespace crowdagg {

// The four generative models. The Imp variants replace the per-response mean
// t_i + b_j with a per-(target, worker) impression; the *DM variants share one
// noise variance across criteria instead of one per criterion.
enum class ModelKind { Cim, Cdm, ImpCim, ImpCdm };

std::string to_string(ModelKind k);                       // "CIM", "CDM", "ImpCIM", "ImpCDM"
ModelKind model_kind_from_string(const std::string& s);   // throws UnsupportedKind

bool has_impression(ModelKind k);           // ImpCIM, ImpCDM
bool per_criterion_variance(ModelKind k);   // CIM, ImpCIM

struct HyperParams {
    double t_prior_mean = 3.0;
    double t_prior_var = 1.0;
    double offset_prior_var = 1.0;  // q, b, c
    double gamma_shape = 2.0;       // variance priors
    double gamma_rate = 2.0;
    double mu_var = 1.0;            // impression prior variance
};

// Free parameters of one model instance. Variance contributions are stored
// unconstrained; the effective values are softplus(raw) > 0. Impressions are
// kept dense for indexing but only the observed (target, worker) pairs are
// free coordinates.
struct ParameterSet {
    ModelKind kind = ModelKind::Cim;
    std::vector<double> potential;                      // t, per target
    Matrix criterion_offset;                            // q, targets x criteria
    std::vector<double> worker_bias;                    // b, per worker
    std::vector<double> criterion_bias;                 // c, per criterion
    Matrix target_var_raw;                              // r_raw, targets x (criteria | 1)
    Matrix worker_var_raw;                              // w_raw, workers x (criteria | 1)
    Matrix impression;                                  // mu, targets x workers (Imp kinds)
    std::vector<std::pair<int, int>> impression_pairs;  // observed (target, worker), sorted

    size_t free_count() const;
    bool operator==(const ParameterSet&) const = default;
};

double softplus(double x);
double softplus_inv(double y);  // y > 0
double sigmoid(double x);

// Sorted (target, worker) pairs with at least one response.
std::vector<std::pair<int, int>> observed_pairs(const RatingDataset& ds);

// Throws ShapeMismatch when p's shapes disagree with (p.kind, ds).
void check_shapes(const ParameterSet& p, const RatingDataset& ds);

double predicted_mean(const ParameterSet& p, int target, int worker, int criterion);
double predicted_variance(const ParameterSet& p, int target, int worker, int criterion);

// Joint log density: Gaussian likelihood over observed responses plus all
// priors (normal on t/q/b/c, gamma on softplus-transformed variances with the
// softplus Jacobian, normal on impressions around t_i + b_j).
double log_posterior(const ParameterSet& p, const HyperParams& h, const RatingDataset& ds);

// Analytic gradient for every free coordinate, chain rule through softplus.
ParameterSet log_posterior_gradient(const ParameterSet& p, const HyperParams& h,
                                    const RatingDataset& ds);

// Value and gradient in one pass (fit's inner loop).
double log_posterior_with_gradient(const ParameterSet& p, const HyperParams& h,
                                   const RatingDataset& ds, ParameterSet& grad);

// t ~ N(3, 0.5^2); q, b, c ~ N(0, 0.1^2); raw variances 0; impressions
// t_i + b_j plus N(0, 0.1^2) noise. Deterministic under seed.
ParameterSet init_parameters(ModelKind kind, const RatingDataset& ds, uint64_t seed);

// Same shapes as p, all coordinates zero.
ParameterSet zeros_like(const ParameterSet& p);

// Flat coordinate order: t, q (row-major), b, c, r_raw, w_raw, mu (observed
// pairs in sorted order).
std::vector<double> flatten(const ParameterSet& p);
void flatten_into(const ParameterSet& p, std::vector<double>& out);
void unflatten(std::span<const double> flat, ParameterSet& p);

}  // namespace crowdagg
