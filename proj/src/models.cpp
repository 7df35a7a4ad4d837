#include "crowdagg/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "crowdagg/errors.hpp"

namespace crowdagg {

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::Cim: return "CIM";
        case ModelKind::Cdm: return "CDM";
        case ModelKind::ImpCim: return "ImpCIM";
        case ModelKind::ImpCdm: return "ImpCDM";
    }
    return "CIM";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "CIM") return ModelKind::Cim;
    if (s == "CDM") return ModelKind::Cdm;
    if (s == "ImpCIM") return ModelKind::ImpCim;
    if (s == "ImpCDM") return ModelKind::ImpCdm;
    raise(ErrorCode::UnsupportedKind,
          "unknown model kind '" + s + "' (expected CIM, CDM, ImpCIM, or ImpCDM)");
}

bool has_impression(ModelKind k) { return k == ModelKind::ImpCim || k == ModelKind::ImpCdm; }
bool per_criterion_variance(ModelKind k) { return k == ModelKind::Cim || k == ModelKind::ImpCim; }

double softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

double softplus_inv(double y) {
    if (y > 30.0) return y;
    return std::log(std::expm1(y));
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

std::vector<std::pair<int, int>> observed_pairs(const RatingDataset& ds) {
    std::set<std::pair<int, int>> pairs;
    for (const auto& rc : ds.coords()) pairs.insert({rc.target, rc.worker});
    return {pairs.begin(), pairs.end()};
}

size_t ParameterSet::free_count() const {
    return potential.size() + criterion_offset.size() + worker_bias.size() +
           criterion_bias.size() + target_var_raw.size() + worker_var_raw.size() +
           impression_pairs.size();
}

void check_shapes(const ParameterSet& p, const RatingDataset& ds) {
    const int ti = ds.target_count();
    const int wj = ds.worker_count();
    const int cm = ds.criterion_count();
    const int var_cols = per_criterion_variance(p.kind) ? cm : 1;

    auto fail = [](const std::string& what) {
        raise(ErrorCode::ShapeMismatch, "parameter shape mismatch: " + what);
    };
    if (static_cast<int>(p.potential.size()) != ti) fail("t");
    if (p.criterion_offset.rows() != ti || p.criterion_offset.cols() != cm) fail("q");
    if (static_cast<int>(p.worker_bias.size()) != wj) fail("b");
    if (static_cast<int>(p.criterion_bias.size()) != cm) fail("c");
    if (p.target_var_raw.rows() != ti || p.target_var_raw.cols() != var_cols) fail("r_raw");
    if (p.worker_var_raw.rows() != wj || p.worker_var_raw.cols() != var_cols) fail("w_raw");
    if (has_impression(p.kind)) {
        if (p.impression.rows() != ti || p.impression.cols() != wj) fail("mu");
        for (const auto& [t, w] : p.impression_pairs)
            if (t < 0 || t >= ti || w < 0 || w >= wj) fail("mu pairs");
    } else {
        if (!p.impression.empty() || !p.impression_pairs.empty()) fail("mu present");
    }
}

double predicted_mean(const ParameterSet& p, int target, int worker, int criterion) {
    if (has_impression(p.kind))
        return p.impression(target, worker) + p.criterion_offset(target, criterion) +
               p.criterion_bias[criterion];
    return p.potential[target] + p.criterion_offset(target, criterion) + p.worker_bias[worker] +
           p.criterion_bias[criterion];
}

double predicted_variance(const ParameterSet& p, int target, int worker, int criterion) {
    const int col = per_criterion_variance(p.kind) ? criterion : 0;
    return softplus(p.target_var_raw(target, col)) + softplus(p.worker_var_raw(worker, col));
}

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;  // ln(2*pi)

inline double log_normal_pdf(double x, double mean, double var) {
    const double d = x - mean;
    return -0.5 * (kLogTwoPi + std::log(var) + d * d / var);
}

// Shape-rate gamma: log p(x) = a ln b - lgamma(a) + (a-1) ln x - b x.
inline double log_gamma_pdf(double x, double shape, double rate) {
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) -
           rate * x;
}

struct VarTerm {
    double value;      // softplus(raw)
    double slope;      // sigmoid(raw), d value / d raw
    double log_prior;  // gamma prior at value + softplus Jacobian
    double d_prior;    // derivative of log_prior w.r.t. raw
};

inline VarTerm var_term(double raw, double shape, double rate) {
    VarTerm t;
    t.value = softplus(raw);
    t.slope = sigmoid(raw);
    // log softplus Jacobian = ln sigmoid(raw); d/draw = 1 - sigmoid(raw).
    t.log_prior = log_gamma_pdf(t.value, shape, rate) - softplus(-raw);
    t.d_prior = ((shape - 1.0) / t.value - rate) * t.slope + (1.0 - t.slope);
    return t;
}

}  // namespace

namespace {

// Zero-fill grad, reshaping only when it does not already match p.
void reset_like(ParameterSet& grad, const ParameterSet& p) {
    if (grad.kind == p.kind && grad.potential.size() == p.potential.size() &&
        grad.criterion_offset.rows() == p.criterion_offset.rows() &&
        grad.criterion_offset.cols() == p.criterion_offset.cols() &&
        grad.worker_bias.size() == p.worker_bias.size() &&
        grad.criterion_bias.size() == p.criterion_bias.size() &&
        grad.target_var_raw.rows() == p.target_var_raw.rows() &&
        grad.target_var_raw.cols() == p.target_var_raw.cols() &&
        grad.worker_var_raw.rows() == p.worker_var_raw.rows() &&
        grad.worker_var_raw.cols() == p.worker_var_raw.cols() &&
        grad.impression.rows() == p.impression.rows() &&
        grad.impression.cols() == p.impression.cols() &&
        grad.impression_pairs == p.impression_pairs) {
        std::fill(grad.potential.begin(), grad.potential.end(), 0.0);
        std::fill(grad.criterion_offset.data().begin(), grad.criterion_offset.data().end(), 0.0);
        std::fill(grad.worker_bias.begin(), grad.worker_bias.end(), 0.0);
        std::fill(grad.criterion_bias.begin(), grad.criterion_bias.end(), 0.0);
        std::fill(grad.target_var_raw.data().begin(), grad.target_var_raw.data().end(), 0.0);
        std::fill(grad.worker_var_raw.data().begin(), grad.worker_var_raw.data().end(), 0.0);
        std::fill(grad.impression.data().begin(), grad.impression.data().end(), 0.0);
        return;
    }
    grad = zeros_like(p);
}

}  // namespace

double log_posterior_with_gradient(const ParameterSet& p, const HyperParams& h,
                                   const RatingDataset& ds, ParameterSet& grad) {
    check_shapes(p, ds);
    reset_like(grad, p);

    const bool imp = has_impression(p.kind);
    const bool per_m = per_criterion_variance(p.kind);
    const int var_cols = per_m ? ds.criterion_count() : 1;

    // Precompute softplus values, slopes, and gamma prior terms per raw coord.
    const int ti = ds.target_count();
    const int wj = ds.worker_count();
    std::vector<VarTerm> r_terms(static_cast<size_t>(ti) * var_cols);
    std::vector<VarTerm> w_terms(static_cast<size_t>(wj) * var_cols);
    double lp = 0.0;
    for (int i = 0; i < ti; ++i)
        for (int m = 0; m < var_cols; ++m) {
            auto& t = r_terms[static_cast<size_t>(i) * var_cols + m];
            t = var_term(p.target_var_raw(i, m), h.gamma_shape, h.gamma_rate);
            lp += t.log_prior;
            grad.target_var_raw(i, m) += t.d_prior;
        }
    for (int j = 0; j < wj; ++j)
        for (int m = 0; m < var_cols; ++m) {
            auto& t = w_terms[static_cast<size_t>(j) * var_cols + m];
            t = var_term(p.worker_var_raw(j, m), h.gamma_shape, h.gamma_rate);
            lp += t.log_prior;
            grad.worker_var_raw(j, m) += t.d_prior;
        }

    // Likelihood over observed responses.
    for (const auto& rc : ds.coords()) {
        const int i = rc.target, j = rc.worker, m = rc.criterion;
        const int col = per_m ? m : 0;
        const auto& rt = r_terms[static_cast<size_t>(i) * var_cols + col];
        const auto& wt = w_terms[static_cast<size_t>(j) * var_cols + col];
        const double var = rt.value + wt.value;
        const double mean = imp ? p.impression(i, j) + p.criterion_offset(i, m) +
                                      p.criterion_bias[m]
                                : p.potential[i] + p.criterion_offset(i, m) + p.worker_bias[j] +
                                      p.criterion_bias[m];
        const double d = static_cast<double>(rc.grade) - mean;
        lp += -0.5 * (kLogTwoPi + std::log(var) + d * d / var);

        const double d_mean = d / var;
        const double d_var = 0.5 * (d * d / (var * var) - 1.0 / var);
        if (imp) {
            grad.impression(i, j) += d_mean;
        } else {
            grad.potential[i] += d_mean;
            grad.worker_bias[j] += d_mean;
        }
        grad.criterion_offset(i, m) += d_mean;
        grad.criterion_bias[m] += d_mean;
        grad.target_var_raw(i, col) += d_var * rt.slope;
        grad.worker_var_raw(j, col) += d_var * wt.slope;
    }

    // Normal priors on t, q, b, c.
    for (int i = 0; i < ti; ++i) {
        lp += log_normal_pdf(p.potential[i], h.t_prior_mean, h.t_prior_var);
        grad.potential[i] += -(p.potential[i] - h.t_prior_mean) / h.t_prior_var;
    }
    for (int i = 0; i < ti; ++i)
        for (int m = 0; m < ds.criterion_count(); ++m) {
            lp += log_normal_pdf(p.criterion_offset(i, m), 0.0, h.offset_prior_var);
            grad.criterion_offset(i, m) += -p.criterion_offset(i, m) / h.offset_prior_var;
        }
    for (int j = 0; j < wj; ++j) {
        lp += log_normal_pdf(p.worker_bias[j], 0.0, h.offset_prior_var);
        grad.worker_bias[j] += -p.worker_bias[j] / h.offset_prior_var;
    }
    for (int m = 0; m < ds.criterion_count(); ++m) {
        lp += log_normal_pdf(p.criterion_bias[m], 0.0, h.offset_prior_var);
        grad.criterion_bias[m] += -p.criterion_bias[m] / h.offset_prior_var;
    }

    // Impression prior, observed pairs only.
    if (imp) {
        for (const auto& [i, j] : p.impression_pairs) {
            const double center = p.potential[i] + p.worker_bias[j];
            const double d = p.impression(i, j) - center;
            lp += log_normal_pdf(p.impression(i, j), center, h.mu_var);
            grad.impression(i, j) += -d / h.mu_var;
            grad.potential[i] += d / h.mu_var;
            grad.worker_bias[j] += d / h.mu_var;
        }
    }

    return lp;
}

double log_posterior(const ParameterSet& p, const HyperParams& h, const RatingDataset& ds) {
    ParameterSet grad;
    return log_posterior_with_gradient(p, h, ds, grad);
}

ParameterSet log_posterior_gradient(const ParameterSet& p, const HyperParams& h,
                                    const RatingDataset& ds) {
    ParameterSet grad;
    log_posterior_with_gradient(p, h, ds, grad);
    return grad;
}

ParameterSet zeros_like(const ParameterSet& p) {
    ParameterSet z;
    z.kind = p.kind;
    z.potential.assign(p.potential.size(), 0.0);
    z.criterion_offset = Matrix(p.criterion_offset.rows(), p.criterion_offset.cols());
    z.worker_bias.assign(p.worker_bias.size(), 0.0);
    z.criterion_bias.assign(p.criterion_bias.size(), 0.0);
    z.target_var_raw = Matrix(p.target_var_raw.rows(), p.target_var_raw.cols());
    z.worker_var_raw = Matrix(p.worker_var_raw.rows(), p.worker_var_raw.cols());
    z.impression = Matrix(p.impression.rows(), p.impression.cols());
    z.impression_pairs = p.impression_pairs;
    return z;
}

ParameterSet init_parameters(ModelKind kind, const RatingDataset& ds, uint64_t seed) {
    const int ti = ds.target_count();
    const int wj = ds.worker_count();
    const int cm = ds.criterion_count();
    const int var_cols = per_criterion_variance(kind) ? cm : 1;

    ParameterSet p;
    p.kind = kind;
    p.potential.resize(ti);
    p.criterion_offset = Matrix(ti, cm);
    p.worker_bias.resize(wj);
    p.criterion_bias.resize(cm);
    p.target_var_raw = Matrix(ti, var_cols);
    p.worker_var_raw = Matrix(wj, var_cols);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> t_init(3.0, 0.5);
    std::normal_distribution<double> offset_init(0.0, 0.1);

    for (auto& v : p.potential) v = t_init(rng);
    for (auto& v : p.criterion_offset.data()) v = offset_init(rng);
    for (auto& v : p.worker_bias) v = offset_init(rng);
    for (auto& v : p.criterion_bias) v = offset_init(rng);

    if (has_impression(kind)) {
        p.impression = Matrix(ti, wj);
        p.impression_pairs = observed_pairs(ds);
        for (const auto& [i, j] : p.impression_pairs)
            p.impression(i, j) = p.potential[i] + p.worker_bias[j] + offset_init(rng);
    }
    return p;
}

std::vector<double> flatten(const ParameterSet& p) {
    std::vector<double> flat;
    flatten_into(p, flat);
    return flat;
}

void flatten_into(const ParameterSet& p, std::vector<double>& out) {
    out.clear();
    out.reserve(p.free_count());
    out.insert(out.end(), p.potential.begin(), p.potential.end());
    out.insert(out.end(), p.criterion_offset.data().begin(), p.criterion_offset.data().end());
    out.insert(out.end(), p.worker_bias.begin(), p.worker_bias.end());
    out.insert(out.end(), p.criterion_bias.begin(), p.criterion_bias.end());
    out.insert(out.end(), p.target_var_raw.data().begin(), p.target_var_raw.data().end());
    out.insert(out.end(), p.worker_var_raw.data().begin(), p.worker_var_raw.data().end());
    for (const auto& [i, j] : p.impression_pairs) out.push_back(p.impression(i, j));
}

void unflatten(std::span<const double> flat, ParameterSet& p) {
    if (flat.size() != p.free_count())
        raise(ErrorCode::LengthMismatch, "flat vector length " + std::to_string(flat.size()) +
                                             " != free coordinate count " +
                                             std::to_string(p.free_count()));
    size_t k = 0;
    for (auto& v : p.potential) v = flat[k++];
    for (auto& v : p.criterion_offset.data()) v = flat[k++];
    for (auto& v : p.worker_bias) v = flat[k++];
    for (auto& v : p.criterion_bias) v = flat[k++];
    for (auto& v : p.target_var_raw.data()) v = flat[k++];
    for (auto& v : p.worker_var_raw.data()) v = flat[k++];
    for (const auto& [i, j] : p.impression_pairs) p.impression(i, j) = flat[k++];
}

}  // namespace crowdagg
