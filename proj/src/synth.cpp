#include "crowdagg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "crowdagg/errors.hpp"

namespace crowdagg {

namespace {

std::vector<std::string> make_ids(char prefix, int n) {
    const size_t width = std::max<size_t>(3, std::to_string(std::max(0, n - 1)).size());
    std::vector<std::string> ids(n);
    for (int k = 0; k < n; ++k) {
        std::string num = std::to_string(k);
        ids[k] = prefix + std::string(width - num.size(), '0') + num;
    }
    return ids;
}

struct Draws {
    std::vector<double> t;
    Matrix q;
    std::vector<double> b;
    std::vector<double> c;
    Matrix r;   // effective (positive) variances
    Matrix w;
    Matrix mu;  // impression kinds only
};

// Draw order is fixed: t, q, b, c, r, w, mu.
Draws draw_parameters(const SynthConfig& cfg, std::mt19937_64& rng, bool per_criterion) {
    const int ti = cfg.n_targets, wj = cfg.n_workers, cm = cfg.n_criteria;
    const int var_cols = per_criterion ? cm : 1;

    std::normal_distribution<double> t_prior(3.0, 1.0);
    std::normal_distribution<double> offset_prior(0.0, 1.0);
    std::gamma_distribution<double> var_prior(2.0, 0.5);  // shape 2, rate 2

    Draws d;
    d.t.resize(ti);
    for (auto& v : d.t) v = t_prior(rng);
    d.q = Matrix(ti, cm);
    for (auto& v : d.q.data()) v = offset_prior(rng);
    d.b.resize(wj);
    for (auto& v : d.b) v = offset_prior(rng);
    d.c.resize(cm);
    for (auto& v : d.c) v = offset_prior(rng);

    if (cfg.truth.potential) {
        if (static_cast<int>(cfg.truth.potential->size()) != ti)
            raise(ErrorCode::ShapeMismatch, "truth override t has wrong length");
        d.t = *cfg.truth.potential;
    }
    if (cfg.truth.criterion_offset) {
        if (cfg.truth.criterion_offset->rows() != ti || cfg.truth.criterion_offset->cols() != cm)
            raise(ErrorCode::ShapeMismatch, "truth override q has wrong shape");
        d.q = *cfg.truth.criterion_offset;
    }
    if (cfg.truth.worker_bias) {
        if (static_cast<int>(cfg.truth.worker_bias->size()) != wj)
            raise(ErrorCode::ShapeMismatch, "truth override b has wrong length");
        d.b = *cfg.truth.worker_bias;
    }
    if (cfg.truth.criterion_bias) {
        if (static_cast<int>(cfg.truth.criterion_bias->size()) != cm)
            raise(ErrorCode::ShapeMismatch, "truth override c has wrong length");
        d.c = *cfg.truth.criterion_bias;
    }

    d.r = Matrix(ti, var_cols);
    for (auto& v : d.r.data()) v = var_prior(rng);
    d.w = Matrix(wj, var_cols);
    for (auto& v : d.w.data()) v = var_prior(rng);

    if (has_impression(cfg.kind)) {
        d.mu = Matrix(ti, wj);
        std::normal_distribution<double> imp_noise(0.0, 1.0);
        const double sd = std::sqrt(cfg.impression_strength);
        for (int i = 0; i < ti; ++i)
            for (int j = 0; j < wj; ++j)
                d.mu(i, j) = d.t[i] + d.b[j] + (sd > 0.0 ? sd * imp_noise(rng) : 0.0);
    }
    return d;
}

ParameterSet truth_parameters(const SynthConfig& cfg, const Draws& d) {
    ParameterSet p;
    p.kind = cfg.kind;
    p.potential = d.t;
    p.criterion_offset = d.q;
    p.worker_bias = d.b;
    p.criterion_bias = d.c;
    p.target_var_raw = Matrix(d.r.rows(), d.r.cols());
    for (size_t k = 0; k < d.r.size(); ++k) p.target_var_raw.data()[k] = softplus_inv(d.r.data()[k]);
    p.worker_var_raw = Matrix(d.w.rows(), d.w.cols());
    for (size_t k = 0; k < d.w.size(); ++k) p.worker_var_raw.data()[k] = softplus_inv(d.w.data()[k]);
    if (has_impression(cfg.kind)) {
        p.impression = d.mu;
        p.impression_pairs.reserve(static_cast<size_t>(cfg.n_targets) * cfg.n_workers);
        for (int i = 0; i < cfg.n_targets; ++i)
            for (int j = 0; j < cfg.n_workers; ++j) p.impression_pairs.emplace_back(i, j);
    }
    return p;
}

}  // namespace

int discretize_grade(double raw) {
    const long g = std::lround(raw);
    return static_cast<int>(std::clamp(g, 1L, 5L));
}

SynthOutput sample(const SynthConfig& cfg) {
    if (cfg.n_targets < 1 || cfg.n_workers < 1 || cfg.n_criteria < 1)
        raise(ErrorCode::ShapeMismatch, "synth sizes must be >= 1");
    if (cfg.impression_strength < 0.0)
        raise(ErrorCode::ConfigError, "impression_strength must be >= 0");

    const bool per_m = per_criterion_variance(cfg.kind);
    const bool imp = has_impression(cfg.kind);
    std::mt19937_64 rng(cfg.seed);
    Draws d = draw_parameters(cfg, rng, per_m);

    const auto worker_ids = make_ids('w', cfg.n_workers);
    const auto target_ids = make_ids('t', cfg.n_targets);
    const auto criterion_ids = make_ids('c', cfg.n_criteria);

    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<Response> responses;
    std::vector<double> raw;
    responses.reserve(static_cast<size_t>(cfg.n_workers) * cfg.n_targets * cfg.n_criteria);
    raw.reserve(responses.capacity());

    // Worker-major generation matches the dataset's canonical response order.
    for (int j = 0; j < cfg.n_workers; ++j)
        for (int i = 0; i < cfg.n_targets; ++i)
            for (int m = 0; m < cfg.n_criteria; ++m) {
                const int col = per_m ? m : 0;
                const double mean = imp ? d.mu(i, j) + d.q(i, m) + d.c[m]
                                        : d.t[i] + d.q(i, m) + d.b[j] + d.c[m];
                const double var = d.r(i, col) + d.w(j, col);
                const double x = mean + std::sqrt(var) * unit(rng);
                raw.push_back(x);
                responses.push_back(Response{worker_ids[j], target_ids[i], criterion_ids[m],
                                             discretize_grade(x), Condition::Simul});
            }

    SynthOutput out;
    out.dataset = RatingDataset(std::move(responses));
    out.truth = truth_parameters(cfg, d);
    out.raw = std::move(raw);
    return out;
}

PairedSynthOutput sample_paired(const SynthConfig& cfg) {
    if (!has_impression(cfg.kind))
        raise(ErrorCode::UnsupportedKind,
              "sample_paired requires an impression kind (ImpCIM or ImpCDM) for the simul arm");
    if (cfg.n_targets < 1 || cfg.n_workers < 1 || cfg.n_criteria < 1)
        raise(ErrorCode::ShapeMismatch, "synth sizes must be >= 1");
    if (cfg.impression_strength < 0.0)
        raise(ErrorCode::ConfigError, "impression_strength must be >= 0");

    const bool per_m = per_criterion_variance(cfg.kind);
    std::mt19937_64 rng(cfg.seed);
    Draws d = draw_parameters(cfg, rng, per_m);

    const auto worker_ids = make_ids('w', cfg.n_workers);
    const auto target_ids = make_ids('t', cfg.n_targets);
    const auto criterion_ids = make_ids('c', cfg.n_criteria);

    std::normal_distribution<double> unit(0.0, 1.0);
    const size_t cells = static_cast<size_t>(cfg.n_workers) * cfg.n_targets * cfg.n_criteria;

    PairedSynthOutput out;
    out.simul_raw.reserve(cells);
    out.indv_raw.reserve(cells);
    std::vector<Response> simul_responses, indv_responses;
    simul_responses.reserve(cells);
    indv_responses.reserve(cells);

    // Simul arm: one shared impression per (target, worker), noise r + w.
    for (int j = 0; j < cfg.n_workers; ++j)
        for (int i = 0; i < cfg.n_targets; ++i)
            for (int m = 0; m < cfg.n_criteria; ++m) {
                const int col = per_m ? m : 0;
                const double mean = d.mu(i, j) + d.q(i, m) + d.c[m];
                const double var = d.r(i, col) + d.w(j, col);
                const double x = mean + std::sqrt(var) * unit(rng);
                out.simul_raw.push_back(x);
                simul_responses.push_back(Response{worker_ids[j], target_ids[i], criterion_ids[m],
                                                   discretize_grade(x), Condition::Simul});
            }

    // Indv arm: no shared impression; the impression variance moves into the
    // per-criterion noise, so each response's marginal variance matches the
    // simul arm while the inter-criteria coupling disappears.
    for (int j = 0; j < cfg.n_workers; ++j)
        for (int i = 0; i < cfg.n_targets; ++i)
            for (int m = 0; m < cfg.n_criteria; ++m) {
                const int col = per_m ? m : 0;
                const double mean = d.t[i] + d.q(i, m) + d.b[j] + d.c[m];
                const double var = d.r(i, col) + d.w(j, col) + cfg.impression_strength;
                const double x = mean + std::sqrt(var) * unit(rng);
                out.indv_raw.push_back(x);
                indv_responses.push_back(Response{worker_ids[j], target_ids[i], criterion_ids[m],
                                                  discretize_grade(x), Condition::Indv});
            }

    out.simul = RatingDataset(std::move(simul_responses));
    out.indv = RatingDataset(std::move(indv_responses));
    out.truth = truth_parameters(cfg, d);
    return out;
}

}  // namespace crowdagg
