#include "crowdagg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "crowdagg/dist.hpp"
#include "crowdagg/errors.hpp"

namespace crowdagg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Two-pass, divide by n.
double population_variance(std::span<const double> v) {
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return acc / static_cast<double>(v.size());
}

// Two-pass, divide by n - 1.
double sample_variance(std::span<const double> v) {
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return acc / static_cast<double>(v.size() - 1);
}

bool keep(const ResponseCoord& rc, std::optional<Condition> condition) {
    return !condition || rc.condition == *condition;
}

std::vector<MomentRecord> grouped_moments(
    const RatingDataset& ds, std::optional<Condition> condition,
    const std::function<std::pair<int, int>(const ResponseCoord&)>& key,
    const std::function<std::pair<std::string, std::string>(const RatingDataset&, int, int)>&
        key_ids) {
    std::map<std::pair<int, int>, std::vector<double>> groups;
    for (const auto& rc : ds.coords()) {
        if (!keep(rc, condition)) continue;
        groups[key(rc)].push_back(static_cast<double>(rc.grade));
    }
    std::vector<MomentRecord> records;
    records.reserve(groups.size());
    for (const auto& [k, grades] : groups) {
        if (grades.size() < 2) continue;  // single-answer groups are discarded
        MomentRecord rec;
        std::tie(rec.key_a, rec.key_b) = key_ids(ds, k.first, k.second);
        rec.n = static_cast<int>(grades.size());
        rec.mean = mean_of(grades);
        rec.variance = population_variance(grades);
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace

std::array<double, 5> grade_distribution(const RatingDataset& ds,
                                         std::optional<Condition> condition) {
    std::array<double, 5> counts{};
    size_t total = 0;
    for (const auto& rc : ds.coords()) {
        if (!keep(rc, condition)) continue;
        counts[rc.grade - 1] += 1.0;
        ++total;
    }
    if (total == 0)
        raise(ErrorCode::EmptyCondition,
              "no responses under condition " + (condition ? to_string(*condition) : "any"));
    for (auto& c : counts) c /= static_cast<double>(total);
    return counts;
}

std::vector<MomentRecord> inter_criteria_moments(const RatingDataset& ds,
                                                 std::optional<Condition> condition) {
    return grouped_moments(
        ds, condition,
        [](const ResponseCoord& rc) { return std::make_pair(rc.target, rc.worker); },
        [](const RatingDataset& d, int a, int b) {
            return std::make_pair(d.targets()[a], d.workers()[b]);
        });
}

std::vector<MomentRecord> inter_target_moments(const RatingDataset& ds,
                                               std::optional<Condition> condition) {
    return grouped_moments(
        ds, condition,
        [](const ResponseCoord& rc) { return std::make_pair(rc.worker, rc.criterion); },
        [](const RatingDataset& d, int a, int b) {
            return std::make_pair(d.workers()[a], d.criteria()[b]);
        });
}

TestResult f_test_two_sided(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2)
        raise(ErrorCode::DegenerateSample, "F-test requires at least 2 values per sample");
    const double va = sample_variance(a);
    const double vb = sample_variance(b);
    if (va <= 0.0 || vb <= 0.0)
        raise(ErrorCode::DegenerateSample, "F-test requires nonzero sample variances");

    TestResult r;
    r.test = StatTest::FTwoSided;
    r.statistic = va / vb;
    r.df1 = static_cast<double>(a.size() - 1);
    r.df2 = static_cast<double>(b.size() - 1);
    const double lower = f_cdf(r.statistic, r.df1, r.df2);
    r.p_value = std::min(1.0, 2.0 * std::min(lower, 1.0 - lower));
    return r;
}

TestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2)
        raise(ErrorCode::DegenerateSample, "Welch test requires at least 2 values per sample");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double va = sample_variance(a) / na;
    const double vb = sample_variance(b) / nb;
    if (va + vb <= 0.0)
        raise(ErrorCode::DegenerateSample, "Welch test requires a nonzero variance");

    TestResult r;
    r.test = StatTest::WelchT;
    r.df2 = kNaN;
    r.statistic = (mean_of(a) - mean_of(b)) / std::sqrt(va + vb);
    r.df1 = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    const double lower = student_t_cdf(r.statistic, r.df1);
    r.p_value = std::min(1.0, 2.0 * std::min(lower, 1.0 - lower));
    return r;
}

std::vector<double> midranks(std::span<const double> v) {
    const size_t n = v.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t i, size_t j) { return v[i] < v[j]; });

    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;  // average 1-based rank
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

TestResult brunner_munzel_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2)
        raise(ErrorCode::DegenerateSample,
              "Brunner-Munzel test requires at least 2 values per sample");
    const size_t na = a.size(), nb = b.size();

    std::vector<double> combined(a.begin(), a.end());
    combined.insert(combined.end(), b.begin(), b.end());
    const std::vector<double> rank_combined = midranks(combined);
    const std::vector<double> rank_a = midranks(a);
    const std::vector<double> rank_b = midranks(b);

    double mean_ca = 0.0, mean_cb = 0.0;
    for (size_t i = 0; i < na; ++i) mean_ca += rank_combined[i];
    for (size_t j = 0; j < nb; ++j) mean_cb += rank_combined[na + j];
    mean_ca /= static_cast<double>(na);
    mean_cb /= static_cast<double>(nb);
    const double mean_a = 0.5 * static_cast<double>(na + 1);
    const double mean_b = 0.5 * static_cast<double>(nb + 1);

    double sa = 0.0, sb = 0.0;
    for (size_t i = 0; i < na; ++i) {
        const double d = rank_combined[i] - rank_a[i] - mean_ca + mean_a;
        sa += d * d;
    }
    for (size_t j = 0; j < nb; ++j) {
        const double d = rank_combined[na + j] - rank_b[j] - mean_cb + mean_b;
        sb += d * d;
    }
    sa /= static_cast<double>(na - 1);
    sb /= static_cast<double>(nb - 1);

    TestResult r;
    r.test = StatTest::BrunnerMunzel;
    r.df2 = kNaN;
    r.small_sample = na < 10 || nb < 10;

    const double pooled = na * sa + nb * sb;
    if (pooled <= 0.0) {
        // Every observation tied: relative effect 1/2, no evidence either way.
        r.statistic = 0.0;
        r.df1 = kNaN;
        r.p_value = 1.0;
        r.degenerate = true;
        return r;
    }

    r.statistic = static_cast<double>(na) * static_cast<double>(nb) * (mean_cb - mean_ca) /
                  (static_cast<double>(na + nb) * std::sqrt(pooled));
    r.df1 = pooled * pooled /
            ((na * sa) * (na * sa) / static_cast<double>(na - 1) +
             (nb * sb) * (nb * sb) / static_cast<double>(nb - 1));
    const double lower = student_t_cdf(r.statistic, r.df1);
    r.p_value = std::min(1.0, 2.0 * std::min(lower, 1.0 - lower));
    return r;
}

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        raise(ErrorCode::LengthMismatch, "spearman requires equal-length vectors");
    if (a.size() < 2) raise(ErrorCode::ConstantInput, "spearman requires at least 2 values");

    const std::vector<double> ra = midranks(a);
    const std::vector<double> rb = midranks(b);
    const double ma = mean_of(ra);
    const double mb = mean_of(rb);
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (size_t i = 0; i < ra.size(); ++i) {
        const double da = ra[i] - ma;
        const double db = rb[i] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    if (va <= 0.0 || vb <= 0.0)
        raise(ErrorCode::ConstantInput, "spearman is undefined for constant input");
    return cov / std::sqrt(va * vb);
}

GroundTruth ground_truth(const RatingDataset& ds, PotentialTruthMode mode,
                         const std::string& overall_id) {
    const int ti = ds.target_count();
    const int cm = ds.criterion_count();

    Matrix sums(ti, cm);
    Matrix counts(ti, cm);
    std::vector<double> pooled_sum(ti, 0.0);
    std::vector<double> pooled_count(ti, 0.0);
    for (const auto& rc : ds.coords()) {
        if (rc.condition != Condition::Indv) continue;
        sums(rc.target, rc.criterion) += static_cast<double>(rc.grade);
        counts(rc.target, rc.criterion) += 1.0;
        pooled_sum[rc.target] += static_cast<double>(rc.grade);
        pooled_count[rc.target] += 1.0;
    }

    GroundTruth gt;
    gt.targets = ds.targets();
    gt.criteria = ds.criteria();
    gt.criterion_truth = Matrix(ti, cm);
    for (int i = 0; i < ti; ++i)
        for (int m = 0; m < cm; ++m) {
            if (counts(i, m) == 0.0)
                raise(ErrorCode::MissingCoverage,
                      "no INDV responses for target '" + ds.targets()[i] + "', criterion '" +
                          ds.criteria()[m] + "'");
            gt.criterion_truth(i, m) = sums(i, m) / counts(i, m);
        }

    gt.potential.resize(ti);
    if (mode == PotentialTruthMode::PooledMean) {
        for (int i = 0; i < ti; ++i) gt.potential[i] = pooled_sum[i] / pooled_count[i];
    } else {
        const int overall = ds.criterion_index(overall_id);
        if (overall < 0)
            raise(ErrorCode::MissingCoverage,
                  "criterion '" + overall_id + "' not present; cannot use overall-criterion truth");
        for (int i = 0; i < ti; ++i) gt.potential[i] = gt.criterion_truth(i, overall);
    }
    return gt;
}

MomentSummary summarize_moments(const std::vector<MomentRecord>& records) {
    MomentSummary s;
    s.n_groups = static_cast<int>(records.size());
    s.means.reserve(records.size());
    s.variances.reserve(records.size());
    for (const auto& r : records) {
        s.means.push_back(r.mean);
        s.variances.push_back(r.variance);
    }
    if (!records.empty()) {
        s.mean_of_means = mean_of(s.means);
        s.mean_of_variances = mean_of(s.variances);
        if (records.size() > 1) {
            s.sd_of_means = std::sqrt(sample_variance(s.means));
            s.sd_of_variances = std::sqrt(sample_variance(s.variances));
        }
    }
    return s;
}

StatReport build_stat_report(const RatingDataset& indv_arm, const RatingDataset& simul_arm) {
    StatReport rep;
    rep.grade_dist_indv = grade_distribution(indv_arm, std::nullopt);
    rep.grade_dist_simul = grade_distribution(simul_arm, std::nullopt);

    rep.inter_criteria_indv = summarize_moments(inter_criteria_moments(indv_arm, std::nullopt));
    rep.inter_criteria_simul = summarize_moments(inter_criteria_moments(simul_arm, std::nullopt));
    rep.inter_target_indv = summarize_moments(inter_target_moments(indv_arm, std::nullopt));
    rep.inter_target_simul = summarize_moments(inter_target_moments(simul_arm, std::nullopt));

    rep.mean_f_inter_criteria =
        f_test_two_sided(rep.inter_criteria_indv.means, rep.inter_criteria_simul.means);
    rep.mean_f_inter_target =
        f_test_two_sided(rep.inter_target_indv.means, rep.inter_target_simul.means);
    rep.var_welch_inter_criteria =
        welch_t_test(rep.inter_criteria_indv.variances, rep.inter_criteria_simul.variances);
    rep.var_welch_inter_target =
        welch_t_test(rep.inter_target_indv.variances, rep.inter_target_simul.variances);
    rep.var_bm_inter_criteria =
        brunner_munzel_test(rep.inter_criteria_indv.variances, rep.inter_criteria_simul.variances);
    rep.var_bm_inter_target =
        brunner_munzel_test(rep.inter_target_indv.variances, rep.inter_target_simul.variances);
    return rep;
}

}  // namespace crowdagg
