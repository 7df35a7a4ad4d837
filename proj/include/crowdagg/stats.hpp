#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crowdagg/dataset.hpp"
#include "crowdagg/matrix.hpp"

namespace crowdagg {

// Mean/variance of one rating group: (target, worker) over criteria for the
// inter-criteria view, (worker, criterion) over targets for the inter-target
// view. Groups with a single rating are discarded; variance is population
// variance (divide by n).
struct MomentRecord {
    std::string key_a;
    std::string key_b;
    int n = 0;
    double mean = 0.0;
    double variance = 0.0;
};

enum class StatTest { FTwoSided, WelchT, BrunnerMunzel };

struct TestResult {
    StatTest test = StatTest::WelchT;
    double statistic = 0.0;
    double p_value = 1.0;
    double df1 = 0.0;
    double df2 = 0.0;       // F-test only; NaN otherwise
    bool degenerate = false;
    bool small_sample = false;  // Brunner-Munzel below the recommended n >= 10
};

// condition = nullopt means all responses regardless of condition.
std::array<double, 5> grade_distribution(const RatingDataset& ds,
                                         std::optional<Condition> condition);

std::vector<MomentRecord> inter_criteria_moments(const RatingDataset& ds,
                                                 std::optional<Condition> condition);
std::vector<MomentRecord> inter_target_moments(const RatingDataset& ds,
                                               std::optional<Condition> condition);

// statistic = s_a^2 / s_b^2 (sample variances), p = 2 min(P(F<=s), P(F>=s)).
TestResult f_test_two_sided(std::span<const double> a, std::span<const double> b);

TestResult welch_t_test(std::span<const double> a, std::span<const double> b);

TestResult brunner_munzel_test(std::span<const double> a, std::span<const double> b);

// Tie-aware Spearman rank correlation: Pearson correlation of midranks.
double spearman(std::span<const double> a, std::span<const double> b);

// 1-based midranks (ties get the average of the ranks they span).
std::vector<double> midranks(std::span<const double> v);

struct GroundTruth {
    std::vector<std::string> targets;
    std::vector<std::string> criteria;
    Matrix criterion_truth;         // targets x criteria, mean of INDV grades
    std::vector<double> potential;  // per target
};

enum class PotentialTruthMode { PooledMean, OverallCriterion };

// Per-(target, criterion) truth = mean of INDV grades; per-target truth is
// either the pooled mean of all the target's INDV grades or the "overall"
// criterion's column.
GroundTruth ground_truth(const RatingDataset& ds,
                         PotentialTruthMode mode = PotentialTruthMode::PooledMean,
                         const std::string& overall_id = "overall");

struct MomentSummary {
    int n_groups = 0;
    double mean_of_means = 0.0;
    double sd_of_means = 0.0;       // sample SD
    double mean_of_variances = 0.0;
    double sd_of_variances = 0.0;
    std::vector<double> means;      // underlying distributions
    std::vector<double> variances;
};

// Bias-analysis bundle comparing two response arms. The F-test compares the
// two mean distributions, Welch and Brunner-Munzel the variance distributions.
struct StatReport {
    std::array<double, 5> grade_dist_indv{};
    std::array<double, 5> grade_dist_simul{};
    MomentSummary inter_criteria_indv, inter_criteria_simul;
    MomentSummary inter_target_indv, inter_target_simul;
    TestResult mean_f_inter_criteria, mean_f_inter_target;
    TestResult var_welch_inter_criteria, var_welch_inter_target;
    TestResult var_bm_inter_criteria, var_bm_inter_target;
};

// Each arm is taken whole (no condition filtering), so the arms may come from
// separate files or from one mixed file split by the caller.
StatReport build_stat_report(const RatingDataset& indv_arm, const RatingDataset& simul_arm);

MomentSummary summarize_moments(const std::vector<MomentRecord>& records);

}  // namespace crowdagg
