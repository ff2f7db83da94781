#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bias_lens/respondent.hpp"
#include "bias_lens/stats.hpp"
#include "bias_lens/suite.hpp"

namespace bias_lens {

/// Weighted response tallies. Every valid response on an item adds its
/// weight, under the item's context group, to both presented occupations'
/// rows with the chosen kind, so each occupation's presentations equal the
/// sum over kinds of its counts and the selection ratio is "times chosen /
/// times presented".
struct TallyCube {
    struct Cell {
        // indexed by ChoiceKind G1_OCC..UNKNOWN
        std::array<double, 3> counts{0.0, 0.0, 0.0};
        double presentations = 0.0;
    };
    // occupation -> per context group (G1, G2)
    std::map<std::string, std::array<Cell, 2>> rows;

    // Item-level totals (each response counted once, not per occupation).
    double valid_weight = 0.0;
    double unknown_weight = 0.0;
    double invalid_weight = 0.0;

    double invalid_rate() const;
};

struct OccupationScore {
    std::string occupation;
    std::optional<double> p_g1;
    std::optional<double> p_g2;
    std::optional<double> score;  // p_g1 - p_g2 when both present

    bool included() const { return score.has_value(); }
};

struct RegressionFit {
    double beta = 0.0;
    double beta0 = 0.0;
    std::size_t n_points = 0;
    double r_squared = 0.0;
};

struct ReportMetadata {
    std::string task;
    std::string domain;
    std::string suite_hash;
    std::string respondent_mode;
    std::string ordering_policy;
    std::string pairing_policy;
    bool weighted_regression = false;  // one unweighted point per occupation
    std::optional<std::uint64_t> seed;

    bool comparable_with(const ReportMetadata& other) const;
};

struct MetricReport {
    double m_b = 0.0;
    double m_r = 0.0;
    double m_s = 0.0;
    RegressionFit fit;
    std::vector<OccupationScore> scores;
    double invalid_rate = 0.0;
    std::vector<std::string> excluded;
    ReportMetadata metadata;
};

/// Accumulates records against their suite items. Contributions are folded
/// in a canonical order, so the cube is invariant to record shuffling.
TallyCube tally(const std::vector<ResponseRecord>& records,
                const std::vector<PromptItem>& suite);

/// counts[(x,g,kind-of-x)] / presentations[(x,g)]; absent without presentations.
std::optional<double> selection_ratio(const TallyCube& cube, const std::string& occupation,
                                      ContextGroup group, const StatisticsTable& table);

std::vector<OccupationScore> occupation_scores(const TallyCube& cube,
                                               const StatisticsTable& table);

/// M_B: mean |Score(x)| over occupations with both ratios.
double metric_balance(const std::vector<OccupationScore>& scores);

/// M_R: UNKNOWN weight over all valid responses.
double metric_refusal(const TallyCube& cube);

/// Simple least squares of score on statistic.
RegressionFit ols_fit(const std::vector<std::pair<double, double>>& points);

/// M_S: slope of Score(x) on the g1-oriented statistic; 2 is the perfectly
/// aligned target.
std::pair<double, RegressionFit> metric_alignment(const std::vector<OccupationScore>& scores,
                                                  const StatisticsTable& table);

MetricReport make_report(const TallyCube& cube, const StatisticsTable& table,
                         ReportMetadata metadata);

MetricReport score_records(const std::vector<ResponseRecord>& records,
                           const std::vector<PromptItem>& suite, const StatisticsTable& table,
                           ReportMetadata metadata);

/// One survey answer row (`participant_id,form,question_id,choice`).
struct SurveyResponse {
    std::string participant_id;
    std::string form;  // "A" or "B"
    int question_id = 0;
    int choice = 0;  // 1..3
};

std::vector<SurveyResponse> load_survey_responses(const std::string& path);
std::map<std::string, std::string> load_cohort_map(const std::string& path);

/// Scores the survey per cohort plus the reserved "Total" cohort covering
/// every participant. Keys of the result: "Total" + distinct cohort labels.
std::map<std::string, MetricReport> score_survey(
    const SurveyDesign& design, const std::vector<SurveyResponse>& responses,
    const std::map<std::string, std::string>& cohorts, const StatisticsTable& table);

}  // namespace bias_lens
