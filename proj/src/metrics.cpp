#include "bias_lens/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "bias_lens/error.hpp"
#include "bias_lens/util.hpp"

namespace bias_lens {

double TallyCube::invalid_rate() const {
    const double total = valid_weight + invalid_weight;
    return total > 0.0 ? invalid_weight / total : 0.0;
}

bool ReportMetadata::comparable_with(const ReportMetadata& other) const {
    return task == other.task && domain == other.domain && suite_hash == other.suite_hash;
}

TallyCube tally(const std::vector<ResponseRecord>& records,
                const std::vector<PromptItem>& suite) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < suite.size(); ++i) index[suite[i].id] = i;

    std::vector<const ResponseRecord*> ordered;
    ordered.reserve(records.size());
    for (const auto& record : records) {
        if (index.find(record.prompt_id) == index.end()) {
            raise(ErrorCode::UnknownPromptId, record.prompt_id);
        }
        ordered.push_back(&record);
    }
    // Canonical fold order: metrics stay bit-identical however the caller
    // shuffled the records.
    std::sort(ordered.begin(), ordered.end(),
              [&index](const ResponseRecord* a, const ResponseRecord* b) {
                  const auto ka = std::tuple(index.at(a->prompt_id), static_cast<int>(a->choice),
                                             a->weight, a->raw_text);
                  const auto kb = std::tuple(index.at(b->prompt_id), static_cast<int>(b->choice),
                                             b->weight, b->raw_text);
                  return ka < kb;
              });

    TallyCube cube;
    for (const ResponseRecord* record : ordered) {
        const double w = record->weight;
        if (record->choice == ChoiceKind::INVALID) {
            cube.invalid_weight += w;
            continue;
        }
        cube.valid_weight += w;
        if (record->choice == ChoiceKind::UNKNOWN) cube.unknown_weight += w;

        const PromptItem& item = suite[index.at(record->prompt_id)];
        if (item.context_group == ContextGroup::None) continue;
        const std::size_t g = item.context_group == ContextGroup::G1 ? 0 : 1;
        const std::size_t kind = static_cast<std::size_t>(record->choice);
        for (const auto& slot : item.options) {
            if (slot.kind == ChoiceKind::UNKNOWN) continue;
            auto& cell = cube.rows[slot.label][g];
            cell.counts[kind] += w;
            cell.presentations += w;
        }
    }
    return cube;
}

std::optional<double> selection_ratio(const TallyCube& cube, const std::string& occupation,
                                      ContextGroup group, const StatisticsTable& table) {
    ChoiceKind own_kind;
    if (table.in_g1(occupation)) {
        own_kind = ChoiceKind::G1_OCC;
    } else if (table.in_g2(occupation)) {
        own_kind = ChoiceKind::G2_OCC;
    } else {
        return std::nullopt;
    }
    const auto it = cube.rows.find(occupation);
    if (it == cube.rows.end()) return std::nullopt;
    const auto& cell = it->second[group == ContextGroup::G1 ? 0 : 1];
    if (cell.presentations <= 0.0) return std::nullopt;
    return cell.counts[static_cast<std::size_t>(own_kind)] / cell.presentations;
}

std::vector<OccupationScore> occupation_scores(const TallyCube& cube,
                                               const StatisticsTable& table) {
    std::vector<OccupationScore> scores;
    scores.reserve(cube.rows.size());
    for (const auto& [occupation, cells] : cube.rows) {
        (void)cells;
        OccupationScore s;
        s.occupation = occupation;
        s.p_g1 = selection_ratio(cube, occupation, ContextGroup::G1, table);
        s.p_g2 = selection_ratio(cube, occupation, ContextGroup::G2, table);
        if (s.p_g1 && s.p_g2) s.score = *s.p_g1 - *s.p_g2;
        scores.push_back(std::move(s));
    }
    return scores;
}

double metric_balance(const std::vector<OccupationScore>& scores) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : scores) {
        if (!s.included()) continue;
        sum += std::abs(*s.score);
        ++n;
    }
    if (n == 0) raise(ErrorCode::NoScores, "no occupation has both selection ratios");
    return sum / static_cast<double>(n);
}

double metric_refusal(const TallyCube& cube) {
    if (cube.valid_weight <= 0.0) raise(ErrorCode::NoValidResponses, "nothing to score");
    return cube.unknown_weight / cube.valid_weight;
}

RegressionFit ols_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) {
        raise(ErrorCode::TooFewPoints,
              "regression needs at least 2 points, have " + std::to_string(points.size()));
    }
    const double n = static_cast<double>(points.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto& [x, y] : points) {
        mean_x += x;
        mean_y += y;
    }
    mean_x /= n;
    mean_y /= n;

    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& [x, y] : points) {
        const double dx = x - mean_x;
        const double dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) raise(ErrorCode::ZeroVariance, "statistic values are all equal");

    RegressionFit fit;
    fit.beta = sxy / sxx;
    fit.beta0 = mean_y - fit.beta * mean_x;
    fit.n_points = points.size();
    if (syy == 0.0) {
        fit.r_squared = 1.0;
    } else {
        double ss_res = 0.0;
        for (const auto& [x, y] : points) {
            const double e = y - (fit.beta * x + fit.beta0);
            ss_res += e * e;
        }
        fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    }
    return fit;
}

std::pair<double, RegressionFit> metric_alignment(const std::vector<OccupationScore>& scores,
                                                  const StatisticsTable& table) {
    std::vector<std::pair<double, double>> points;
    for (const auto& s : scores) {
        if (!s.included()) continue;
        const auto stat = table.oriented_ratio(s.occupation);
        if (!stat) continue;
        points.emplace_back(*stat, *s.score);
    }
    const RegressionFit fit = ols_fit(points);
    return {fit.beta, fit};
}

MetricReport make_report(const TallyCube& cube, const StatisticsTable& table,
                         ReportMetadata metadata) {
    MetricReport report;
    report.scores = occupation_scores(cube, table);
    for (const auto& s : report.scores) {
        if (!s.included()) report.excluded.push_back(s.occupation);
    }
    report.m_b = metric_balance(report.scores);
    report.m_r = metric_refusal(cube);
    std::tie(report.m_s, report.fit) = metric_alignment(report.scores, table);
    report.invalid_rate = cube.invalid_rate();
    report.metadata = std::move(metadata);
    return report;
}

MetricReport score_records(const std::vector<ResponseRecord>& records,
                           const std::vector<PromptItem>& suite, const StatisticsTable& table,
                           ReportMetadata metadata) {
    return make_report(tally(records, suite), table, std::move(metadata));
}

namespace {

int parse_int_field(const std::string& text, size_t row, const char* column, int lo, int hi) {
    const std::string t = trim(text);
    int value = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size() || value < lo || value > hi) {
        raise(ErrorCode::ParseError, "row " + std::to_string(row) + ", column " + column +
                                         ": expected integer in [" + std::to_string(lo) + "," +
                                         std::to_string(hi) + "], got '" + t + "'");
    }
    return value;
}

}  // namespace

std::vector<SurveyResponse> load_survey_responses(const std::string& path) {
    const auto lines = split_lines(read_text_file(path));
    if (lines.empty()) raise(ErrorCode::ParseError, "empty survey response CSV");
    if (trim(lines[0]) != "participant_id,form,question_id,choice") {
        raise(ErrorCode::ParseError,
              "row 1: expected header 'participant_id,form,question_id,choice'");
    }
    std::vector<SurveyResponse> responses;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 4) {
            raise(ErrorCode::ParseError,
                  "row " + std::to_string(i + 1) + ": expected 4 columns");
        }
        SurveyResponse r;
        r.participant_id = trim(fields[0]);
        r.form = trim(fields[1]);
        if (r.form != "A" && r.form != "B") {
            raise(ErrorCode::ParseError,
                  "row " + std::to_string(i + 1) + ": form must be A or B, got '" + r.form + "'");
        }
        r.question_id = parse_int_field(fields[2], i + 1, "question_id", 1, 1 << 20);
        r.choice = parse_int_field(fields[3], i + 1, "choice", 1, 3);
        responses.push_back(std::move(r));
    }
    return responses;
}

std::map<std::string, std::string> load_cohort_map(const std::string& path) {
    const auto lines = split_lines(read_text_file(path));
    if (lines.empty()) raise(ErrorCode::ParseError, "empty cohort CSV");
    if (trim(lines[0]) != "participant_id,cohort") {
        raise(ErrorCode::ParseError, "row 1: expected header 'participant_id,cohort'");
    }
    std::map<std::string, std::string> cohorts;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 2) {
            raise(ErrorCode::ParseError, "row " + std::to_string(i + 1) + ": expected 2 columns");
        }
        const std::string cohort = trim(fields[1]);
        if (cohort == "Total") {
            raise(ErrorCode::ParseError,
                  "row " + std::to_string(i + 1) + ": cohort name 'Total' is reserved");
        }
        cohorts[trim(fields[0])] = cohort;
    }
    return cohorts;
}

std::map<std::string, MetricReport> score_survey(
    const SurveyDesign& design, const std::vector<SurveyResponse>& responses,
    const std::map<std::string, std::string>& cohorts, const StatisticsTable& table) {
    const std::vector<PromptItem> items = design.all_items();

    const auto item_for = [&design](const SurveyResponse& r) -> const PromptItem& {
        const auto& form = r.form == "A" ? design.form_a : design.form_b;
        if (r.question_id < 1 || static_cast<size_t>(r.question_id) > form.size()) {
            raise(ErrorCode::UnknownQuestion,
                  "form " + r.form + " question " + std::to_string(r.question_id));
        }
        return form[r.question_id - 1];
    };

    std::map<std::string, std::vector<ResponseRecord>> per_cohort;
    for (const auto& response : responses) {
        const auto cohort_it = cohorts.find(response.participant_id);
        if (cohort_it == cohorts.end()) {
            raise(ErrorCode::UnknownParticipantCohort, response.participant_id);
        }
        const PromptItem& item = item_for(response);
        ResponseRecord record;
        record.prompt_id = item.id;
        record.choice = item.slot_at_position(response.choice)->kind;
        record.weight = 1.0;
        record.extraction = Extraction::Replay;
        per_cohort["Total"].push_back(record);
        per_cohort[cohort_it->second].push_back(std::move(record));
    }

    ReportMetadata metadata;
    metadata.task = to_string(Task::Survey);
    metadata.domain = to_string(table.domain.domain);
    metadata.suite_hash = suite_hash(items);
    metadata.respondent_mode = "survey";
    metadata.ordering_policy = "fixed";
    metadata.pairing_policy = "decile";

    std::map<std::string, MetricReport> reports;
    for (const auto& [cohort, records] : per_cohort) {
        reports[cohort] = score_records(records, items, table, metadata);
    }
    return reports;
}

}  // namespace bias_lens
