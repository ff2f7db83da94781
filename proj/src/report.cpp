#include "bias_lens/report.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "bias_lens/error.hpp"
#include "bias_lens/util.hpp"

namespace bias_lens {

using nlohmann::json;

namespace {

constexpr double kSideTolerance = 1e-12;
constexpr double kAlignedSlope = 2.0;
constexpr double kAlignedIntercept = -1.0;

json optional_number(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

std::optional<double> number_or_null(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

}  // namespace

const char* to_string(ComparisonRow::Side side) {
    switch (side) {
        case ComparisonRow::Side::AboveDiagonal: return "above_diagonal";
        case ComparisonRow::Side::BelowDiagonal: return "below_diagonal";
        case ComparisonRow::Side::OnDiagonal: return "on_diagonal";
    }
    return "?";
}

std::string report_to_json(const MetricReport& report) {
    json scores = json::array();
    for (const auto& s : report.scores) {
        scores.push_back(json{{"occupation", s.occupation},
                              {"p_g1", optional_number(s.p_g1)},
                              {"p_g2", optional_number(s.p_g2)},
                              {"score", optional_number(s.score)}});
    }
    json metadata{
        {"task", report.metadata.task},
        {"domain", report.metadata.domain},
        {"suite_hash", report.metadata.suite_hash},
        {"respondent_mode", report.metadata.respondent_mode},
        {"ordering_policy", report.metadata.ordering_policy},
        {"pairing_policy", report.metadata.pairing_policy},
        {"weighted_regression", report.metadata.weighted_regression},
        {"seed", report.metadata.seed ? json(*report.metadata.seed) : json(nullptr)},
    };
    json j{
        {"schema", 1},
        {"m_b", report.m_b},
        {"m_r", report.m_r},
        {"m_s", report.m_s},
        {"fit",
         json{{"beta", report.fit.beta},
              {"beta0", report.fit.beta0},
              {"n_points", report.fit.n_points},
              {"r_squared", report.fit.r_squared}}},
        {"invalid_rate", report.invalid_rate},
        {"excluded", report.excluded},
        {"scores", std::move(scores)},
        {"metadata", std::move(metadata)},
    };
    return j.dump(2) + "\n";
}

MetricReport report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        raise(ErrorCode::ParseError, std::string("report: ") + e.what());
    }
    try {
        MetricReport report;
        report.m_b = j.at("m_b").get<double>();
        report.m_r = j.at("m_r").get<double>();
        report.m_s = j.at("m_s").get<double>();
        const auto& fit = j.at("fit");
        report.fit.beta = fit.at("beta").get<double>();
        report.fit.beta0 = fit.at("beta0").get<double>();
        report.fit.n_points = fit.at("n_points").get<std::size_t>();
        report.fit.r_squared = fit.at("r_squared").get<double>();
        report.invalid_rate = j.at("invalid_rate").get<double>();
        report.excluded = j.at("excluded").get<std::vector<std::string>>();
        for (const auto& s : j.at("scores")) {
            OccupationScore score;
            score.occupation = s.at("occupation").get<std::string>();
            score.p_g1 = number_or_null(s.at("p_g1"));
            score.p_g2 = number_or_null(s.at("p_g2"));
            score.score = number_or_null(s.at("score"));
            report.scores.push_back(std::move(score));
        }
        const auto& m = j.at("metadata");
        report.metadata.task = m.at("task").get<std::string>();
        report.metadata.domain = m.at("domain").get<std::string>();
        report.metadata.suite_hash = m.at("suite_hash").get<std::string>();
        report.metadata.respondent_mode = m.at("respondent_mode").get<std::string>();
        report.metadata.ordering_policy = m.at("ordering_policy").get<std::string>();
        report.metadata.pairing_policy = m.at("pairing_policy").get<std::string>();
        report.metadata.weighted_regression = m.at("weighted_regression").get<bool>();
        if (!m.at("seed").is_null()) report.metadata.seed = m.at("seed").get<std::uint64_t>();
        return report;
    } catch (const json::exception& e) {
        raise(ErrorCode::ParseError, std::string("report: ") + e.what());
    }
}

void emit_report(const MetricReport& report, const std::string& path) {
    write_text_file(path, report_to_json(report));
}

MetricReport load_report(const std::string& path) {
    return report_from_json(read_text_file(path));
}

void emit_regression_points(const MetricReport& report, const StatisticsTable& table,
                            const std::string& path) {
    std::string csv = "occupation,statistic,score,fitted\n";
    for (const auto& s : report.scores) {
        if (!s.included()) continue;
        const auto stat = table.oriented_ratio(s.occupation);
        if (!stat) continue;
        const double fitted = report.fit.beta * *stat + report.fit.beta0;
        csv += join_csv_line({s.occupation, format_fixed6(*stat), format_fixed6(*s.score),
                              format_fixed6(fitted)});
        csv += '\n';
    }
    write_text_file(path, csv);

    std::string lines = "name,slope,intercept\n";
    lines += join_csv_line({"fit", format_fixed6(report.fit.beta), format_fixed6(report.fit.beta0)});
    lines += '\n';
    lines += join_csv_line(
        {"aligned", format_fixed6(kAlignedSlope), format_fixed6(kAlignedIntercept)});
    lines += '\n';
    write_text_file(path + ".lines", lines);
}

ComparisonRow compare_reports(const MetricReport& base, const MetricReport& tuned,
                              const std::string& label) {
    if (!base.metadata.comparable_with(tuned.metadata)) {
        raise(ErrorCode::MetadataMismatch,
              "base (" + base.metadata.task + "/" + base.metadata.domain + "/" +
                  base.metadata.suite_hash + ") vs tuned (" + tuned.metadata.task + "/" +
                  tuned.metadata.domain + "/" + tuned.metadata.suite_hash + ")");
    }
    ComparisonRow row;
    row.label = label;
    row.m_s_base = base.m_s;
    row.m_s_tuned = tuned.m_s;
    row.delta = tuned.m_s - base.m_s;
    if (row.delta > kSideTolerance) {
        row.side = ComparisonRow::Side::AboveDiagonal;
    } else if (row.delta < -kSideTolerance) {
        row.side = ComparisonRow::Side::BelowDiagonal;
    } else {
        row.side = ComparisonRow::Side::OnDiagonal;
    }
    return row;
}

std::string comparison_to_csv(const std::vector<ComparisonRow>& rows) {
    std::string out = "label,m_s_base,m_s_tuned,delta,side\n";
    for (const auto& row : rows) {
        out += join_csv_line({row.label, format_fixed6(row.m_s_base),
                              format_fixed6(row.m_s_tuned), format_fixed6(row.delta),
                              to_string(row.side)});
        out += '\n';
    }
    return out;
}

void emit_comparison(const std::vector<ComparisonRow>& rows, const std::string& path) {
    write_text_file(path, comparison_to_csv(rows));
}

}  // namespace bias_lens
