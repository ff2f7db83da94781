#pragma once

#include <string>

#include "bias_lens/metrics.hpp"

namespace bias_lens {

struct ComparisonRow {
    std::string label;
    double m_s_base = 0.0;
    double m_s_tuned = 0.0;
    double delta = 0.0;  // m_s_tuned - m_s_base
    enum class Side { AboveDiagonal, BelowDiagonal, OnDiagonal } side = Side::OnDiagonal;
};

const char* to_string(ComparisonRow::Side side);

/// Versioned report JSON; emission is byte-stable for identical reports.
std::string report_to_json(const MetricReport& report);
MetricReport report_from_json(const std::string& text);
void emit_report(const MetricReport& report, const std::string& path);
MetricReport load_report(const std::string& path);

/// Scatter CSV `occupation,statistic,score,fitted` plus a sidecar `<path>.lines`
/// CSV with the fitted line and the aligned reference line (slope 2, intercept -1).
void emit_regression_points(const MetricReport& report, const StatisticsTable& table,
                            const std::string& path);

/// Delta in statistical alignment between a base and a tuned run of the same
/// suite. Side classification uses a 1e-12 tolerance around zero.
ComparisonRow compare_reports(const MetricReport& base, const MetricReport& tuned,
                              const std::string& label);

std::string comparison_to_csv(const std::vector<ComparisonRow>& rows);
void emit_comparison(const std::vector<ComparisonRow>& rows, const std::string& path);

}  // namespace bias_lens
