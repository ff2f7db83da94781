#include "bias_lens/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "bias_lens/error.hpp"
#include "bias_lens/util.hpp"

namespace bias_lens {

namespace {

double parse_fraction(const std::string& text, size_t row, const std::string& column) {
    const std::string t = trim(text);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
        raise(ErrorCode::ParseError,
              "row " + std::to_string(row) + ", column " + column + ": not a number: '" + t + "'");
    }
    if (!(value >= 0.0 && value <= 1.0)) {
        raise(ErrorCode::RatioOutOfRange,
              "row " + std::to_string(row) + ", column " + column + ": " + t + " outside [0,1]");
    }
    return value;
}

double parse_count(const std::string& text, size_t row, const std::string& column) {
    const std::string t = trim(text);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size() || value < 0.0) {
        raise(ErrorCode::ParseError,
              "row " + std::to_string(row) + ", column " + column + ": not a count: '" + t + "'");
    }
    return value;
}

}  // namespace

const char* to_string(Domain domain) {
    return domain == Domain::Gender ? "gender" : "age";
}

Domain domain_from_string(const std::string& s) {
    if (s == "gender") return Domain::Gender;
    if (s == "age") return Domain::Age;
    raise(ErrorCode::ConfigError, "unknown domain: " + s);
}

DomainSpec DomainSpec::gender() {
    return DomainSpec{Domain::Gender, "female", "male", RatioField::Female};
}

DomainSpec DomainSpec::age() {
    return DomainSpec{Domain::Age, "youth", "elderly", RatioField::Youth};
}

DomainSpec DomainSpec::for_domain(Domain domain) {
    return domain == Domain::Gender ? gender() : age();
}

double StatisticsTable::oriented_ratio(const OccupationRecord& rec) const {
    return domain.ratio_field == DomainSpec::RatioField::Female ? rec.female_ratio
                                                                : rec.youth_ratio;
}

std::optional<double> StatisticsTable::oriented_ratio(const std::string& name) const {
    const OccupationRecord* rec = find(name);
    if (!rec) return std::nullopt;
    return oriented_ratio(*rec);
}

const OccupationRecord* StatisticsTable::find(const std::string& name) const {
    for (const auto& rec : records) {
        if (rec.name == name) return &rec;
    }
    return nullptr;
}

const OccupationRecord* StatisticsTable::find_case_insensitive(const std::string& name) const {
    const std::string needle = lowercase(name);
    for (const auto& rec : records) {
        if (lowercase(rec.name) == needle) return &rec;
    }
    return nullptr;
}

double weighted_ratio(const std::vector<JobTitleRow>& rows) {
    if (rows.empty()) raise(ErrorCode::EmptyTitleList, "no job-title rows");
    double weighted_sum = 0.0;
    double total = 0.0;
    for (const auto& row : rows) {
        weighted_sum += row.ratio * row.population;
        total += row.population;
    }
    if (total <= 0.0) raise(ErrorCode::ZeroPopulation, "total population is zero");
    return weighted_sum / total;
}

StatisticsTable parse_statistics_csv(const std::string& text, const DomainSpec& domain) {
    const auto lines = split_lines(text);
    if (lines.empty()) raise(ErrorCode::ParseError, "empty statistics CSV");
    if (trim(lines[0]) != "occupation,female_ratio,youth_ratio") {
        raise(ErrorCode::ParseError,
              "row 1: expected header 'occupation,female_ratio,youth_ratio', got '" + lines[0] + "'");
    }

    StatisticsTable table;
    table.domain = domain;
    std::set<std::string> seen;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 3) {
            raise(ErrorCode::ParseError,
                  "row " + std::to_string(i + 1) + ": expected 3 columns, got " +
                      std::to_string(fields.size()));
        }
        OccupationRecord rec;
        rec.name = trim(fields[0]);
        if (rec.name.empty()) {
            raise(ErrorCode::ParseError, "row " + std::to_string(i + 1) + ": empty occupation name");
        }
        rec.female_ratio = parse_fraction(fields[1], i + 1, "female_ratio");
        rec.youth_ratio = parse_fraction(fields[2], i + 1, "youth_ratio");
        if (!seen.insert(rec.name).second) {
            raise(ErrorCode::DuplicateOccupation, rec.name);
        }
        table.records.push_back(std::move(rec));
    }
    return table;
}

StatisticsTable load_statistics(const std::string& path, const DomainSpec& domain) {
    return parse_statistics_csv(read_text_file(path), domain);
}

std::string statistics_to_csv(const StatisticsTable& table) {
    std::string out = "occupation,female_ratio,youth_ratio\n";
    for (const auto& rec : table.records) {
        out += join_csv_line({rec.name, format_double(rec.female_ratio),
                              format_double(rec.youth_ratio)});
        out += '\n';
    }
    return out;
}

void emit_statistics(const StatisticsTable& table, const std::string& path) {
    write_text_file(path, statistics_to_csv(table));
}

StatisticsTable partition_groups(StatisticsTable table) {
    if (table.records.size() < 2) {
        raise(ErrorCode::TooFewOccupations,
              "need at least 2 occupations, have " + std::to_string(table.records.size()));
    }
    std::stable_sort(table.records.begin(), table.records.end(),
                     [&table](const OccupationRecord& a, const OccupationRecord& b) {
                         const double ra = table.oriented_ratio(a);
                         const double rb = table.oriented_ratio(b);
                         if (ra != rb) return ra > rb;
                         return a.name < b.name;
                     });
    table.g1_group.clear();
    table.g2_group.clear();
    const size_t g1_size = (table.records.size() + 1) / 2;
    for (size_t i = 0; i < table.records.size(); ++i) {
        if (i < g1_size) {
            table.g1_group.insert(table.records[i].name);
        } else {
            table.g2_group.insert(table.records[i].name);
        }
    }
    return table;
}

std::map<std::string, double> load_job_title_ratios(const std::string& path) {
    const auto lines = split_lines(read_text_file(path));
    if (lines.empty()) raise(ErrorCode::ParseError, "empty job-title CSV");
    if (trim(lines[0]) != "occupation,title,ratio,population") {
        raise(ErrorCode::ParseError,
              "row 1: expected header 'occupation,title,ratio,population', got '" + lines[0] + "'");
    }
    std::map<std::string, std::vector<JobTitleRow>> grouped;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const auto fields = split_csv_line(lines[i]);
        if (fields.size() != 4) {
            raise(ErrorCode::ParseError,
                  "row " + std::to_string(i + 1) + ": expected 4 columns, got " +
                      std::to_string(fields.size()));
        }
        JobTitleRow row;
        row.title = trim(fields[1]);
        row.ratio = parse_fraction(fields[2], i + 1, "ratio");
        row.population = parse_count(fields[3], i + 1, "population");
        grouped[trim(fields[0])].push_back(std::move(row));
    }
    std::map<std::string, double> out;
    for (const auto& [occupation, rows] : grouped) {
        out[occupation] = weighted_ratio(rows);
    }
    return out;
}

}  // namespace bias_lens
