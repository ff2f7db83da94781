#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace bias_lens {

/// One raw Bureau-style job title contributing to an occupation's ratio.
struct JobTitleRow {
    std::string title;
    double ratio = 0.0;       // fraction in [0,1]
    double population = 0.0;  // non-negative count
};

struct OccupationRecord {
    std::string name;
    double female_ratio = 0.0;
    double youth_ratio = 0.0;

    bool operator==(const OccupationRecord&) const = default;
};

enum class Domain { Gender, Age };

const char* to_string(Domain domain);
Domain domain_from_string(const std::string& s);

/// Binds a domain to its two groups and to the ratio column oriented
/// toward the first group.
struct DomainSpec {
    Domain domain = Domain::Gender;
    std::string g1_label;
    std::string g2_label;
    enum class RatioField { Female, Youth } ratio_field = RatioField::Female;

    static DomainSpec gender();  // g1=female, g2=male, female_ratio
    static DomainSpec age();     // g1=youth, g2=elderly, youth_ratio
    static DomainSpec for_domain(Domain domain);

    bool operator==(const DomainSpec&) const = default;
};

/// Occupation table plus the binary top/bottom grouping over the oriented
/// ratio. Groups are empty until partition_groups has run.
struct StatisticsTable {
    std::vector<OccupationRecord> records;
    DomainSpec domain;
    std::set<std::string> g1_group;
    std::set<std::string> g2_group;

    bool partitioned() const { return !g1_group.empty() || !g2_group.empty(); }

    /// Ratio oriented to the g1 group (female_ratio or youth_ratio).
    double oriented_ratio(const OccupationRecord& rec) const;
    std::optional<double> oriented_ratio(const std::string& name) const;

    const OccupationRecord* find(const std::string& name) const;
    /// Case-insensitive lookup, used when matching free text to table names.
    const OccupationRecord* find_case_insensitive(const std::string& name) const;

    bool in_g1(const std::string& name) const { return g1_group.count(name) > 0; }
    bool in_g2(const std::string& name) const { return g2_group.count(name) > 0; }

    bool operator==(const StatisticsTable&) const = default;
};

/// Population-weighted mean of per-title ratios.
double weighted_ratio(const std::vector<JobTitleRow>& rows);

/// Reads `occupation,female_ratio,youth_ratio` CSV into a table (groups unset).
StatisticsTable load_statistics(const std::string& path, const DomainSpec& domain);
StatisticsTable parse_statistics_csv(const std::string& text, const DomainSpec& domain);

/// Writes the table back out in the same CSV schema.
std::string statistics_to_csv(const StatisticsTable& table);
void emit_statistics(const StatisticsTable& table, const std::string& path);

/// Sorts by oriented ratio (descending, names ascending on ties) and assigns
/// the top half to g1, bottom half to g2. Odd counts leave the extra in g1.
StatisticsTable partition_groups(StatisticsTable table);

/// Reads `occupation,title,ratio,population` CSV and aggregates each
/// occupation's titles with weighted_ratio.
std::map<std::string, double> load_job_title_ratios(const std::string& path);

}  // namespace bias_lens
