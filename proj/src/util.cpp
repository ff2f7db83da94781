#include "bias_lens/util.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bias_lens/error.hpp"

namespace bias_lens {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyTitleList: return "EmptyTitleList";
        case ErrorCode::ZeroPopulation: return "ZeroPopulation";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::RatioOutOfRange: return "RatioOutOfRange";
        case ErrorCode::DuplicateOccupation: return "DuplicateOccupation";
        case ErrorCode::TooFewOccupations: return "TooFewOccupations";
        case ErrorCode::NotPartitioned: return "NotPartitioned";
        case ErrorCode::MissingSpan: return "MissingSpan";
        case ErrorCode::UnknownPronoun: return "UnknownPronoun";
        case ErrorCode::UnknownOccupation: return "UnknownOccupation";
        case ErrorCode::SameGroupOccupations: return "SameGroupOccupations";
        case ErrorCode::EmptyPairing: return "EmptyPairing";
        case ErrorCode::MixedDomainPersonas: return "MixedDomainPersonas";
        case ErrorCode::EmptyDecile: return "EmptyDecile";
        case ErrorCode::TransportError: return "TransportError";
        case ErrorCode::AuthError: return "AuthError";
        case ErrorCode::LogprobsUnavailable: return "LogprobsUnavailable";
        case ErrorCode::UnknownOccupationInProfile: return "UnknownOccupationInProfile";
        case ErrorCode::UnknownPromptId: return "UnknownPromptId";
        case ErrorCode::MalformedRecord: return "MalformedRecord";
        case ErrorCode::NoScores: return "NoScores";
        case ErrorCode::NoValidResponses: return "NoValidResponses";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::UnknownQuestion: return "UnknownQuestion";
        case ErrorCode::UnknownParticipantCohort: return "UnknownParticipantCohort";
        case ErrorCode::MetadataMismatch: return "MetadataMismatch";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "UnknownError";
}

std::string to_hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return std::string(buf);
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    size_t b = 0;
    size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) return "0";
    return std::string(buf, ptr);
}

std::string format_fixed6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    std::string out(buf);
    if (out == "-0.000000") out = "0.000000";
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

std::string join_csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\n") != std::string::npos) {
            out += '"';
            for (char c : f) {
                if (c == '"') out += '"';
                out += c;
            }
            out += '"';
        } else {
            out += f;
        }
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoError, "cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::IoError, "cannot open for writing: " + path);
    out << contents;
    if (!out) raise(ErrorCode::IoError, "write failed: " + path);
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    size_t start = 0;
    while (start <= text.size()) {
        size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            if (start < text.size()) lines.emplace_back(text.substr(start));
            break;
        }
        std::string line(text.substr(start, nl - start));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        start = nl + 1;
    }
    return lines;
}

}  // namespace bias_lens
