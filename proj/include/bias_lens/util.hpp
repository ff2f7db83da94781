#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bias_lens {

/// FNV-1a 64-bit. Used for suite/policy fingerprints and for deriving
/// per-item RNG streams; not a cryptographic hash.
constexpr std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_hex(std::uint64_t value);

std::string lowercase(std::string_view s);
std::string trim(std::string_view s);

/// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double value);

/// Fixed 6-decimal formatting used by CSV emitters.
std::string format_fixed6(double value);

/// Minimal RFC-4180-style CSV: double-quoted fields may contain commas and
/// doubled quotes. Returns one field list per call; empty input -> one empty field.
std::vector<std::string> split_csv_line(const std::string& line);
std::string join_csv_line(const std::vector<std::string>& fields);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

/// Splits on '\n', dropping a trailing empty segment from a final newline.
std::vector<std::string> split_lines(std::string_view text);

}  // namespace bias_lens
