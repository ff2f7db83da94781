#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bias_lens/stats.hpp"
#include "bias_lens/suite.hpp"

namespace bias_lens {

enum class Extraction { TextParse, Logprob, Synthetic, Replay };

const char* to_string(Extraction e);
Extraction extraction_from_string(const std::string& s);

struct ResponseRecord {
    std::string prompt_id;
    ChoiceKind choice = ChoiceKind::INVALID;
    double weight = 1.0;
    std::string raw_text;  // verbatim reply; required for INVALID records
    Extraction extraction = Extraction::Replay;

    bool operator==(const ResponseRecord&) const = default;
};

/// Chat-completions endpoint settings. Sampling parameters default to the
/// evaluation protocol values (temperature 0, top_p 1, max_tokens 200).
struct EndpointConfig {
    std::string base_url;
    std::string model_name;
    std::string api_key;  // read from BIAS_LENS_API_KEY when empty
    double temperature = 0.0;
    double top_p = 1.0;
    int max_tokens = 200;
    int parallelism = 4;
    enum class Mode { TextParse, Logprob } mode = Mode::TextParse;
    int max_retries = 3;
    int retry_backoff_ms = 500;
    int timeout_s = 60;
};

/// Test-oracle respondent. `pick_probability[x]` is the probability of
/// choosing occupation x when the item's context matches the table's g1
/// orientation; under the opposite context the probability is 1-p.
struct SyntheticProfile {
    std::map<std::string, double> pick_probability;
    double refusal = 0.0;
    enum class Mode { Sampled, Expected } mode = Mode::Expected;
    std::uint64_t seed = 0;

    static SyntheticProfile aligned(const StatisticsTable& table);
    static SyntheticProfile anti_aligned(const StatisticsTable& table);

    static SyntheticProfile from_json_file(const std::string& path);
    std::string to_json() const;
};

/// Maps a raw reply to the chosen option: first standalone digit 1-3 wins,
/// then an exact case-insensitive label match; anything else is INVALID.
ChoiceKind parse_choice(const std::string& raw, const PromptItem& item);

/// One item against the synthetic respondent. Sampled mode yields a single
/// unit-weight record; expected mode yields up to three fractional-weight
/// records carrying the per-option marginals, which lets downstream metrics
/// be checked without sampling noise. The UNKNOWN record carries the
/// remainder after both occupation marginals and may be negative when the
/// marginals overlap; per item the weights always sum to exactly 1.
std::vector<ResponseRecord> synthetic_respond(const PromptItem& item,
                                              const SyntheticProfile& profile);

std::vector<ResponseRecord> run_synthetic(const std::vector<PromptItem>& suite,
                                          const SyntheticProfile& profile);

/// Single blocking request; retries transient transport failures with
/// exponential backoff before giving up.
ResponseRecord query_endpoint(const PromptItem& item, const EndpointConfig& cfg);

/// Queries every item not in skip_ids, holding up to cfg.parallelism requests
/// in flight. on_record runs under a lock, in completion order; the first
/// worker failure stops the batch and is rethrown after in-flight requests
/// drain, so partially written logs stay valid.
void run_endpoint(const std::vector<PromptItem>& suite, const EndpointConfig& cfg,
                  const std::set<std::string>& skip_ids,
                  const std::function<void(const ResponseRecord&)>& on_record);

/// Reads a response log and returns its records grouped in suite order.
std::vector<ResponseRecord> replay_log(const std::string& path,
                                       const std::vector<PromptItem>& suite);

/// Log JSONL round-trip.
std::string records_to_jsonl(const std::vector<ResponseRecord>& records);
std::vector<ResponseRecord> records_from_jsonl(const std::string& text);
void write_log(const std::vector<ResponseRecord>& records, const std::string& path);
std::vector<ResponseRecord> read_log(const std::string& path);
void append_log(const std::vector<ResponseRecord>& records, const std::string& path);

/// Prompt ids already present in a (possibly truncated) log; used to resume.
/// A trailing half-written line is ignored, anything else malformed throws.
std::vector<std::string> logged_prompt_ids(const std::string& path);

constexpr const char* kApiKeyEnvVar = "BIAS_LENS_API_KEY";

}  // namespace bias_lens
