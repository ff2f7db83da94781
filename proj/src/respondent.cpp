#include "bias_lens/respondent.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "bias_lens/error.hpp"
#include "bias_lens/util.hpp"

namespace bias_lens {

using nlohmann::json;

const char* to_string(Extraction e) {
    switch (e) {
        case Extraction::TextParse: return "text_parse";
        case Extraction::Logprob: return "logprob";
        case Extraction::Synthetic: return "synthetic";
        case Extraction::Replay: return "replay";
    }
    return "?";
}

Extraction extraction_from_string(const std::string& s) {
    if (s == "text_parse") return Extraction::TextParse;
    if (s == "logprob") return Extraction::Logprob;
    if (s == "synthetic") return Extraction::Synthetic;
    if (s == "replay") return Extraction::Replay;
    raise(ErrorCode::ParseError, "unknown extraction: " + s);
}

SyntheticProfile SyntheticProfile::aligned(const StatisticsTable& table) {
    SyntheticProfile profile;
    for (const auto& rec : table.records) {
        profile.pick_probability[rec.name] = table.oriented_ratio(rec);
    }
    return profile;
}

SyntheticProfile SyntheticProfile::anti_aligned(const StatisticsTable& table) {
    SyntheticProfile profile;
    for (const auto& rec : table.records) {
        profile.pick_probability[rec.name] = 1.0 - table.oriented_ratio(rec);
    }
    return profile;
}

SyntheticProfile SyntheticProfile::from_json_file(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        raise(ErrorCode::ParseError, std::string("profile: ") + e.what());
    }
    SyntheticProfile profile;
    if (j.contains("refusal")) profile.refusal = j["refusal"].get<double>();
    if (profile.refusal < 0.0 || profile.refusal > 1.0) {
        raise(ErrorCode::ParseError, "profile: refusal outside [0,1]");
    }
    if (j.contains("p") && j["p"].is_object()) {
        for (const auto& [name, value] : j["p"].items()) {
            const double p = value.get<double>();
            if (p < 0.0 || p > 1.0) {
                raise(ErrorCode::ParseError, "profile: p for '" + name + "' outside [0,1]");
            }
            profile.pick_probability[name] = p;
        }
    }
    return profile;
}

std::string SyntheticProfile::to_json() const {
    json p = json::object();
    for (const auto& [name, value] : pick_probability) p[name] = value;
    return json{{"refusal", refusal}, {"p", std::move(p)}}.dump(2) + "\n";
}

ChoiceKind parse_choice(const std::string& raw, const PromptItem& item) {
    // First standalone digit 1-3 picks that position.
    for (size_t i = 0; i < raw.size(); ++i) {
        const char c = raw[i];
        if (c < '1' || c > '3') continue;
        const bool left_ok = i == 0 || !std::isalnum(static_cast<unsigned char>(raw[i - 1]));
        const bool right_ok =
            i + 1 == raw.size() || !std::isalnum(static_cast<unsigned char>(raw[i + 1]));
        if (left_ok && right_ok) {
            return item.slot_at_position(c - '0')->kind;
        }
    }
    // Fallback: the reply is exactly one option label.
    const std::string cleaned = lowercase(trim(raw));
    for (const auto& slot : item.options) {
        if (cleaned == lowercase(slot.label)) return slot.kind;
    }
    return ChoiceKind::INVALID;
}

namespace {

double profile_probability(const SyntheticProfile& profile, const std::string& occupation) {
    const auto it = profile.pick_probability.find(occupation);
    if (it == profile.pick_probability.end()) {
        raise(ErrorCode::UnknownOccupationInProfile, occupation);
    }
    return it->second;
}

// Uniform double in [0,1) from the top 53 bits; avoids distribution objects
// so sampled runs are reproducible across standard libraries.
double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<ResponseRecord> synthetic_respond(const PromptItem& item,
                                              const SyntheticProfile& profile) {
    const OptionSlot* g1_slot = item.slot_with_kind(ChoiceKind::G1_OCC);
    const OptionSlot* g2_slot = item.slot_with_kind(ChoiceKind::G2_OCC);
    if (!g1_slot || !g2_slot) {
        raise(ErrorCode::ConfigError, item.id + ": item lacks two occupation options");
    }
    if (item.context_group == ContextGroup::None) {
        raise(ErrorCode::ConfigError, item.id + ": synthetic respondent needs a context group");
    }
    const double p1 = profile_probability(profile, g1_slot->label);
    const double p2 = profile_probability(profile, g2_slot->label);
    const bool g1_context = item.context_group == ContextGroup::G1;
    const double pc1 = g1_context ? p1 : 1.0 - p1;
    const double pc2 = g1_context ? p2 : 1.0 - p2;
    const double r = profile.refusal;

    std::vector<ResponseRecord> records;
    if (profile.mode == SyntheticProfile::Mode::Expected) {
        // Marginal weights per option. The UNKNOWN remainder is derived from a
        // context-independent term so opposite-context residuals cancel
        // exactly; it goes negative when the two marginals overlap, which is
        // acceptable for this oracle because only aggregates are consumed.
        const double overlap = 1.0 - p1 - p2;
        const double residual = (1.0 - r) * overlap;
        const double w1 = (1.0 - r) * pc1;
        const double w2 = (1.0 - r) * pc2;
        const double wu = r + (g1_context ? residual : -residual);
        const auto emit = [&records, &item](ChoiceKind kind, double weight) {
            if (weight == 0.0) return;
            records.push_back(ResponseRecord{item.id, kind, weight, "", Extraction::Synthetic});
        };
        emit(ChoiceKind::G1_OCC, w1);
        emit(ChoiceKind::G2_OCC, w2);
        emit(ChoiceKind::UNKNOWN, wu);
        if (records.empty()) {
            // Degenerate profile (r=0, both marginals 0): abstain outright.
            records.push_back(ResponseRecord{item.id, ChoiceKind::UNKNOWN, 1.0, "",
                                             Extraction::Synthetic});
        }
    } else {
        std::mt19937_64 rng(fnv1a64(item.id, profile.seed ^ 0x9e3779b97f4a7c15ULL));
        ChoiceKind kind = ChoiceKind::UNKNOWN;
        if (next_uniform(rng) >= r) {
            const double mass = pc1 + pc2;
            if (mass > 0.0) {
                kind = next_uniform(rng) * mass < pc1 ? ChoiceKind::G1_OCC : ChoiceKind::G2_OCC;
            }
        }
        records.push_back(ResponseRecord{item.id, kind, 1.0, "", Extraction::Synthetic});
    }
    return records;
}

std::vector<ResponseRecord> run_synthetic(const std::vector<PromptItem>& suite,
                                          const SyntheticProfile& profile) {
    std::vector<ResponseRecord> records;
    records.reserve(suite.size());
    for (const auto& item : suite) {
        auto batch = synthetic_respond(item, profile);
        records.insert(records.end(), batch.begin(), batch.end());
    }
    return records;
}

namespace {

struct ParsedUrl {
    std::string scheme_host_port;
    std::string path_prefix;
};

ParsedUrl parse_base_url(const std::string& base_url) {
    const size_t scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        raise(ErrorCode::ConfigError, "base_url must include a scheme: " + base_url);
    }
    const size_t path_start = base_url.find('/', scheme_end + 3);
    ParsedUrl out;
    if (path_start == std::string::npos) {
        out.scheme_host_port = base_url;
    } else {
        out.scheme_host_port = base_url.substr(0, path_start);
        out.path_prefix = base_url.substr(path_start);
        while (!out.path_prefix.empty() && out.path_prefix.back() == '/') {
            out.path_prefix.pop_back();
        }
    }
    return out;
}

std::string resolve_api_key(const EndpointConfig& cfg) {
    if (!cfg.api_key.empty()) return cfg.api_key;
    const char* env = std::getenv(kApiKeyEnvVar);
    if (!env || !*env) {
        raise(ErrorCode::AuthError,
              std::string("no API key: set ") + kApiKeyEnvVar + " or pass --api-key");
    }
    return env;
}

json build_request_body(const PromptItem& item, const EndpointConfig& cfg) {
    json messages = json::array();
    if (!item.system_text.empty()) {
        messages.push_back({{"role", "system"}, {"content", item.system_text}});
    }
    messages.push_back({{"role", "user"}, {"content", item.user_text}});
    json body{
        {"model", cfg.model_name},
        {"messages", std::move(messages)},
        {"temperature", cfg.temperature},
        {"top_p", cfg.top_p},
        {"max_tokens", cfg.max_tokens},
    };
    if (cfg.mode == EndpointConfig::Mode::Logprob) {
        body["logprobs"] = true;
        body["top_logprobs"] = 20;
    }
    return body;
}

// Strips whitespace and option punctuation so tokens like "(2" or "3." still
// count as answer candidates.
std::string clean_token(const std::string& token) {
    std::string out;
    for (char c : token) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '(' || c == ')' || c == ':' || c == '.' || c == ',') continue;
        out += c;
    }
    return out;
}

ChoiceKind choice_from_logprobs(const json& message_logprobs, const PromptItem& item,
                                const std::string& content) {
    if (!message_logprobs.is_object() || !message_logprobs.contains("content") ||
        !message_logprobs["content"].is_array() || message_logprobs["content"].empty()) {
        raise(ErrorCode::LogprobsUnavailable, item.id + ": endpoint returned no logprobs");
    }
    for (const auto& position : message_logprobs["content"]) {
        if (!position.contains("top_logprobs") || !position["top_logprobs"].is_array()) continue;
        double best = -std::numeric_limits<double>::infinity();
        int best_position = 0;
        for (const auto& candidate : position["top_logprobs"]) {
            const std::string token = clean_token(candidate.value("token", ""));
            if (token != "1" && token != "2" && token != "3") continue;
            const double lp = candidate.value("logprob", -std::numeric_limits<double>::infinity());
            if (lp > best) {
                best = lp;
                best_position = token[0] - '0';
            }
        }
        if (best_position != 0) return item.slot_at_position(best_position)->kind;
    }
    // The endpoint produced logprobs but never a digit candidate.
    (void)content;
    return ChoiceKind::INVALID;
}

}  // namespace

ResponseRecord query_endpoint(const PromptItem& item, const EndpointConfig& cfg) {
    const ParsedUrl url = parse_base_url(cfg.base_url);
    const std::string api_key = resolve_api_key(cfg);
    const json body = build_request_body(item, cfg);

    httplib::Client client(url.scheme_host_port);
    client.set_connection_timeout(cfg.timeout_s, 0);
    client.set_read_timeout(cfg.timeout_s, 0);
    client.set_bearer_token_auth(api_key);

    std::string last_error;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(cfg.retry_backoff_ms * (1 << (attempt - 1))));
        }
        auto res = client.Post(url.path_prefix + "/chat/completions", body.dump(),
                               "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 401 || res->status == 403) {
            raise(ErrorCode::AuthError,
                  item.id + ": HTTP " + std::to_string(res->status) + " from endpoint");
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            raise(ErrorCode::TransportError,
                  item.id + ": HTTP " + std::to_string(res->status) + ": " + res->body);
        }

        json reply;
        try {
            reply = json::parse(res->body);
        } catch (const json::exception& e) {
            raise(ErrorCode::TransportError, item.id + ": bad response JSON: " + e.what());
        }
        if (!reply.contains("choices") || !reply["choices"].is_array() ||
            reply["choices"].empty()) {
            raise(ErrorCode::TransportError, item.id + ": response has no choices");
        }
        const auto& choice = reply["choices"][0];
        const std::string content =
            choice.contains("message") ? choice["message"].value("content", "") : "";

        ResponseRecord record;
        record.prompt_id = item.id;
        record.weight = 1.0;
        record.raw_text = content;
        if (cfg.mode == EndpointConfig::Mode::Logprob) {
            record.extraction = Extraction::Logprob;
            record.choice = choice_from_logprobs(choice.value("logprobs", json()), item, content);
        } else {
            record.extraction = Extraction::TextParse;
            record.choice = parse_choice(content, item);
        }
        return record;
    }
    raise(ErrorCode::TransportError,
          item.id + ": giving up after " + std::to_string(cfg.max_retries + 1) + " attempts (" +
              last_error + ")");
}

void run_endpoint(const std::vector<PromptItem>& suite, const EndpointConfig& cfg,
                  const std::set<std::string>& skip_ids,
                  const std::function<void(const ResponseRecord&)>& on_record) {
    std::vector<const PromptItem*> pending;
    for (const auto& item : suite) {
        if (skip_ids.find(item.id) == skip_ids.end()) pending.push_back(&item);
    }
    if (pending.empty()) return;
    // Fail fast on a missing key before any request goes out.
    resolve_api_key(cfg);

    const int workers = std::max(1, std::min<int>(cfg.parallelism, pending.size()));
    std::atomic<size_t> next{0};
    std::mutex sink_mutex;
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= pending.size()) return;
            {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (failure) return;
            }
            try {
                const ResponseRecord record = query_endpoint(*pending[i], cfg);
                std::lock_guard<std::mutex> lock(sink_mutex);
                on_record(record);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int i = 0; i < workers; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

json record_to_json(const ResponseRecord& record) {
    json j{
        {"prompt_id", record.prompt_id},
        {"choice", to_string(record.choice)},
        {"weight", record.weight},
        {"extraction", to_string(record.extraction)},
    };
    if (!record.raw_text.empty()) j["raw_text"] = record.raw_text;
    return j;
}

ResponseRecord record_from_json(const json& j, size_t line_no) {
    try {
        ResponseRecord record;
        record.prompt_id = j.at("prompt_id").get<std::string>();
        record.choice = choice_kind_from_string(j.at("choice").get<std::string>());
        record.weight = j.at("weight").get<double>();
        record.extraction = extraction_from_string(j.at("extraction").get<std::string>());
        if (j.contains("raw_text")) record.raw_text = j["raw_text"].get<std::string>();
        if (!std::isfinite(record.weight) || record.weight == 0.0) {
            raise(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line_no) + ": weight must be nonzero and finite");
        }
        if (record.choice == ChoiceKind::INVALID && record.raw_text.empty()) {
            raise(ErrorCode::MalformedRecord,
                  "line " + std::to_string(line_no) + ": INVALID record without raw_text");
        }
        return record;
    } catch (const json::exception& e) {
        raise(ErrorCode::MalformedRecord, "line " + std::to_string(line_no) + ": " + e.what());
    }
}

}  // namespace

std::string records_to_jsonl(const std::vector<ResponseRecord>& records) {
    std::string out;
    for (const auto& record : records) {
        out += record_to_json(record).dump();
        out += '\n';
    }
    return out;
}

std::vector<ResponseRecord> records_from_jsonl(const std::string& text) {
    std::vector<ResponseRecord> records;
    const auto lines = split_lines(text);
    for (size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        json j;
        try {
            j = json::parse(lines[i]);
        } catch (const json::exception& e) {
            raise(ErrorCode::MalformedRecord, "line " + std::to_string(i + 1) + ": " + e.what());
        }
        records.push_back(record_from_json(j, i + 1));
    }
    return records;
}

void write_log(const std::vector<ResponseRecord>& records, const std::string& path) {
    write_text_file(path, records_to_jsonl(records));
}

std::vector<ResponseRecord> read_log(const std::string& path) {
    return records_from_jsonl(read_text_file(path));
}

void append_log(const std::vector<ResponseRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) raise(ErrorCode::IoError, "cannot open for append: " + path);
    out << records_to_jsonl(records);
    if (!out) raise(ErrorCode::IoError, "append failed: " + path);
    out.flush();
}

std::vector<std::string> logged_prompt_ids(const std::string& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const Error&) {
        return {};
    }
    // Drop a trailing half-written line (no final newline) left by an abort.
    if (!text.empty() && text.back() != '\n') {
        const size_t last_nl = text.rfind('\n');
        text = last_nl == std::string::npos ? std::string() : text.substr(0, last_nl + 1);
    }
    std::vector<std::string> ids;
    for (const auto& record : records_from_jsonl(text)) {
        ids.push_back(record.prompt_id);
    }
    return ids;
}

std::vector<ResponseRecord> replay_log(const std::string& path,
                                       const std::vector<PromptItem>& suite) {
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < suite.size(); ++i) index[suite[i].id] = i;

    auto records = read_log(path);
    for (const auto& record : records) {
        if (index.find(record.prompt_id) == index.end()) {
            raise(ErrorCode::UnknownPromptId, record.prompt_id);
        }
    }
    std::stable_sort(records.begin(), records.end(),
                     [&index](const ResponseRecord& a, const ResponseRecord& b) {
                         return index.at(a.prompt_id) < index.at(b.prompt_id);
                     });
    return records;
}

}  // namespace bias_lens
