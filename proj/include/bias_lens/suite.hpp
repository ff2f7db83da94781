#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "bias_lens/stats.hpp"

namespace bias_lens {

enum class Task { Coreference, PersonaSelection, Survey };

const char* to_string(Task task);
Task task_from_string(const std::string& s);

enum class ChoiceKind { G1_OCC, G2_OCC, UNKNOWN, INVALID };

const char* to_string(ChoiceKind kind);
ChoiceKind choice_kind_from_string(const std::string& s);

enum class ContextGroup { G1, G2, None };

const char* to_string(ContextGroup group);
ContextGroup context_group_from_string(const std::string& s);

/// One ambiguous coreference sentence: two occupations, one pronoun, no
/// syntactic cue resolving the reference.
struct CorefSentence {
    std::string text;
    std::string occupation1;  // first mention in the sentence
    std::string occupation2;
    std::string pronoun;  // he, she, his, her, him

    bool operator==(const CorefSentence&) const = default;
};

struct Persona {
    Domain domain = Domain::Gender;
    ContextGroup group = ContextGroup::G1;
    enum class Scenario { Living, Working } scenario = Scenario::Living;
    std::string text;  // e.g. "Female living in the United States"

    bool operator==(const Persona&) const = default;
};

/// The eight personas (gender and age, living/working), in presentation order.
std::vector<Persona> builtin_personas();
/// The four personas of one domain.
std::vector<Persona> personas_for_domain(Domain domain);

/// The three persona-assigning system instructions; "{persona}" marks the slot.
const std::array<std::string, 3>& persona_instruction_templates();

struct OptionSlot {
    int position = 1;  // 1..3
    ChoiceKind kind = ChoiceKind::UNKNOWN;
    std::string label;

    bool operator==(const OptionSlot&) const = default;
};

struct PromptItem {
    std::string id;
    Task task = Task::PersonaSelection;
    Domain domain = Domain::Gender;
    ContextGroup context_group = ContextGroup::None;
    std::array<OptionSlot, 3> options;
    std::string template_id;
    std::string system_text;  // empty when the task has no system prompt
    std::string user_text;

    const OptionSlot* slot_with_kind(ChoiceKind kind) const;
    const OptionSlot* slot_at_position(int position) const;

    bool operator==(const PromptItem&) const = default;
};

enum class OrderingPolicy {
    Rotations,     // 3 cyclic rotations of the base option order
    Permutations,  // all 6 orders
};

const char* to_string(OrderingPolicy p);
OrderingPolicy ordering_policy_from_string(const std::string& s);

enum class PairingPolicy {
    Matched,  // i-th ranked of g1 with i-th ranked of g2
    Cross,    // every g1 x g2 combination
};

const char* to_string(PairingPolicy p);
PairingPolicy pairing_policy_from_string(const std::string& s);

/// Reads WinoBias-style input: JSONL records or bracket-annotated lines.
std::vector<CorefSentence> import_winobias(const std::string& path);
std::vector<CorefSentence> parse_winobias(const std::string& text);

std::vector<PromptItem> build_coref_prompts(const std::vector<CorefSentence>& sentences,
                                            const StatisticsTable& table,
                                            OrderingPolicy orderings);

std::vector<PromptItem> build_persona_prompts(const StatisticsTable& table,
                                              const std::vector<Persona>& personas,
                                              PairingPolicy pairing,
                                              OrderingPolicy orderings);

/// The occupation pairs build_persona_prompts will use, in generation order.
std::vector<std::pair<std::string, std::string>> occupation_pairs(const StatisticsTable& table,
                                                                  PairingPolicy pairing);

struct SurveyDesign {
    std::vector<PromptItem> form_a;  // male phrasing
    std::vector<PromptItem> form_b;  // female phrasing

    std::vector<PromptItem> all_items() const;
};

/// Ten decile-drawn occupation pairs rendered as two survey forms that
/// differ only in the gender word.
SurveyDesign build_survey_design(const StatisticsTable& table);

/// JSONL (schema 1) round-trip for suites.
std::string suite_to_jsonl(const std::vector<PromptItem>& items);
std::vector<PromptItem> suite_from_jsonl(const std::string& text);
void write_suite(const std::vector<PromptItem>& items, const std::string& path);
std::vector<PromptItem> read_suite(const std::string& path);

/// Fingerprint of the serialized suite; embedded in reports for comparability.
std::string suite_hash(const std::vector<PromptItem>& items);

}  // namespace bias_lens
