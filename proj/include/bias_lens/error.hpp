#pragma once

#include <stdexcept>
#include <string>

namespace bias_lens {

/// Stable error codes surfaced by every module. Tests and CLI exit paths
/// match on the code, not the message text.
enum class ErrorCode {
    // stats
    EmptyTitleList,
    ZeroPopulation,
    ParseError,
    RatioOutOfRange,
    DuplicateOccupation,
    TooFewOccupations,
    NotPartitioned,
    // suite
    MissingSpan,
    UnknownPronoun,
    UnknownOccupation,
    SameGroupOccupations,
    EmptyPairing,
    MixedDomainPersonas,
    EmptyDecile,
    // respondent
    TransportError,
    AuthError,
    LogprobsUnavailable,
    UnknownOccupationInProfile,
    UnknownPromptId,
    MalformedRecord,
    // metrics
    NoScores,
    NoValidResponses,
    TooFewPoints,
    ZeroVariance,
    UnknownQuestion,
    UnknownParticipantCohort,
    // report
    MetadataMismatch,
    IoError,
    // cli / config
    ConfigError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace bias_lens
