#pragma once

#include "ca/dialog.hpp"
#include "ca/llm.hpp"
#include "ca/project.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Runtime LLM interventions. Every function records exactly one BoosterActivation
// and degrades to pipeline-only behaviour on provider errors.
namespace ca::boosters {

using dialog::BoosterActivation;

struct Outcome {
    std::string text;
    BoosterActivation activation;
    bool ok = false;  // false when the provider failed and `text` is the fallback
};

/// Corrected utterance, or the input unchanged (ok = false) on provider error.
Outcome autocorrect(llm::Gateway& gateway, std::string_view utterance);

/// NFC, trim and collapse internal whitespace. Case is preserved.
std::string normalize_answer(std::string_view s);

/// Guard: the normalized output must equal exactly one allowed answer, otherwise
/// the default answer. The result is always in answers ∪ {default_answer}.
std::string guard_closed_answer(const ClosedQAPolicy& policy, std::string_view output,
                                dialog::GuardOutcome* outcome = nullptr);

/// Never throws for provider errors; always returns an element of answers ∪ {default_answer}.
Outcome closed_qa(llm::Gateway& gateway, const ClosedQAPolicy& policy, std::string_view question);

struct OutOfScope {
    Outcome outcome;
    bool refused = false;  // the model declined; text is the closed-QA default answer
};

/// General-knowledge answer. ok = false on provider error.
OutOfScope answer_out_of_scope(llm::Gateway& gateway, const ProjectConfig& config, std::string_view question,
                               const std::vector<llm::Message>& history = {});

/// "transfer_money" -> "transfer money".
std::string intent_label(std::string_view intent);

/// Clarification question naming both options; falls back to the project's
/// disambiguation template when the provider fails or the question omits an option.
Outcome disambiguate(llm::Gateway& gateway, const ProjectConfig& config, std::string_view option_a,
                     std::string_view option_b, std::string_view utterance, std::string_view locale = {});

/// Rephrasing guarded so every protected value survives verbatim; otherwise the input.
Outcome rephrase(llm::Gateway& gateway, std::string_view response, std::string_view directive,
                 const std::vector<std::string>& protected_values);

struct HandoffSummary {
    std::string action_required;
    std::string summary;

    bool operator==(const HandoffSummary&) const = default;
};

/// Text after "Agent Action Required:" up to "Summary:" and the rest; nullopt when a label is missing or empty.
std::optional<HandoffSummary> parse_summary(std::string_view text);

/// "Chatbot: ..." / "User: ..." lines.
std::string format_transcript(const std::vector<dialog::TurnRecord>& transcript);

/// One retry with a stricter prompt when a label is missing. Throws Error(Precondition)
/// without a user turn and Error(FormatParseError) when the retry fails too; provider
/// errors propagate. `activation` is filled on every path.
HandoffSummary summarize(llm::Gateway& gateway, const std::vector<dialog::TurnRecord>& transcript,
                         BoosterActivation* activation = nullptr);

}  // namespace ca::boosters
