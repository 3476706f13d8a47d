#pragma once

#include "ca/nlu.hpp"
#include "ca/placeholder.hpp"
#include "ca/project.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace ca::dialog {

enum class Speaker { user, bot };
enum class BoosterKind { autocorrect, out_of_scope, disambiguation, rephrase, closed_qa, summarize };
enum class GuardOutcome { passed, substituted_default, rejected };

std::string_view to_string(Speaker s);
std::string_view to_string(BoosterKind k);
std::string_view to_string(GuardOutcome g);
Speaker speaker_from_string(std::string_view s);
BoosterKind booster_kind_from_string(std::string_view s);
GuardOutcome guard_outcome_from_string(std::string_view s);

struct BoosterActivation {
    BoosterKind kind = BoosterKind::autocorrect;
    std::string input;
    std::string output;
    GuardOutcome guard_outcome = GuardOutcome::passed;
    std::string error;        // provider error text when the booster degraded
    std::string exchange_id;  // audit-log id of the last LLM call

    bool operator==(const BoosterActivation&) const = default;
};

struct Annotations {
    nlu::IntentPrediction prediction;
    std::vector<nlu::EntityMatch> entities;
    std::vector<BoosterActivation> boosters;
    std::vector<std::string> templates;  // template keys rendered for this turn

    bool operator==(const Annotations&) const = default;
};

struct TurnRecord {
    Speaker speaker = Speaker::user;
    std::string text;
    std::optional<Annotations> annotations;

    bool operator==(const TurnRecord&) const = default;
};

struct ContextFrame {
    std::string form;
    std::map<std::string, nlu::EntityMatch> filled;
    std::vector<std::string> pending;  // unfilled required slots in slot order

    bool operator==(const ContextFrame&) const = default;

    std::map<std::string, std::string> values() const;
};

struct PendingDisambiguation {
    std::vector<std::string> options;  // the two candidate intents, best first
    std::string text;
    std::vector<nlu::EntityMatch> entities;

    bool operator==(const PendingDisambiguation&) const = default;
};

struct DialogState {
    std::string session_id;
    std::vector<ContextFrame> frames;  // back() is the active frame
    int fallback_count = 0;
    std::vector<TurnRecord> transcript;
    std::string created_at;
    std::string updated_at;

    std::vector<ContextFrame> unconfirmed;  // completed forms awaiting the user's confirmation
    bool awaiting_confirmation = false;
    std::vector<ContextFrame> confirmed;
    std::optional<PendingDisambiguation> disambiguation;
    std::map<std::string, std::size_t> rotation;  // per-template round-robin counters
    std::string locale;
    std::string persona;
    bool handoff_suggested = false;
    bool handed_off = false;

    bool operator==(const DialogState&) const = default;

    const ContextFrame* active() const { return frames.empty() ? nullptr : &frames.back(); }
};

struct AskSlot {
    std::string form;
    std::string slot;
    bool operator==(const AskSlot&) const = default;
};
struct CompleteForm {
    std::string form;
    std::map<std::string, std::string> values;
    bool operator==(const CompleteForm&) const = default;
};
struct ResumeFrame {
    std::string form;
    bool operator==(const ResumeFrame&) const = default;
};
struct Respond {
    std::string key;
    placeholder::Bindings bindings;
    std::optional<std::size_t> variant_index;  // fixed index, e.g. the fallback ladder
    bool operator==(const Respond&) const = default;
};
struct InvokeBooster {
    BoosterKind kind = BoosterKind::out_of_scope;
    std::map<std::string, std::string> payload;
    bool operator==(const InvokeBooster&) const = default;
};
struct Handoff {
    std::string reason;
    bool operator==(const Handoff&) const = default;
};

using Action = std::variant<AskSlot, CompleteForm, ResumeFrame, Respond, InvokeBooster, Handoff>;

/// One-line description for logs and the debug block, e.g. "AskSlot(money_transfer.dest_account)".
std::string describe(const Action& action);

DialogState start_session();

/// Empty frame for the form with every required slot pending.
ContextFrame open_frame(const FormDef& form);

/// Fills pending slots by entity type in slot order, each entity used at most once.
/// Returns the number of slots filled.
std::size_t fill(const FormDef& form, ContextFrame& frame, const std::vector<nlu::EntityMatch>& entities);

/// Entity types the dialog is waiting for: the active frame's pending slots, or the
/// confirmation entity while a confirmation is outstanding.
std::vector<std::string> expected_entities(const ProjectConfig& config, const DialogState& state);

/// True when the entities answer what the dialog is waiting for.
bool answers_expectation(const ProjectConfig& config, const DialogState& state,
                         const std::vector<nlu::EntityMatch>& entities);

/// Next dialog policy step. Deterministic and total.
std::pair<DialogState, std::vector<Action>> step(const ProjectConfig& config, const DialogState& state,
                                                 const nlu::IntentPrediction& prediction,
                                                 const std::vector<nlu::EntityMatch>& entities,
                                                 std::string_view text);

/// Confirmation request listing every completed form awaiting confirmation, or
/// none when no frame is active and nothing awaits confirmation.
std::optional<Action> confirmation_gate(const ProjectConfig& config, const DialogState& state);

/// Actions that bring the user back to the open task after a digression.
std::vector<Action> reanchor(const ProjectConfig& config, const DialogState& state);

/// min(fallback_count, variant_count - 1).
std::size_t fallback_variant_index(const DialogState& state, std::size_t variant_count);

}  // namespace ca::dialog
