#pragma once

#include "ca/boosters.hpp"
#include "ca/dialog.hpp"
#include "ca/llm.hpp"
#include "ca/nlu.hpp"
#include "ca/project.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ca::engine {

struct Debug {
    nlu::IntentPrediction prediction;
    std::vector<nlu::EntityMatch> entities;
    std::vector<dialog::ContextFrame> frames;  // stack after the turn, bottom first
    std::vector<dialog::BoosterActivation> boosters;
    std::vector<std::string> templates;
    std::vector<std::string> actions;
    int fallback_count = 0;
    bool awaiting_confirmation = false;
};

struct TurnResult {
    std::vector<std::string> replies;
    Debug debug;
};

/// One turn of the pipeline: NLU, dialog policy, boosters, NLG.
class Engine {
public:
    /// Trains the intent model. Throws Error(UntrainableIntent). A null gateway
    /// disables every booster.
    Engine(ProjectConfig config, std::shared_ptr<llm::Gateway> gateway);

    const ProjectConfig& config() const { return config_; }
    const nlu::IntentModel& model() const { return model_; }
    llm::Gateway* gateway() const { return gateway_.get(); }

    dialog::DialogState start_session(std::string locale = {}, std::string persona = {}) const;

    /// Throws Error(EmptyUtterance) for blank text and Error(Precondition) after handoff.
    TurnResult handle(dialog::DialogState& state, std::string_view text) const;

    /// Summarizes the transcript and marks the session handed off.
    /// Throws Error(Precondition) without a user turn or when already handed off,
    /// Error(FormatParseError) and provider errors otherwise.
    boosters::HandoffSummary handoff(dialog::DialogState& state,
                                     dialog::BoosterActivation* activation = nullptr) const;

    /// Option picked by the user's reply to a disambiguation question, if any.
    std::optional<std::string> resolve_choice(const dialog::PendingDisambiguation& pending,
                                              std::string_view reply) const;

private:
    ProjectConfig config_;
    nlu::IntentModel model_;
    std::shared_ptr<llm::Gateway> gateway_;
};

/// Gateway over the project's configured provider and prompt overrides.
std::shared_ptr<llm::Gateway> make_gateway(const ProjectConfig& config, const std::filesystem::path& project_dir,
                                           std::shared_ptr<llm::AuditLog> log);

}  // namespace ca::engine
