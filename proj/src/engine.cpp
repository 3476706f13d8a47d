#include "ca/engine.hpp"

#include "ca/error.hpp"
#include "ca/nlg.hpp"
#include "ca/text.hpp"
#include "ca/util.hpp"

#include <algorithm>

namespace ca::engine {

using dialog::Action;
using dialog::BoosterActivation;
using dialog::DialogState;

Engine::Engine(ProjectConfig config, std::shared_ptr<llm::Gateway> gateway)
    : config_(std::move(config)), model_(nlu::train(config_)), gateway_(std::move(gateway)) {}

DialogState Engine::start_session(std::string locale, std::string persona) const {
    DialogState s = dialog::start_session();
    s.locale = std::move(locale);
    s.persona = std::move(persona);
    return s;
}

std::optional<std::string> Engine::resolve_choice(const dialog::PendingDisambiguation& pending,
                                                  std::string_view reply) const {
    if (pending.options.size() < 2) return std::nullopt;
    const auto tokens = nlu::normalize(reply);
    auto has = [&](std::string_view t) { return std::find(tokens.begin(), tokens.end(), t) != tokens.end(); };

    const bool first = has("1") || has("first") || has("one");
    const bool second = has("2") || has("second") || has("two");
    if (first != second) return pending.options[first ? 0 : 1];

    std::vector<std::size_t> named;
    for (std::size_t i = 0; i < 2; ++i) {
        const auto label = nlu::normalize(boosters::intent_label(pending.options[i]));
        if (!label.empty() && std::all_of(label.begin(), label.end(), has)) named.push_back(i);
    }
    if (named.size() == 1) return pending.options[named.front()];

    if (tokens.empty()) return std::nullopt;
    nlu::ClassifyOptions options;
    options.top_k = 0;
    options.restrict_to = {pending.options[0], pending.options[1]};
    const auto p = nlu::classify(model_, reply, options);
    if (p.ranked.size() == 2 && p.ranked[0].score > 0.0 && p.ranked[0].score > p.ranked[1].score)
        return p.ranked[0].intent;
    return std::nullopt;
}

namespace {

struct Turn {
    const ProjectConfig& config;
    llm::Gateway* gateway;
    DialogState& state;
    std::string text;
    TurnResult result;

    std::vector<std::string>& replies() { return result.replies; }
    std::vector<BoosterActivation>& activations() { return result.debug.boosters; }

    std::vector<llm::Message> history() const {
        std::vector<llm::Message> out;
        for (const auto& t : state.transcript)
            out.push_back({t.speaker == dialog::Speaker::user ? "user" : "assistant", t.text});
        return out;
    }

    std::string styled(const std::string& key, std::string rendered, const placeholder::Bindings& bindings) {
        if (!gateway) return rendered;
        const ResponseTemplate* t = config.template_for(key);
        std::string directive = t ? t->rephrase_directive : std::string{};
        if (!state.persona.empty() && !nlg::has_persona_variant(config, key, state.locale, state.persona)) {
            auto it = config.persona.style_directives.find(state.persona);
            if (it != config.persona.style_directives.end()) directive = it->second;
        }
        if (directive.empty()) return rendered;
        std::vector<std::string> protect;
        for (const auto& [_, v] : bindings) protect.push_back(v);
        auto out = boosters::rephrase(*gateway, rendered, directive, protect);
        activations().push_back(out.activation);
        return out.text;
    }

    void say(const std::string& key, const placeholder::Bindings& bindings, std::optional<std::size_t> index) {
        nlg::RenderRequest r;
        r.key = key;
        r.bindings = bindings;
        r.locale = state.locale;
        r.persona = state.persona;
        if (index) {
            r.variant_index = index;
        } else {
            const std::size_t n = nlg::variant_count(config, key, state.locale, state.persona);
            r.variant_index = n > 1 ? state.rotation[key]++ % n : 0;
        }
        replies().push_back(styled(key, nlg::render(config, r), bindings));
        result.debug.templates.push_back(key);
    }

    void ask(const dialog::AskSlot& a) {
        std::map<std::string, std::string> filled;
        for (const auto& f : state.frames)
            if (f.form == a.form) filled = f.values();
        const FormDef* form = config.form(a.form);
        const SlotDef* slot = form ? form->slot(a.slot) : nullptr;
        if (!slot) throw Error(ErrorKind::UnknownTemplate, "no prompt for slot " + a.form + "." + a.slot);
        say(slot->prompt_template, filled, std::nullopt);
    }

    // Closed Q&A first, then a general-knowledge answer; the ladder when neither handles it.
    bool out_of_scope(std::size_t fallback_index) {
        if (gateway && config.boosters.closed_qa) {
            auto qa = boosters::closed_qa(*gateway, config.closed_qa, text);
            activations().push_back(qa.activation);
            if (qa.ok && qa.text != config.closed_qa.default_answer) {
                replies().push_back(qa.text);
                return true;
            }
        }
        if (gateway && config.boosters.out_of_scope) {
            auto oos = boosters::answer_out_of_scope(*gateway, config, text, history());
            activations().push_back(oos.outcome.activation);
            if (oos.outcome.ok) {
                replies().push_back(oos.outcome.text);
                return true;
            }
        }
        say(config.dialog.fallback_template, {}, fallback_index);
        return false;
    }

    void run(std::vector<Action> actions) {
        for (std::size_t i = 0; i < actions.size(); ++i) {
            const Action action = actions[i];
            result.debug.actions.push_back(dialog::describe(action));
            if (const auto* a = std::get_if<dialog::AskSlot>(&action)) {
                ask(*a);
            } else if (const auto* r = std::get_if<dialog::Respond>(&action)) {
                say(r->key, r->bindings, r->variant_index);
            } else if (const auto* b = std::get_if<dialog::InvokeBooster>(&action)) {
                if (b->kind == dialog::BoosterKind::disambiguation) {
                    disambiguate(*b);
                } else if (b->kind == dialog::BoosterKind::out_of_scope) {
                    const std::size_t index = std::stoul(b->payload.at("fallback_index"));
                    if (out_of_scope(index)) {
                        state.fallback_count = 0;
                        auto more = dialog::reanchor(config, state);
                        actions.insert(actions.begin() + static_cast<std::ptrdiff_t>(i) + 1, more.begin(), more.end());
                    }
                }
            } else if (std::holds_alternative<dialog::Handoff>(action)) {
                if (state.fallback_count >= config.thresholds.max_fallbacks_before_handoff) {
                    state.handoff_suggested = true;
                    say(config.dialog.handoff_template, {}, std::nullopt);
                }
            }
        }
    }

    void disambiguate(const dialog::InvokeBooster& b) {
        const auto& a = b.payload.at("option_a");
        const auto& c = b.payload.at("option_b");
        if (gateway && config.boosters.disambiguation) {
            auto out = boosters::disambiguate(*gateway, config, a, c, text, state.locale);
            activations().push_back(out.activation);
            replies().push_back(out.text);
            return;
        }
        say(config.dialog.disambiguation_template,
            {{"option_a", boosters::intent_label(a)}, {"option_b", boosters::intent_label(c)}}, std::nullopt);
    }
};

}  // namespace

TurnResult Engine::handle(DialogState& state, std::string_view input) const {
    if (state.handed_off) throw Error(ErrorKind::Precondition, "session was handed off to an agent");
    const std::string text = text::trim(input);
    if (text.empty()) throw Error(ErrorKind::EmptyUtterance, "message text is empty");

    Turn turn{config_, gateway_.get(), state, text, {}};
    const auto& th = config_.thresholds;

    nlu::ExtractOptions extract;
    extract.preferred = dialog::expected_entities(config_, state);
    std::vector<nlu::EntityMatch> entities = nlu::extract_entities(config_, text, extract);

    auto classify = [&](std::string_view t) {
        if (nlu::normalize(t).empty()) return nlu::IntentPrediction{};
        return nlu::classify(model_, t);
    };

    nlu::IntentPrediction prediction;
    bool resolved = false;
    if (state.disambiguation) {
        const auto pending = *state.disambiguation;
        state.disambiguation.reset();
        if (auto choice = resolve_choice(pending, text)) {
            prediction.intent = *choice;
            prediction.confidence = 1.0;
            prediction.ranked = {{*choice, 1.0}};
            std::vector<nlu::EntityMatch> merged = pending.entities;
            merged.insert(merged.end(), entities.begin(), entities.end());
            entities = std::move(merged);
            resolved = true;
        }
    }
    if (!resolved) {
        prediction = classify(text);
        if (gateway_ && config_.boosters.autocorrect && prediction.confidence < th.tau_intent &&
            !dialog::answers_expectation(config_, state, entities)) {
            auto corrected = boosters::autocorrect(*gateway_, text);
            if (corrected.ok) {
                const auto better = classify(corrected.text);
                if (better.confidence > prediction.confidence)
                    prediction = better;
                else
                    corrected.activation.guard_outcome = dialog::GuardOutcome::rejected;
            }
            turn.activations().push_back(corrected.activation);
        }
    }

    auto [next, actions] = dialog::step(config_, state, prediction, entities, text);
    state = std::move(next);
    turn.run(std::move(actions));

    dialog::Annotations notes;
    notes.prediction = prediction;
    notes.entities = entities;
    notes.boosters = turn.result.debug.boosters;
    notes.templates = turn.result.debug.templates;
    state.transcript.push_back({dialog::Speaker::user, text, std::move(notes)});
    for (const auto& reply : turn.result.replies) state.transcript.push_back({dialog::Speaker::bot, reply, std::nullopt});
    state.updated_at = utc_timestamp();

    auto& debug = turn.result.debug;
    debug.prediction = std::move(prediction);
    debug.entities = std::move(entities);
    debug.frames = state.frames;
    debug.fallback_count = state.fallback_count;
    debug.awaiting_confirmation = state.awaiting_confirmation;
    return std::move(turn.result);
}

boosters::HandoffSummary Engine::handoff(DialogState& state, BoosterActivation* activation) const {
    if (state.handed_off) throw Error(ErrorKind::Precondition, "session was already handed off");
    if (!gateway_) throw Error(ErrorKind::Precondition, "no LLM provider configured for summarization");
    auto summary = boosters::summarize(*gateway_, state.transcript, activation);
    state.handed_off = true;
    state.updated_at = utc_timestamp();
    return summary;
}

std::shared_ptr<llm::Gateway> make_gateway(const ProjectConfig& config, const std::filesystem::path& project_dir,
                                           std::shared_ptr<llm::AuditLog> log) {
    auto registry = llm::PromptRegistry::builtin();
    registry.apply(config.prompts);
    return std::make_shared<llm::Gateway>(std::move(registry), llm::make_provider(config.provider, project_dir),
                                          std::move(log));
}

}  // namespace ca::engine
