#include "ca/dialog.hpp"

#include "ca/error.hpp"
#include "ca/nlg.hpp"
#include "ca/util.hpp"

#include <algorithm>

namespace ca::dialog {

std::string_view to_string(Speaker s) { return s == Speaker::user ? "user" : "bot"; }

std::string_view to_string(BoosterKind k) {
    switch (k) {
        case BoosterKind::autocorrect: return "autocorrect";
        case BoosterKind::out_of_scope: return "out_of_scope";
        case BoosterKind::disambiguation: return "disambiguation";
        case BoosterKind::rephrase: return "rephrase";
        case BoosterKind::closed_qa: return "closed_qa";
        case BoosterKind::summarize: return "summarize";
    }
    return "?";
}

std::string_view to_string(GuardOutcome g) {
    switch (g) {
        case GuardOutcome::passed: return "passed";
        case GuardOutcome::substituted_default: return "substituted_default";
        case GuardOutcome::rejected: return "rejected";
    }
    return "?";
}

Speaker speaker_from_string(std::string_view s) {
    if (s == "user") return Speaker::user;
    if (s == "bot") return Speaker::bot;
    throw Error(ErrorKind::ParseError, "unknown speaker: " + std::string(s));
}

BoosterKind booster_kind_from_string(std::string_view s) {
    for (auto k : {BoosterKind::autocorrect, BoosterKind::out_of_scope, BoosterKind::disambiguation,
                   BoosterKind::rephrase, BoosterKind::closed_qa, BoosterKind::summarize})
        if (to_string(k) == s) return k;
    throw Error(ErrorKind::ParseError, "unknown booster kind: " + std::string(s));
}

GuardOutcome guard_outcome_from_string(std::string_view s) {
    for (auto g : {GuardOutcome::passed, GuardOutcome::substituted_default, GuardOutcome::rejected})
        if (to_string(g) == s) return g;
    throw Error(ErrorKind::ParseError, "unknown guard outcome: " + std::string(s));
}

std::map<std::string, std::string> ContextFrame::values() const {
    std::map<std::string, std::string> out;
    for (const auto& [slot, match] : filled) out[slot] = match.value;
    return out;
}

std::string describe(const Action& action) {
    struct {
        std::string operator()(const AskSlot& a) const { return "AskSlot(" + a.form + "." + a.slot + ")"; }
        std::string operator()(const CompleteForm& a) const { return "CompleteForm(" + a.form + ")"; }
        std::string operator()(const ResumeFrame& a) const { return "ResumeFrame(" + a.form + ")"; }
        std::string operator()(const Respond& a) const { return "Respond(" + a.key + ")"; }
        std::string operator()(const InvokeBooster& a) const {
            return "InvokeBooster(" + std::string(to_string(a.kind)) + ")";
        }
        std::string operator()(const Handoff& a) const { return "Handoff(" + a.reason + ")"; }
    } visitor;
    return std::visit(visitor, action);
}

DialogState start_session() {
    DialogState s;
    s.session_id = random_hex(32);
    s.created_at = utc_timestamp();
    s.updated_at = s.created_at;
    return s;
}

ContextFrame open_frame(const FormDef& form) {
    ContextFrame f;
    f.form = form.name;
    f.pending = form.required_slots();
    return f;
}

std::size_t fill(const FormDef& form, ContextFrame& frame, const std::vector<nlu::EntityMatch>& entities) {
    std::vector<bool> used(entities.size(), false);
    std::size_t count = 0;
    for (const auto& slot : form.slots) {
        auto it = std::find(frame.pending.begin(), frame.pending.end(), slot.name);
        if (it == frame.pending.end()) continue;
        for (std::size_t i = 0; i < entities.size(); ++i) {
            if (used[i] || entities[i].entity != slot.entity_type) continue;
            used[i] = true;
            frame.filled[slot.name] = entities[i];
            frame.pending.erase(it);
            ++count;
            break;
        }
    }
    return count;
}

std::vector<std::string> expected_entities(const ProjectConfig& config, const DialogState& state) {
    std::vector<std::string> out;
    if (const auto* frame = state.active()) {
        if (const FormDef* form = config.form(frame->form))
            for (const auto& slot : frame->pending)
                if (const SlotDef* s = form->slot(slot)) out.push_back(s->entity_type);
    } else if (state.awaiting_confirmation && !config.dialog.confirm_entity.empty()) {
        out.push_back(config.dialog.confirm_entity);
    }
    return out;
}

bool answers_expectation(const ProjectConfig& config, const DialogState& state,
                         const std::vector<nlu::EntityMatch>& entities) {
    const auto expected = expected_entities(config, state);
    return std::any_of(entities.begin(), entities.end(), [&](const nlu::EntityMatch& m) {
        return std::find(expected.begin(), expected.end(), m.entity) != expected.end();
    });
}

std::size_t fallback_variant_index(const DialogState& state, std::size_t variant_count) {
    if (variant_count == 0) return 0;
    return std::min(static_cast<std::size_t>(std::max(state.fallback_count, 0)), variant_count - 1);
}

namespace {

std::string join_summaries(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += (i + 1 == parts.size()) ? " and " : ", ";
        out += parts[i];
    }
    return out;
}

Action confirmation_request(const ProjectConfig& config, const DialogState& state) {
    std::vector<std::string> summaries;
    for (const auto& frame : state.unconfirmed) {
        const FormDef* form = config.form(frame.form);
        if (!form || form->confirmation_template.empty()) continue;
        nlg::RenderRequest request;
        request.key = form->confirmation_template;
        request.bindings = frame.values();
        request.locale = state.locale;
        summaries.push_back(nlg::render(config, request));
    }
    return Respond{config.dialog.confirm_request_template, {{"details", join_summaries(summaries)}}, {}};
}

void ask_next(const DialogState& s, std::vector<Action>& actions) {
    const auto* top = s.active();
    if (top && !top->pending.empty()) actions.push_back(AskSlot{top->form, top->pending.front()});
}

// Pops the finished top frame; resumes the frame beneath it or requests confirmation.
void complete_top(const ProjectConfig& config, DialogState& s, std::vector<Action>& actions) {
    ContextFrame frame = std::move(s.frames.back());
    s.frames.pop_back();
    const FormDef* form = config.form(frame.form);
    actions.push_back(CompleteForm{frame.form, frame.values()});
    if (form) {
        actions.push_back(Respond{form->completion_template, frame.values(), {}});
        if (form->confirm_required) s.unconfirmed.push_back(std::move(frame));
    }
    if (const auto* top = s.active()) {
        const FormDef* resumed = config.form(top->form);
        actions.push_back(ResumeFrame{top->form});
        if (resumed) actions.push_back(Respond{resumed->resume_template, top->values(), {}});
        ask_next(s, actions);
    } else if (!s.unconfirmed.empty()) {
        s.awaiting_confirmation = true;
        actions.push_back(confirmation_request(config, s));
    }
}

void resume_after_pop(const ProjectConfig& config, DialogState& s, std::vector<Action>& actions) {
    if (const auto* top = s.active()) {
        const FormDef* resumed = config.form(top->form);
        actions.push_back(ResumeFrame{top->form});
        if (resumed) actions.push_back(Respond{resumed->resume_template, top->values(), {}});
        ask_next(s, actions);
    } else if (s.awaiting_confirmation) {
        actions.push_back(confirmation_request(config, s));
    }
}

bool on_stack(const DialogState& s, std::string_view form) {
    return std::any_of(s.frames.begin(), s.frames.end(), [&](const ContextFrame& f) { return f.form == form; });
}

}  // namespace

std::optional<Action> confirmation_gate(const ProjectConfig& config, const DialogState& state) {
    if (!state.frames.empty() || state.unconfirmed.empty()) return std::nullopt;
    return confirmation_request(config, state);
}

std::vector<Action> reanchor(const ProjectConfig& config, const DialogState& state) {
    std::vector<Action> actions;
    if (state.active()) {
        ask_next(state, actions);
    } else if (state.awaiting_confirmation) {
        if (auto gate = confirmation_gate(config, state)) actions.push_back(*gate);
    }
    return actions;
}

std::pair<DialogState, std::vector<Action>> step(const ProjectConfig& config, const DialogState& state,
                                                 const nlu::IntentPrediction& prediction,
                                                 const std::vector<nlu::EntityMatch>& entities,
                                                 std::string_view text) {
    DialogState s = state;
    std::vector<Action> actions;
    const auto& th = config.thresholds;
    const double confidence = prediction.confidence;
    const bool in_band = prediction.intent && confidence >= th.tau_oos && confidence < th.tau_intent;
    const bool ambiguous = in_band && prediction.ranked.size() >= 2 && prediction.ranked[1].score >= th.tau_oos;
    const bool accepted = prediction.intent && (confidence >= th.tau_intent || (in_band && !ambiguous));
    const std::string intent = accepted ? *prediction.intent : std::string{};
    const FormDef* form = accepted ? config.form_for_intent(intent) : nullptr;

    auto handled = [&]() {
        s.fallback_count = 0;
        return std::make_pair(std::move(s), std::move(actions));
    };

    // Pending confirmation answered with the confirmation entity.
    if (s.frames.empty() && s.awaiting_confirmation && !config.dialog.confirm_entity.empty()) {
        std::optional<std::string> answer;
        for (const auto& m : entities)
            if (m.entity == config.dialog.confirm_entity) answer = m.value;
        if (answer == config.dialog.affirm_value) {
            for (auto& f : s.unconfirmed) s.confirmed.push_back(std::move(f));
            s.unconfirmed.clear();
            s.awaiting_confirmation = false;
            actions.push_back(Respond{config.dialog.confirm_accepted_template, {}, {}});
            return handled();
        }
        if (answer == config.dialog.deny_value) {
            auto reopened = std::move(s.unconfirmed);
            s.unconfirmed.clear();
            s.awaiting_confirmation = false;
            const auto depth = static_cast<std::size_t>(std::max(config.dialog.max_stack_depth, 1));
            const std::size_t first = reopened.size() > depth ? reopened.size() - depth : 0;
            for (std::size_t i = first; i < reopened.size(); ++i)
                if (const FormDef* f = config.form(reopened[i].form)) s.frames.push_back(open_frame(*f));
            actions.push_back(Respond{config.dialog.confirm_rejected_template, {}, {}});
            ask_next(s, actions);
            return handled();
        }
    }

    // Explicit abort pops the active frame only.
    if (accepted && !config.dialog.abort_intent.empty() && intent == config.dialog.abort_intent && s.active()) {
        s.frames.pop_back();
        actions.push_back(Respond{config.dialog.frame_aborted_template, {}, {}});
        resume_after_pop(config, s, actions);
        return handled();
    }

    // (a) context switch to another form.
    if (form && (!s.active() || s.active()->form != form->name)) {
        if (on_stack(s, form->name)) {
            // Already suspended below: no second frame; keep filling the active one.
            const FormDef* top = config.form(s.active()->form);
            if (top) fill(*top, s.frames.back(), entities);
            if (s.frames.back().pending.empty())
                complete_top(config, s, actions);
            else
                ask_next(s, actions);
            return handled();
        }
        if (static_cast<int>(s.frames.size()) >= config.dialog.max_stack_depth) {
            actions.push_back(Respond{config.dialog.stack_full_template, {}, {}});
            ask_next(s, actions);
            return handled();
        }
        s.frames.push_back(open_frame(*form));
        fill(*form, s.frames.back(), entities);
        if (s.frames.back().pending.empty())
            complete_top(config, s, actions);
        else
            ask_next(s, actions);
        return handled();
    }

    // (b) slot filling in the active frame.
    if (s.active()) {
        const FormDef* top = config.form(s.active()->form);
        const std::size_t filled = top ? fill(*top, s.frames.back(), entities) : 0;
        const bool restated = form && top && form->name == top->name;
        if (filled > 0 || restated) {
            if (s.frames.back().pending.empty())
                complete_top(config, s, actions);
            else
                ask_next(s, actions);
            return handled();
        }
    }

    // (c) non-form intent answered from its template, then back to the open task.
    if (accepted && !form) {
        const IntentDef* def = config.intent(intent);
        if (def && !def->response_template.empty()) {
            actions.push_back(Respond{def->response_template, {}, {}});
            for (auto& a : reanchor(config, s)) actions.push_back(std::move(a));
            return handled();
        }
    }

    // (d) two plausible readings.
    if (ambiguous) {
        PendingDisambiguation pending;
        pending.options = {prediction.ranked[0].intent, prediction.ranked[1].intent};
        pending.text = std::string(text);
        pending.entities = entities;
        s.disambiguation = pending;
        actions.push_back(InvokeBooster{BoosterKind::disambiguation,
                                        {{"option_a", pending.options[0]},
                                         {"option_b", pending.options[1]},
                                         {"utterance", std::string(text)}}});
        return {std::move(s), std::move(actions)};
    }

    // (e) out of scope.
    const ResponseTemplate* ladder = config.template_for(config.dialog.fallback_template);
    const std::size_t variants =
        ladder ? nlg::variant_count(config, config.dialog.fallback_template, s.locale, s.persona) : 0;
    const std::size_t index = fallback_variant_index(state, variants);
    s.fallback_count = state.fallback_count + 1;
    actions.push_back(InvokeBooster{BoosterKind::out_of_scope,
                                    {{"utterance", std::string(text)}, {"fallback_index", std::to_string(index)}}});
    if (s.fallback_count >= config.thresholds.max_fallbacks_before_handoff)
        actions.push_back(Handoff{"repeated breakdown"});
    return {std::move(s), std::move(actions)};
}

}  // namespace ca::dialog
