#include "ca/boosters.hpp"

#include "ca/error.hpp"
#include "ca/nlg.hpp"
#include "ca/text.hpp"

#include <algorithm>

namespace ca::boosters {

using dialog::BoosterKind;
using dialog::GuardOutcome;

namespace {

BoosterActivation activation(BoosterKind kind, std::string_view input) {
    BoosterActivation a;
    a.kind = kind;
    a.input = std::string(input);
    return a;
}

}  // namespace

Outcome autocorrect(llm::Gateway& gateway, std::string_view utterance) {
    Outcome out{std::string(utterance), activation(BoosterKind::autocorrect, utterance), false};
    try {
        auto c = gateway.complete("autocorrect", {{"utterance", std::string(utterance)}});
        out.activation.exchange_id = c.exchange_id;
        out.activation.output = c.text;
        const std::string corrected = text::trim(c.text);
        if (corrected.empty()) {
            out.activation.guard_outcome = GuardOutcome::rejected;
            return out;
        }
        out.text = corrected;
        out.ok = true;
    } catch (const Error& e) {
        if (!e.is_provider_error()) throw;
        out.activation.error = e.what();
        out.activation.guard_outcome = GuardOutcome::rejected;
    }
    return out;
}

std::string normalize_answer(std::string_view s) { return text::squash_whitespace(s); }

std::string guard_closed_answer(const ClosedQAPolicy& policy, std::string_view output, GuardOutcome* outcome) {
    const std::string got = normalize_answer(output);
    const std::string* match = nullptr;
    std::size_t hits = 0;
    for (const auto& a : policy.answers) {
        if (normalize_answer(a) == got) {
            match = &a;
            ++hits;
        }
    }
    if (hits == 1) {
        if (outcome) *outcome = GuardOutcome::passed;
        return *match;
    }
    if (outcome)
        *outcome = got == normalize_answer(policy.default_answer) ? GuardOutcome::passed
                                                                 : GuardOutcome::substituted_default;
    return policy.default_answer;
}

Outcome closed_qa(llm::Gateway& gateway, const ClosedQAPolicy& policy, std::string_view question) {
    Outcome out{policy.default_answer, activation(BoosterKind::closed_qa, question), false};
    std::string answers;
    for (std::size_t i = 0; i < policy.answers.size(); ++i)
        answers += std::to_string(i + 1) + ". " + policy.answers[i] + "\n";
    try {
        auto c = gateway.complete(policy.prompt_template.empty() ? "closed_qa" : policy.prompt_template,
                                  {{"answers", text::trim_right(answers)},
                                   {"default_answer", policy.default_answer},
                                   {"question", std::string(question)}});
        out.activation.exchange_id = c.exchange_id;
        out.text = guard_closed_answer(policy, c.text, &out.activation.guard_outcome);
        out.ok = true;
    } catch (const Error& e) {
        if (!e.is_provider_error()) throw;
        out.activation.error = e.what();
        out.activation.guard_outcome = GuardOutcome::substituted_default;
    }
    out.activation.output = out.text;
    return out;
}

OutOfScope answer_out_of_scope(llm::Gateway& gateway, const ProjectConfig& config, std::string_view question,
                               const std::vector<llm::Message>& history) {
    OutOfScope out;
    out.outcome.activation = activation(BoosterKind::out_of_scope, question);
    try {
        auto c = gateway.complete("out_of_scope",
                                  {{"role", config.persona.role_description.empty() ? std::string("bank assistant")
                                                                                    : config.persona.role_description},
                                   {"question", std::string(question)}},
                                  history);
        out.outcome.activation.exchange_id = c.exchange_id;
        const std::string answer = text::trim(c.text);
        if (answer.empty()) {
            out.outcome.activation.guard_outcome = GuardOutcome::rejected;
            return out;
        }
        if (answer.find("REFUSED") != std::string::npos) {
            out.refused = true;
            out.outcome.text = config.closed_qa.default_answer;
            out.outcome.activation.guard_outcome = GuardOutcome::substituted_default;
        } else {
            out.outcome.text = answer;
        }
        out.outcome.ok = true;
        out.outcome.activation.output = out.outcome.text;
    } catch (const Error& e) {
        if (!e.is_provider_error()) throw;
        out.outcome.activation.error = e.what();
        out.outcome.activation.guard_outcome = GuardOutcome::rejected;
    }
    return out;
}

std::string intent_label(std::string_view intent) {
    std::string out(intent);
    std::replace(out.begin(), out.end(), '_', ' ');
    return out;
}

Outcome disambiguate(llm::Gateway& gateway, const ProjectConfig& config, std::string_view option_a,
                     std::string_view option_b, std::string_view utterance, std::string_view locale) {
    const std::string label_a = intent_label(option_a), label_b = intent_label(option_b);
    Outcome out;
    out.activation = activation(BoosterKind::disambiguation, utterance);
    auto fallback = [&] {
        nlg::RenderRequest r;
        r.key = config.dialog.disambiguation_template;
        r.bindings = {{"option_a", label_a}, {"option_b", label_b}};
        r.locale = std::string(locale);
        return nlg::render(config, r);
    };
    auto description = [&](std::string_view intent) {
        const IntentDef* d = config.intent(intent);
        return d && !d->description.empty() ? d->description : intent_label(intent);
    };
    try {
        auto c = gateway.complete("disambiguation", {{"domain", config.domain},
                                                     {"utterance", std::string(utterance)},
                                                     {"option_a", label_a},
                                                     {"option_b", label_b},
                                                     {"description_a", description(option_a)},
                                                     {"description_b", description(option_b)}});
        out.activation.exchange_id = c.exchange_id;
        const std::string question = text::trim(c.text);
        const std::string folded = text::lower(question);
        if (!question.empty() && folded.find(label_a) != std::string::npos &&
            folded.find(label_b) != std::string::npos) {
            out.text = question;
            out.ok = true;
        } else {
            out.text = fallback();
            out.activation.guard_outcome = GuardOutcome::rejected;
            out.ok = true;
        }
    } catch (const Error& e) {
        if (!e.is_provider_error()) throw;
        out.activation.error = e.what();
        out.activation.guard_outcome = GuardOutcome::rejected;
        out.text = fallback();
    }
    out.activation.output = out.text;
    return out;
}

Outcome rephrase(llm::Gateway& gateway, std::string_view response, std::string_view directive,
                 const std::vector<std::string>& protected_values) {
    Outcome out{std::string(response), activation(BoosterKind::rephrase, response), false};
    try {
        auto c = gateway.complete("rephrase", {{"text", std::string(response)}, {"directive", std::string(directive)}});
        out.activation.exchange_id = c.exchange_id;
        const std::string candidate = text::trim(c.text);
        const bool keeps_values =
            std::all_of(protected_values.begin(), protected_values.end(), [&](const std::string& v) {
                return v.empty() || candidate.find(v) != std::string::npos;
            });
        if (!candidate.empty() && keeps_values) {
            out.text = candidate;
            out.ok = true;
        } else {
            out.activation.guard_outcome = GuardOutcome::rejected;
        }
    } catch (const Error& e) {
        if (!e.is_provider_error()) throw;
        out.activation.error = e.what();
        out.activation.guard_outcome = GuardOutcome::rejected;
    }
    out.activation.output = out.text;
    return out;
}

std::optional<HandoffSummary> parse_summary(std::string_view input) {
    static constexpr std::string_view kAction = "Agent Action Required:";
    static constexpr std::string_view kSummary = "Summary:";
    const auto a = input.find(kAction);
    if (a == std::string_view::npos) return std::nullopt;
    const auto s = input.find(kSummary, a + kAction.size());
    if (s == std::string_view::npos) return std::nullopt;
    HandoffSummary out;
    out.action_required = text::trim(input.substr(a + kAction.size(), s - a - kAction.size()));
    out.summary = text::trim(input.substr(s + kSummary.size()));
    if (out.action_required.empty() || out.summary.empty()) return std::nullopt;
    return out;
}

std::string format_transcript(const std::vector<dialog::TurnRecord>& transcript) {
    std::vector<std::string> lines;
    for (const auto& t : transcript)
        lines.push_back(std::string(t.speaker == dialog::Speaker::user ? "User: " : "Chatbot: ") + t.text);
    return text::join(lines, "\n");
}

HandoffSummary summarize(llm::Gateway& gateway, const std::vector<dialog::TurnRecord>& transcript,
                         BoosterActivation* activation_out) {
    const bool has_user_turn = std::any_of(transcript.begin(), transcript.end(),
                                           [](const auto& t) { return t.speaker == dialog::Speaker::user; });
    const std::string conversation = format_transcript(transcript);
    BoosterActivation act = activation(BoosterKind::summarize, conversation);
    auto publish = [&] {
        if (activation_out) *activation_out = act;
    };
    if (!has_user_turn) {
        act.error = "transcript has no user turn";
        act.guard_outcome = GuardOutcome::rejected;
        publish();
        throw Error(ErrorKind::Precondition, "transcript has no user turn");
    }
    try {
        for (const char* id : {"summarize", "summarize_strict"}) {
            auto c = gateway.complete(id, {{"transcript", conversation}});
            act.exchange_id = c.exchange_id;
            act.output = c.text;
            if (auto parsed = parse_summary(c.text)) {
                publish();
                return *parsed;
            }
        }
    } catch (const Error& e) {
        act.error = e.what();
        act.guard_outcome = GuardOutcome::rejected;
        publish();
        throw;
    }
    act.guard_outcome = GuardOutcome::rejected;
    act.error = "summary labels missing after retry";
    publish();
    throw Error(ErrorKind::FormatParseError, "response lacks \"Agent Action Required:\" or \"Summary:\"",
                {act.output});
}

}  // namespace ca::boosters
