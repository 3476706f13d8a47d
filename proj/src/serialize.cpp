#include "ca/serialize.hpp"

#include "ca/error.hpp"

namespace ca::serialize {

namespace {

template <class T, class F>
json array_of(const std::vector<T>& v, F&& f) {
    json out = json::array();
    for (const auto& x : v) out.push_back(f(x));
    return out;
}

template <class T, class F>
std::vector<T> vector_of(const json& j, F&& f) {
    std::vector<T> out;
    if (j.is_null()) return out;
    for (const auto& x : j) out.push_back(f(x));
    return out;
}

std::vector<dialog::ContextFrame> frames_from(const json& j) {
    return vector_of<dialog::ContextFrame>(j, frame_from_json);
}

std::vector<nlu::EntityMatch> entities_from(const json& j) { return vector_of<nlu::EntityMatch>(j, entity_from_json); }

template <class F>
auto guarded(std::string_view what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, "malformed " + std::string(what) + ": " + e.what());
    }
}

}  // namespace

json to_json(const nlu::IntentPrediction& p) {
    return {{"intent", p.intent ? json(*p.intent) : json(nullptr)},
            {"confidence", p.confidence},
            {"ranked", array_of(p.ranked, [](const nlu::ScoredIntent& s) {
                 return json{{"intent", s.intent}, {"score", s.score}};
             })}};
}

json to_json(const nlu::EntityMatch& m) {
    return {{"entity", m.entity}, {"raw", m.raw},     {"start", m.start},
            {"end", m.end},       {"value", m.value}, {"extractor", std::string(to_string(m.extractor))}};
}

json to_json(const dialog::BoosterActivation& a) {
    json j{{"kind", std::string(to_string(a.kind))},
           {"input", a.input},
           {"output", a.output},
           {"guard_outcome", std::string(to_string(a.guard_outcome))},
           {"exchange_id", a.exchange_id}};
    if (!a.error.empty()) j["error"] = a.error;
    return j;
}

json to_json(const dialog::ContextFrame& f) {
    json filled = json::object();
    for (const auto& [slot, m] : f.filled) filled[slot] = to_json(m);
    return {{"form", f.form}, {"filled", filled}, {"pending", f.pending}};
}

json to_json(const dialog::TurnRecord& r) {
    json j{{"speaker", std::string(to_string(r.speaker))}, {"text", r.text}, {"annotations", nullptr}};
    if (r.annotations) {
        const auto& a = *r.annotations;
        j["annotations"] = {{"prediction", to_json(a.prediction)},
                            {"entities", to_json(a.entities)},
                            {"boosters", array_of(a.boosters, [](const auto& b) { return to_json(b); })},
                            {"templates", a.templates}};
    }
    return j;
}

json to_json(const engine::TurnResult& r) {
    const auto& d = r.debug;
    return {{"replies", r.replies},
            {"debug",
             {{"prediction", to_json(d.prediction)},
              {"entities", to_json(d.entities)},
              {"frames", to_json(d.frames)},
              {"boosters", array_of(d.boosters, [](const auto& b) { return to_json(b); })},
              {"templates", d.templates},
              {"actions", d.actions},
              {"fallback_count", d.fallback_count},
              {"awaiting_confirmation", d.awaiting_confirmation}}}};
}

json to_json(const boosters::HandoffSummary& s) {
    return {{"action_required", s.action_required}, {"summary", s.summary}};
}

json to_json(const std::vector<nlu::EntityMatch>& v) {
    return array_of(v, [](const auto& x) { return to_json(x); });
}
json to_json(const std::vector<dialog::ContextFrame>& v) {
    return array_of(v, [](const auto& x) { return to_json(x); });
}
json to_json(const std::vector<dialog::TurnRecord>& v) {
    return array_of(v, [](const auto& x) { return to_json(x); });
}

json state_snapshot(const dialog::DialogState& s) {
    json j{{"session_id", s.session_id},
           {"frames", to_json(s.frames)},
           {"fallback_count", s.fallback_count},
           {"created_at", s.created_at},
           {"updated_at", s.updated_at},
           {"unconfirmed", to_json(s.unconfirmed)},
           {"awaiting_confirmation", s.awaiting_confirmation},
           {"confirmed", to_json(s.confirmed)},
           {"disambiguation", nullptr},
           {"rotation", s.rotation},
           {"locale", s.locale},
           {"persona", s.persona},
           {"handoff_suggested", s.handoff_suggested},
           {"handed_off", s.handed_off}};
    if (s.disambiguation)
        j["disambiguation"] = {{"options", s.disambiguation->options},
                               {"text", s.disambiguation->text},
                               {"entities", to_json(s.disambiguation->entities)}};
    return j;
}

nlu::IntentPrediction prediction_from_json(const json& j) {
    return guarded("prediction", [&] {
        nlu::IntentPrediction p;
        if (!j.at("intent").is_null()) p.intent = j.at("intent").get<std::string>();
        p.confidence = j.at("confidence").get<double>();
        for (const auto& r : j.at("ranked")) p.ranked.push_back({r.at("intent").get<std::string>(), r.at("score").get<double>()});
        return p;
    });
}

nlu::EntityMatch entity_from_json(const json& j) {
    return guarded("entity", [&] {
        nlu::EntityMatch m;
        m.entity = j.at("entity").get<std::string>();
        m.raw = j.at("raw").get<std::string>();
        m.start = j.at("start").get<std::size_t>();
        m.end = j.at("end").get<std::size_t>();
        m.value = j.at("value").get<std::string>();
        m.extractor = j.at("extractor").get<std::string>() == "gazetteer" ? EntityKind::gazetteer : EntityKind::pattern;
        return m;
    });
}

dialog::BoosterActivation activation_from_json(const json& j) {
    return guarded("booster activation", [&] {
        dialog::BoosterActivation a;
        a.kind = dialog::booster_kind_from_string(j.at("kind").get<std::string>());
        a.input = j.at("input").get<std::string>();
        a.output = j.at("output").get<std::string>();
        a.guard_outcome = dialog::guard_outcome_from_string(j.at("guard_outcome").get<std::string>());
        a.error = j.value("error", "");
        a.exchange_id = j.value("exchange_id", "");
        return a;
    });
}

dialog::ContextFrame frame_from_json(const json& j) {
    return guarded("frame", [&] {
        dialog::ContextFrame f;
        f.form = j.at("form").get<std::string>();
        for (const auto& [slot, m] : j.at("filled").items()) f.filled[slot] = entity_from_json(m);
        f.pending = j.at("pending").get<std::vector<std::string>>();
        return f;
    });
}

dialog::TurnRecord turn_from_json(const json& j) {
    return guarded("turn record", [&] {
        dialog::TurnRecord r;
        r.speaker = dialog::speaker_from_string(j.at("speaker").get<std::string>());
        r.text = j.at("text").get<std::string>();
        if (j.contains("annotations") && !j["annotations"].is_null()) {
            const auto& a = j["annotations"];
            dialog::Annotations notes;
            notes.prediction = prediction_from_json(a.at("prediction"));
            notes.entities = entities_from(a.at("entities"));
            notes.boosters = vector_of<dialog::BoosterActivation>(a.at("boosters"), activation_from_json);
            notes.templates = a.value("templates", std::vector<std::string>{});
            r.annotations = std::move(notes);
        }
        return r;
    });
}

dialog::DialogState state_from_snapshot(const json& j) {
    return guarded("state snapshot", [&] {
        dialog::DialogState s;
        s.session_id = j.at("session_id").get<std::string>();
        s.frames = frames_from(j.at("frames"));
        s.fallback_count = j.at("fallback_count").get<int>();
        s.created_at = j.value("created_at", "");
        s.updated_at = j.value("updated_at", "");
        s.unconfirmed = frames_from(j.value("unconfirmed", json::array()));
        s.awaiting_confirmation = j.value("awaiting_confirmation", false);
        s.confirmed = frames_from(j.value("confirmed", json::array()));
        if (j.contains("disambiguation") && !j["disambiguation"].is_null()) {
            const auto& d = j["disambiguation"];
            s.disambiguation = dialog::PendingDisambiguation{d.at("options").get<std::vector<std::string>>(),
                                                             d.at("text").get<std::string>(),
                                                             entities_from(d.at("entities"))};
        }
        s.rotation = j.value("rotation", std::map<std::string, std::size_t>{});
        s.locale = j.value("locale", "");
        s.persona = j.value("persona", "");
        s.handoff_suggested = j.value("handoff_suggested", false);
        s.handed_off = j.value("handed_off", false);
        return s;
    });
}

}  // namespace ca::serialize
