#include "ca/project.hpp"

#include "ca/error.hpp"
#include "ca/placeholder.hpp"
#include "ca/text.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <regex>
#include <sstream>

namespace fs = std::filesystem;

namespace ca {

std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::human: return "human";
        case Provenance::generated: return "generated";
        case Provenance::approved: return "approved";
        case Provenance::rejected: return "rejected";
    }
    return "human";
}

Provenance provenance_from_string(std::string_view s) {
    if (s == "human") return Provenance::human;
    if (s == "generated") return Provenance::generated;
    if (s == "approved") return Provenance::approved;
    if (s == "rejected") return Provenance::rejected;
    throw Error(ErrorKind::ParseError, "unknown provenance '" + std::string(s) + "'");
}

std::string_view to_string(EntityKind k) { return k == EntityKind::pattern ? "pattern" : "gazetteer"; }

std::string_view to_string(Normalizer n) {
    switch (n) {
        case Normalizer::none: return "none";
        case Normalizer::digits: return "digits";
        case Normalizer::amount: return "amount";
        case Normalizer::date: return "date";
    }
    return "none";
}

namespace {

EntityKind entity_kind_from_string(std::string_view s) {
    if (s == "pattern") return EntityKind::pattern;
    if (s == "gazetteer") return EntityKind::gazetteer;
    throw Error(ErrorKind::ParseError, "unknown entity kind '" + std::string(s) + "'");
}

Normalizer normalizer_from_string(std::string_view s) {
    if (s == "none") return Normalizer::none;
    if (s == "digits") return Normalizer::digits;
    if (s == "amount") return Normalizer::amount;
    if (s == "date") return Normalizer::date;
    throw Error(ErrorKind::ParseError, "unknown normalizer '" + std::string(s) + "'");
}

}  // namespace

std::vector<std::string> FormDef::required_slots() const {
    std::vector<std::string> out;
    for (const auto& s : slots)
        if (s.required) out.push_back(s.name);
    return out;
}

const SlotDef* FormDef::slot(std::string_view n) const {
    for (const auto& s : slots)
        if (s.name == n) return &s;
    return nullptr;
}

std::set<std::string> ResponseTemplate::placeholders() const {
    std::set<std::string> out;
    for (const auto& v : variants)
        for (const auto& t : v.texts)
            if (auto names = placeholder::parse(t)) out.insert(names->begin(), names->end());
    return out;
}

std::vector<std::string> DialogConfig::template_keys() const {
    return {fallback_template,     confirm_request_template, confirm_accepted_template,
            confirm_rejected_template, stack_full_template,  handoff_template,
            frame_aborted_template, disambiguation_template};
}

namespace {

template <typename Vec, typename Fn>
auto find_by(Vec& v, Fn&& pred) -> decltype(&v.front()) {
    auto it = std::find_if(v.begin(), v.end(), pred);
    return it == v.end() ? nullptr : &*it;
}

}  // namespace

const IntentDef* ProjectConfig::intent(std::string_view n) const {
    return find_by(intents, [&](const auto& i) { return i.name == n; });
}
IntentDef* ProjectConfig::intent(std::string_view n) {
    return find_by(intents, [&](const auto& i) { return i.name == n; });
}
const EntityDef* ProjectConfig::entity(std::string_view n) const {
    return find_by(entities, [&](const auto& e) { return e.name == n; });
}
EntityDef* ProjectConfig::entity(std::string_view n) {
    return find_by(entities, [&](const auto& e) { return e.name == n; });
}
const FormDef* ProjectConfig::form(std::string_view n) const {
    return find_by(forms, [&](const auto& f) { return f.name == n; });
}
const FormDef* ProjectConfig::form_for_intent(std::string_view i) const {
    return find_by(forms, [&](const auto& f) { return f.trigger_intent == i; });
}
const ResponseTemplate* ProjectConfig::template_for(std::string_view k) const {
    return find_by(templates, [&](const auto& t) { return t.key == k; });
}
ResponseTemplate* ProjectConfig::template_for(std::string_view k) {
    return find_by(templates, [&](const auto& t) { return t.key == k; });
}
bool ProjectConfig::has_locale(std::string_view tag) const {
    return std::find(locales.begin(), locales.end(), tag) != locales.end();
}

std::string Violation::to_string() const {
    std::string s = severity == Severity::error ? "error" : "warning";
    s += " [" + code + "] " + where + ": " + message;
    return s;
}

// ---------------------------------------------------------------------------
// validation

namespace {

struct Checker {
    std::vector<Violation> out;

    void error(std::string code, std::string where, std::string message) {
        out.push_back({std::move(code), std::move(where), std::move(message), Severity::error});
    }
    void warn(std::string code, std::string where, std::string message) {
        out.push_back({std::move(code), std::move(where), std::move(message), Severity::warning});
    }
};

bool is_identifier(const std::string& s) {
    static const std::regex re("^[a-z][a-z0-9_]*$");
    return std::regex_match(s, re);
}

template <typename Vec, typename Key>
void check_unique(Checker& c, const Vec& items, Key&& key, const std::string& what) {
    std::set<std::string> seen;
    for (const auto& item : items) {
        const std::string& k = key(item);
        if (!seen.insert(k).second) c.error("duplicate-" + what, what + " '" + k + "'", "defined more than once");
    }
}

void check_template_ref(Checker& c, const ProjectConfig& cfg, const std::string& key, const std::string& where) {
    if (key.empty()) {
        c.error("missing-template", where, "template key is empty");
    } else if (!cfg.template_for(key)) {
        c.error("unknown-template", where, "references unknown template '" + key + "'");
    }
}

void check_intents(Checker& c, const ProjectConfig& cfg) {
    check_unique(c, cfg.intents, [](const IntentDef& i) -> const std::string& { return i.name; }, "intent");
    for (const auto& intent : cfg.intents) {
        const std::string where = "intent '" + intent.name + "'";
        if (!is_identifier(intent.name)) c.error("bad-identifier", where, "name must be lowercase snake_case");
        bool usable = false;
        for (std::size_t i = 0; i < intent.examples.size(); ++i) {
            const auto& ex = intent.examples[i];
            if (text::trim(ex.text).empty())
                c.error("empty-example", where + " example " + std::to_string(i + 1), "text is empty");
            if (!cfg.locales.empty() && !ex.locale.empty() && !cfg.has_locale(ex.locale))
                c.error("undeclared-locale", where + " example " + std::to_string(i + 1),
                        "locale '" + ex.locale + "' is not declared");
            usable = usable || usable_for_training(ex.provenance);
        }
        if (!usable)
            c.warn("untrainable-intent", where, "untrained-able intent: no human or approved examples");
        if (!intent.response_template.empty()) check_template_ref(c, cfg, intent.response_template, where);
    }
}

void check_entities(Checker& c, const ProjectConfig& cfg) {
    check_unique(c, cfg.entities, [](const EntityDef& e) -> const std::string& { return e.name; }, "entity");
    for (const auto& e : cfg.entities) {
        const std::string where = "entity '" + e.name + "'";
        if (!is_identifier(e.name)) c.error("bad-identifier", where, "name must be lowercase snake_case");
        if (e.kind == EntityKind::pattern) {
            if (e.pattern.empty()) {
                c.error("bad-pattern", where, "pattern entity has no pattern");
            } else {
                try {
                    std::regex re(e.pattern);
                } catch (const std::regex_error& ex) {
                    c.error("bad-pattern", where, std::string("pattern does not compile: ") + ex.what());
                }
            }
            continue;
        }
        std::set<std::string> canon;
        std::map<std::string, std::string> term_owner;
        for (const auto& v : e.values) {
            const std::string key = text::lower(v.canonical);
            if (text::trim(v.canonical).empty()) c.error("empty-canonical", where, "canonical value is empty");
            if (!canon.insert(key).second)
                c.error("duplicate-canonical", where, "canonical value '" + v.canonical + "' is not unique");
        }
        for (const auto& v : e.values) {
            auto claim = [&](const std::string& term) {
                const std::string key = text::lower(text::trim(term));
                auto [it, inserted] = term_owner.emplace(key, v.canonical);
                if (!inserted && it->second != v.canonical)
                    c.error("synonym-collision", where,
                            "term '" + term + "' maps to both '" + it->second + "' and '" + v.canonical + "'");
            };
            claim(v.canonical);
            for (const auto& s : v.synonyms) {
                if (canon.count(text::lower(s)) && text::lower(s) != text::lower(v.canonical)) {
                    c.error("synonym-collision", where,
                            "synonym '" + s + "' of '" + v.canonical + "' is itself a canonical value");
                    continue;
                }
                claim(s);
            }
        }
    }
}

void check_forms(Checker& c, const ProjectConfig& cfg) {
    check_unique(c, cfg.forms, [](const FormDef& f) -> const std::string& { return f.name; }, "form");
    std::set<std::string> triggers;
    for (const auto& f : cfg.forms) {
        const std::string where = "form '" + f.name + "'";
        if (!cfg.intent(f.trigger_intent))
            c.error("unknown-intent", where, "trigger intent '" + f.trigger_intent + "' does not exist");
        if (!triggers.insert(f.trigger_intent).second)
            c.error("duplicate-trigger", where, "intent '" + f.trigger_intent + "' already triggers another form");
        if (f.slots.empty()) c.error("empty-form", where, "form has no slots");
        check_unique(c, f.slots, [](const SlotDef& s) -> const std::string& { return s.name; }, "slot");
        for (const auto& s : f.slots) {
            const std::string swhere = where + " slot '" + s.name + "'";
            if (!cfg.entity(s.entity_type))
                c.error("unknown-entity", swhere, "entity type '" + s.entity_type + "' does not exist");
            check_template_ref(c, cfg, s.prompt_template, swhere);
        }
        check_template_ref(c, cfg, f.completion_template, where + " completion");
        check_template_ref(c, cfg, f.resume_template, where + " resume");
        if (f.confirm_required) check_template_ref(c, cfg, f.confirmation_template, where + " confirmation");
    }
}

void check_templates(Checker& c, const ProjectConfig& cfg) {
    check_unique(c, cfg.templates, [](const ResponseTemplate& t) -> const std::string& { return t.key; }, "template");
    for (const auto& t : cfg.templates) {
        const std::string where = "template '" + t.key + "'";
        bool has_default = false;
        for (const auto& v : t.variants) {
            if (!cfg.locales.empty() && v.locale == cfg.default_locale() && v.persona.empty()) has_default = true;
            if (!cfg.has_locale(v.locale))
                c.error("undeclared-locale", where, "variant locale '" + v.locale + "' is not declared");
            if (!v.persona.empty() &&
                std::find(cfg.persona.style_tags.begin(), cfg.persona.style_tags.end(), v.persona) ==
                    cfg.persona.style_tags.end())
                c.warn("unknown-persona", where, "persona tag '" + v.persona + "' is not a persona style tag");
            if (v.texts.empty()) c.error("empty-variant", where, "variant " + v.locale + " has no texts");
            for (const auto& text : v.texts) {
                if (text::trim(text).empty()) c.error("empty-variant", where, "variant text is empty");
                if (!placeholder::parse(text))
                    c.error("bad-placeholder", where, "malformed placeholder syntax in \"" + text + "\"");
            }
        }
        if (!has_default) c.error("missing-default-variant", where, "no variant for the default locale");
    }
}

void check_closed_qa(Checker& c, const ProjectConfig& cfg) {
    const auto& qa = cfg.closed_qa;
    if (qa.answers.empty()) c.error("closed-qa-empty", "closed_qa", "answer list is empty");
    if (text::trim(qa.default_answer).empty())
        c.error("closed-qa-default", "closed_qa", "default answer is empty");
    std::set<std::string> seen;
    for (const auto& a : qa.answers) {
        auto n = text::squash_whitespace(a);
        if (n.empty()) c.error("closed-qa-empty", "closed_qa", "answer is empty");
        if (!seen.insert(n).second) c.error("closed-qa-duplicate", "closed_qa", "answer '" + a + "' is duplicated");
    }
    if (seen.count(text::squash_whitespace(qa.default_answer)))
        c.error("closed-qa-default", "closed_qa", "default answer must not be one of the answers");
}

void check_dialog(Checker& c, const ProjectConfig& cfg) {
    const auto& t = cfg.thresholds;
    if (!(0.0 <= t.tau_oos && t.tau_oos < t.tau_intent && t.tau_intent <= 1.0))
        c.error("bad-thresholds", "thresholds", "require 0 <= tau_oos < tau_intent <= 1");
    if (t.max_fallbacks_before_handoff < 1)
        c.error("bad-thresholds", "thresholds", "max_fallbacks_before_handoff must be >= 1");
    const auto& d = cfg.dialog;
    if (d.max_stack_depth < 1) c.error("bad-dialog", "dialog", "max_stack_depth must be >= 1");
    for (const auto& key : d.template_keys()) check_template_ref(c, cfg, key, "dialog");
    const bool needs_confirm =
        std::any_of(cfg.forms.begin(), cfg.forms.end(), [](const FormDef& f) { return f.confirm_required; });
    if (needs_confirm || !d.confirm_entity.empty()) {
        const EntityDef* e = cfg.entity(d.confirm_entity);
        if (!e || e->kind != EntityKind::gazetteer) {
            c.error("bad-dialog", "dialog", "confirm_entity must name a gazetteer entity");
        } else {
            auto has = [&](const std::string& v) {
                return std::any_of(e->values.begin(), e->values.end(),
                                   [&](const GazetteerValue& g) { return g.canonical == v; });
            };
            if (!has(d.affirm_value) || !has(d.deny_value))
                c.error("bad-dialog", "dialog", "confirm_entity lacks the affirm/deny canonical values");
        }
    }
    if (!d.abort_intent.empty() && !cfg.intent(d.abort_intent))
        c.error("unknown-intent", "dialog", "abort intent '" + d.abort_intent + "' does not exist");
}

}  // namespace

std::vector<Violation> validate(const ProjectConfig& cfg) {
    Checker c;
    try {
        if (cfg.schema_version != 1)
            c.error("schema-version", "manifest", "unsupported schema_version " + std::to_string(cfg.schema_version));
        if (text::trim(cfg.name).empty()) c.error("missing-name", "manifest", "project name is empty");
        if (cfg.locales.empty()) c.error("no-locales", "manifest", "at least one locale is required");
        check_unique(c, cfg.locales, [](const std::string& l) -> const std::string& { return l; }, "locale");
        check_intents(c, cfg);
        check_entities(c, cfg);
        check_forms(c, cfg);
        check_templates(c, cfg);
        check_closed_qa(c, cfg);
        check_dialog(c, cfg);
    } catch (const std::exception& ex) {
        c.error("internal", "validate", ex.what());
    }
    return std::move(c.out);
}

// ---------------------------------------------------------------------------
// YAML I/O

namespace {

struct FileCtx {
    std::string file;

    [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
        std::string loc = file;
        if (node.IsDefined() && node.Mark().line >= 0)
            loc += ":" + std::to_string(node.Mark().line + 1) + ":" + std::to_string(node.Mark().column + 1);
        throw Error(ErrorKind::ParseError, loc + ": " + msg, {loc});
    }

    template <typename T>
    T get(const YAML::Node& node, const char* key, T fallback) const {
        const auto child = node[key];
        if (!child.IsDefined() || child.IsNull()) return fallback;
        try {
            return child.as<T>();
        } catch (const YAML::Exception& ex) {
            fail(child, std::string("field '") + key + "': " + ex.msg);
        }
    }

    template <typename T>
    T req(const YAML::Node& node, const char* key) const {
        const auto child = node[key];
        if (!child.IsDefined() || child.IsNull()) fail(node, std::string("missing required field '") + key + "'");
        try {
            return child.as<T>();
        } catch (const YAML::Exception& ex) {
            fail(child, std::string("field '") + key + "': " + ex.msg);
        }
    }

    YAML::Node seq(const YAML::Node& node, const char* key) const {
        const auto child = node[key];
        if (!child.IsDefined() || child.IsNull()) return YAML::Node(YAML::NodeType::Sequence);
        if (!child.IsSequence()) fail(child, std::string("field '") + key + "' must be a list");
        return child;
    }

    std::vector<std::string> strings(const YAML::Node& node, const char* key) const {
        std::vector<std::string> out;
        for (const auto& item : seq(node, key)) {
            try {
                out.push_back(item.as<std::string>());
            } catch (const YAML::Exception& ex) {
                fail(item, std::string("list '") + key + "': " + ex.msg);
            }
        }
        return out;
    }

    template <typename E, typename Conv>
    E enumerated(const YAML::Node& node, const char* key, E fallback, Conv&& conv) const {
        const auto child = node[key];
        if (!child.IsDefined() || child.IsNull()) return fallback;
        try {
            return conv(child.as<std::string>());
        } catch (const Error& e) {
            fail(child, e.what());
        } catch (const YAML::Exception& ex) {
            fail(child, ex.msg);
        }
    }
};

YAML::Node load_yaml(const fs::path& path, bool required = true) {
    if (!fs::exists(path)) {
        if (!required) return YAML::Node();
        throw Error(ErrorKind::MissingFile, path.string(), {path.string()});
    }
    try {
        return YAML::LoadFile(path.string());
    } catch (const YAML::ParserException& ex) {
        std::string loc = path.string() + ":" + std::to_string(ex.mark.line + 1) + ":" +
                          std::to_string(ex.mark.column + 1);
        throw Error(ErrorKind::ParseError, loc + ": " + ex.msg, {loc});
    } catch (const YAML::BadFile&) {
        throw Error(ErrorKind::MissingFile, path.string(), {path.string()});
    }
}

void read_manifest(ProjectConfig& cfg, const fs::path& dir) {
    FileCtx f{"manifest.yaml"};
    auto root = load_yaml(dir / "manifest.yaml");
    if (!root.IsMap()) f.fail(root, "manifest must be a mapping");
    cfg.schema_version = f.req<int>(root, "schema_version");
    cfg.name = f.req<std::string>(root, "name");
    cfg.domain = f.get<std::string>(root, "domain", "");
    cfg.locales = f.strings(root, "locales");

    if (auto t = root["thresholds"]; t.IsDefined()) {
        cfg.thresholds.tau_intent = f.get<double>(t, "tau_intent", cfg.thresholds.tau_intent);
        cfg.thresholds.tau_oos = f.get<double>(t, "tau_oos", cfg.thresholds.tau_oos);
        cfg.thresholds.max_fallbacks_before_handoff =
            f.get<int>(t, "max_fallbacks_before_handoff", cfg.thresholds.max_fallbacks_before_handoff);
    }
    if (auto d = root["dialog"]; d.IsDefined()) {
        auto& dc = cfg.dialog;
        dc.max_stack_depth = f.get<int>(d, "max_stack_depth", dc.max_stack_depth);
        dc.confirm_entity = f.get<std::string>(d, "confirm_entity", dc.confirm_entity);
        dc.affirm_value = f.get<std::string>(d, "affirm_value", dc.affirm_value);
        dc.deny_value = f.get<std::string>(d, "deny_value", dc.deny_value);
        dc.abort_intent = f.get<std::string>(d, "abort_intent", dc.abort_intent);
        if (auto t = d["templates"]; t.IsDefined()) {
            dc.fallback_template = f.get<std::string>(t, "fallback", dc.fallback_template);
            dc.confirm_request_template = f.get<std::string>(t, "confirm_request", dc.confirm_request_template);
            dc.confirm_accepted_template = f.get<std::string>(t, "confirm_accepted", dc.confirm_accepted_template);
            dc.confirm_rejected_template = f.get<std::string>(t, "confirm_rejected", dc.confirm_rejected_template);
            dc.stack_full_template = f.get<std::string>(t, "stack_full", dc.stack_full_template);
            dc.handoff_template = f.get<std::string>(t, "handoff", dc.handoff_template);
            dc.frame_aborted_template = f.get<std::string>(t, "frame_aborted", dc.frame_aborted_template);
            dc.disambiguation_template = f.get<std::string>(t, "disambiguation", dc.disambiguation_template);
        }
    }
    if (auto b = root["boosters"]; b.IsDefined()) {
        auto& bc = cfg.boosters;
        bc.autocorrect = f.get<bool>(b, "autocorrect", bc.autocorrect);
        bc.out_of_scope = f.get<bool>(b, "out_of_scope", bc.out_of_scope);
        bc.disambiguation = f.get<bool>(b, "disambiguation", bc.disambiguation);
        bc.closed_qa = f.get<bool>(b, "closed_qa", bc.closed_qa);
    }
    if (auto p = root["provider"]; p.IsDefined()) {
        auto& pc = cfg.provider;
        pc.kind = f.get<std::string>(p, "kind", pc.kind);
        pc.endpoint = f.get<std::string>(p, "endpoint", pc.endpoint);
        pc.model = f.get<std::string>(p, "model", pc.model);
        pc.credential_env = f.get<std::string>(p, "credential_env", pc.credential_env);
        pc.timeout_ms = f.get<int>(p, "timeout_ms", pc.timeout_ms);
        pc.max_retries = f.get<int>(p, "max_retries", pc.max_retries);
        pc.fixtures = f.get<std::string>(p, "fixtures", pc.fixtures);
        pc.strict = f.get<bool>(p, "strict", pc.strict);
        if (p["api_key"].IsDefined())
            f.fail(p["api_key"], "credentials must not be stored in project files; use credential_env");
    }
}

void read_intents(ProjectConfig& cfg, const fs::path& dir) {
    FileCtx f{"intents.yaml"};
    auto root = load_yaml(dir / "intents.yaml");
    for (const auto& n : f.seq(root, "intents")) {
        IntentDef intent;
        intent.name = f.req<std::string>(n, "name");
        intent.description = f.get<std::string>(n, "description", "");
        intent.response_template = f.get<std::string>(n, "response_template", "");
        for (const auto& e : f.seq(n, "examples")) {
            TrainingExample ex;
            if (e.IsScalar()) {
                ex.text = e.as<std::string>();
                ex.locale = cfg.locales.empty() ? "" : cfg.locales.front();
            } else {
                ex.text = f.req<std::string>(e, "text");
                ex.locale = f.get<std::string>(e, "locale", cfg.locales.empty() ? "" : cfg.locales.front());
                ex.provenance = f.enumerated(e, "provenance", Provenance::human, provenance_from_string);
            }
            intent.examples.push_back(std::move(ex));
        }
        cfg.intents.push_back(std::move(intent));
    }
}

void read_entities(ProjectConfig& cfg, const fs::path& dir) {
    FileCtx f{"entities.yaml"};
    auto root = load_yaml(dir / "entities.yaml");
    for (const auto& n : f.seq(root, "entities")) {
        EntityDef e;
        e.name = f.req<std::string>(n, "name");
        e.kind = f.enumerated(n, "kind", EntityKind::gazetteer, entity_kind_from_string);
        e.pattern = f.get<std::string>(n, "pattern", "");
        e.case_insensitive = f.get<bool>(n, "case_insensitive", false);
        e.normalizer = f.enumerated(n, "normalizer", Normalizer::none, normalizer_from_string);
        for (const auto& v : f.seq(n, "values")) {
            GazetteerValue gv;
            gv.canonical = f.req<std::string>(v, "canonical");
            gv.synonyms = f.strings(v, "synonyms");
            e.values.push_back(std::move(gv));
        }
        cfg.entities.push_back(std::move(e));
    }
}

void read_forms(ProjectConfig& cfg, const fs::path& dir) {
    FileCtx f{"forms.yaml"};
    auto root = load_yaml(dir / "forms.yaml");
    for (const auto& n : f.seq(root, "forms")) {
        FormDef form;
        form.name = f.req<std::string>(n, "name");
        form.trigger_intent = f.req<std::string>(n, "trigger_intent");
        form.completion_template = f.req<std::string>(n, "completion_template");
        form.resume_template = f.req<std::string>(n, "resume_template");
        form.confirm_required = f.get<bool>(n, "confirm_required", false);
        form.confirmation_template = f.get<std::string>(n, "confirmation_template", "");
        for (const auto& s : f.seq(n, "slots")) {
            SlotDef slot;
            slot.name = f.req<std::string>(s, "name");
            slot.entity_type = f.req<std::string>(s, "entity_type");
            slot.prompt_template = f.req<std::string>(s, "prompt_template");
            slot.required = f.get<bool>(s, "required", true);
            form.slots.push_back(std::move(slot));
        }
        cfg.forms.push_back(std::move(form));
    }
}

void read_templates(ProjectConfig& cfg, const fs::path& dir) {
    FileCtx f{"templates.yaml"};
    auto root = load_yaml(dir / "templates.yaml");
    for (const auto& n : f.seq(root, "templates")) {
        ResponseTemplate t;
        t.key = f.req<std::string>(n, "key");
        t.rephrase_directive = f.get<std::string>(n, "rephrase", "");
        for (const auto& v : f.seq(n, "variants")) {
            TemplateVariant var;
            var.locale = f.req<std::string>(v, "locale");
            var.persona = f.get<std::string>(v, "persona", "");
            if (var.persona == "default") var.persona.clear();
            var.texts = f.strings(v, "texts");
            t.variants.push_back(std::move(var));
        }
        cfg.templates.push_back(std::move(t));
    }
}

void read_persona(ProjectConfig& cfg, const fs::path& dir) {
    FileCtx f{"persona.yaml"};
    auto root = load_yaml(dir / "persona.yaml");
    auto& p = cfg.persona;
    p.role_description = f.get<std::string>(root, "role_description", "");
    p.traits = f.strings(root, "traits");
    p.style_tags = f.strings(root, "style_tags");
    if (auto d = root["style_directives"]; d.IsDefined() && d.IsMap())
        for (const auto& kv : d) p.style_directives[kv.first.as<std::string>()] = kv.second.as<std::string>();
}

void read_closed_qa(ProjectConfig& cfg, const fs::path& dir) {
    FileCtx f{"closed_qa.yaml"};
    auto root = load_yaml(dir / "closed_qa.yaml");
    cfg.closed_qa.answers = f.strings(root, "answers");
    cfg.closed_qa.default_answer = f.req<std::string>(root, "default_answer");
    cfg.closed_qa.prompt_template = f.get<std::string>(root, "prompt_template", "closed_qa");
}

void read_prompts(ProjectConfig& cfg, const fs::path& dir) {
    FileCtx f{"prompts.yaml"};
    auto root = load_yaml(dir / "prompts.yaml", false);
    if (!root.IsDefined() || root.IsNull()) return;
    for (const auto& n : f.seq(root, "prompts")) {
        PromptOverride p;
        p.id = f.req<std::string>(n, "id");
        p.system = f.get<std::string>(n, "system", "");
        p.body = f.req<std::string>(n, "body");
        cfg.prompts.push_back(std::move(p));
    }
}

std::string emit(const std::function<void(YAML::Emitter&)>& fn) {
    YAML::Emitter out;
    out.SetIndent(2);
    fn(out);
    return std::string(out.c_str()) + "\n";
}

void emit_strings(YAML::Emitter& out, const char* key, const std::vector<std::string>& items) {
    out << YAML::Key << key << YAML::Value << YAML::BeginSeq;
    for (const auto& s : items) out << YAML::DoubleQuoted << s;
    out << YAML::EndSeq;
}

}  // namespace

ProjectConfig load_project(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error(ErrorKind::MissingFile, dir.string(), {dir.string()});
    ProjectConfig cfg;
    try {
        read_manifest(cfg, dir);
        read_intents(cfg, dir);
        read_entities(cfg, dir);
        read_forms(cfg, dir);
        read_templates(cfg, dir);
        read_persona(cfg, dir);
        read_closed_qa(cfg, dir);
        read_prompts(cfg, dir);
    } catch (const YAML::Exception& ex) {
        throw Error(ErrorKind::ParseError, ex.what());
    }
    std::vector<std::string> errors;
    for (const auto& v : validate(cfg))
        if (v.severity == Severity::error) errors.push_back(v.to_string());
    if (!errors.empty())
        throw Error(ErrorKind::ValidationError, std::to_string(errors.size()) + " violation(s) in " + dir.string(),
                    errors);
    return cfg;
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error(ErrorKind::IoError, "cannot write " + tmp.string());
        os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        os.flush();
        if (!os) throw Error(ErrorKind::IoError, "short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorKind::IoError, "cannot rename into " + path.string());
    }
}

void save_project(const ProjectConfig& cfg, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw Error(ErrorKind::IoError, "cannot create directory " + dir.string());

    write_file_atomic(dir / "manifest.yaml", emit([&](YAML::Emitter& o) {
        o << YAML::BeginMap;
        o << YAML::Key << "schema_version" << YAML::Value << cfg.schema_version;
        o << YAML::Key << "name" << YAML::Value << cfg.name;
        o << YAML::Key << "domain" << YAML::Value << cfg.domain;
        emit_strings(o, "locales", cfg.locales);
        o << YAML::Key << "thresholds" << YAML::Value << YAML::BeginMap;
        o << YAML::Key << "tau_intent" << YAML::Value << cfg.thresholds.tau_intent;
        o << YAML::Key << "tau_oos" << YAML::Value << cfg.thresholds.tau_oos;
        o << YAML::Key << "max_fallbacks_before_handoff" << YAML::Value
          << cfg.thresholds.max_fallbacks_before_handoff;
        o << YAML::EndMap;
        const auto& d = cfg.dialog;
        o << YAML::Key << "dialog" << YAML::Value << YAML::BeginMap;
        o << YAML::Key << "max_stack_depth" << YAML::Value << d.max_stack_depth;
        o << YAML::Key << "confirm_entity" << YAML::Value << d.confirm_entity;
        o << YAML::Key << "affirm_value" << YAML::Value << d.affirm_value;
        o << YAML::Key << "deny_value" << YAML::Value << d.deny_value;
        o << YAML::Key << "abort_intent" << YAML::Value << d.abort_intent;
        o << YAML::Key << "templates" << YAML::Value << YAML::BeginMap;
        o << YAML::Key << "fallback" << YAML::Value << d.fallback_template;
        o << YAML::Key << "confirm_request" << YAML::Value << d.confirm_request_template;
        o << YAML::Key << "confirm_accepted" << YAML::Value << d.confirm_accepted_template;
        o << YAML::Key << "confirm_rejected" << YAML::Value << d.confirm_rejected_template;
        o << YAML::Key << "stack_full" << YAML::Value << d.stack_full_template;
        o << YAML::Key << "handoff" << YAML::Value << d.handoff_template;
        o << YAML::Key << "frame_aborted" << YAML::Value << d.frame_aborted_template;
        o << YAML::Key << "disambiguation" << YAML::Value << d.disambiguation_template;
        o << YAML::EndMap << YAML::EndMap;
        const auto& b = cfg.boosters;
        o << YAML::Key << "boosters" << YAML::Value << YAML::BeginMap;
        o << YAML::Key << "autocorrect" << YAML::Value << b.autocorrect;
        o << YAML::Key << "out_of_scope" << YAML::Value << b.out_of_scope;
        o << YAML::Key << "disambiguation" << YAML::Value << b.disambiguation;
        o << YAML::Key << "closed_qa" << YAML::Value << b.closed_qa;
        o << YAML::EndMap;
        const auto& p = cfg.provider;
        o << YAML::Key << "provider" << YAML::Value << YAML::BeginMap;
        o << YAML::Key << "kind" << YAML::Value << p.kind;
        o << YAML::Key << "endpoint" << YAML::Value << p.endpoint;
        o << YAML::Key << "model" << YAML::Value << p.model;
        o << YAML::Key << "credential_env" << YAML::Value << p.credential_env;
        o << YAML::Key << "timeout_ms" << YAML::Value << p.timeout_ms;
        o << YAML::Key << "max_retries" << YAML::Value << p.max_retries;
        o << YAML::Key << "fixtures" << YAML::Value << p.fixtures;
        o << YAML::Key << "strict" << YAML::Value << p.strict;
        o << YAML::EndMap;
        o << YAML::EndMap;
    }));

    write_file_atomic(dir / "intents.yaml", emit([&](YAML::Emitter& o) {
        o << YAML::BeginMap << YAML::Key << "intents" << YAML::Value << YAML::BeginSeq;
        for (const auto& i : cfg.intents) {
            o << YAML::BeginMap;
            o << YAML::Key << "name" << YAML::Value << i.name;
            if (!i.description.empty()) o << YAML::Key << "description" << YAML::Value << i.description;
            if (!i.response_template.empty())
                o << YAML::Key << "response_template" << YAML::Value << i.response_template;
            o << YAML::Key << "examples" << YAML::Value << YAML::BeginSeq;
            for (const auto& e : i.examples) {
                o << YAML::Flow << YAML::BeginMap;
                o << YAML::Key << "text" << YAML::Value << YAML::DoubleQuoted << e.text;
                o << YAML::Key << "locale" << YAML::Value << e.locale;
                o << YAML::Key << "provenance" << YAML::Value << std::string(to_string(e.provenance));
                o << YAML::EndMap;
            }
            o << YAML::EndSeq << YAML::EndMap;
        }
        o << YAML::EndSeq << YAML::EndMap;
    }));

    write_file_atomic(dir / "entities.yaml", emit([&](YAML::Emitter& o) {
        o << YAML::BeginMap << YAML::Key << "entities" << YAML::Value << YAML::BeginSeq;
        for (const auto& e : cfg.entities) {
            o << YAML::BeginMap;
            o << YAML::Key << "name" << YAML::Value << e.name;
            o << YAML::Key << "kind" << YAML::Value << std::string(to_string(e.kind));
            if (e.kind == EntityKind::pattern) {
                o << YAML::Key << "pattern" << YAML::Value << YAML::SingleQuoted << e.pattern;
                o << YAML::Key << "case_insensitive" << YAML::Value << e.case_insensitive;
                o << YAML::Key << "normalizer" << YAML::Value << std::string(to_string(e.normalizer));
            }
            o << YAML::Key << "values" << YAML::Value << YAML::BeginSeq;
            for (const auto& v : e.values) {
                o << YAML::BeginMap << YAML::Key << "canonical" << YAML::Value << YAML::DoubleQuoted << v.canonical;
                o << YAML::Key << "synonyms" << YAML::Value << YAML::Flow << YAML::BeginSeq;
                for (const auto& s : v.synonyms) o << YAML::DoubleQuoted << s;
                o << YAML::EndSeq << YAML::EndMap;
            }
            o << YAML::EndSeq << YAML::EndMap;
        }
        o << YAML::EndSeq << YAML::EndMap;
    }));

    write_file_atomic(dir / "forms.yaml", emit([&](YAML::Emitter& o) {
        o << YAML::BeginMap << YAML::Key << "forms" << YAML::Value << YAML::BeginSeq;
        for (const auto& f : cfg.forms) {
            o << YAML::BeginMap;
            o << YAML::Key << "name" << YAML::Value << f.name;
            o << YAML::Key << "trigger_intent" << YAML::Value << f.trigger_intent;
            o << YAML::Key << "completion_template" << YAML::Value << f.completion_template;
            o << YAML::Key << "resume_template" << YAML::Value << f.resume_template;
            o << YAML::Key << "confirm_required" << YAML::Value << f.confirm_required;
            o << YAML::Key << "confirmation_template" << YAML::Value << f.confirmation_template;
            o << YAML::Key << "slots" << YAML::Value << YAML::BeginSeq;
            for (const auto& s : f.slots) {
                o << YAML::Flow << YAML::BeginMap;
                o << YAML::Key << "name" << YAML::Value << s.name;
                o << YAML::Key << "entity_type" << YAML::Value << s.entity_type;
                o << YAML::Key << "prompt_template" << YAML::Value << s.prompt_template;
                o << YAML::Key << "required" << YAML::Value << s.required;
                o << YAML::EndMap;
            }
            o << YAML::EndSeq << YAML::EndMap;
        }
        o << YAML::EndSeq << YAML::EndMap;
    }));

    write_file_atomic(dir / "templates.yaml", emit([&](YAML::Emitter& o) {
        o << YAML::BeginMap << YAML::Key << "templates" << YAML::Value << YAML::BeginSeq;
        for (const auto& t : cfg.templates) {
            o << YAML::BeginMap;
            o << YAML::Key << "key" << YAML::Value << t.key;
            if (!t.rephrase_directive.empty()) o << YAML::Key << "rephrase" << YAML::Value << t.rephrase_directive;
            o << YAML::Key << "variants" << YAML::Value << YAML::BeginSeq;
            for (const auto& v : t.variants) {
                o << YAML::BeginMap;
                o << YAML::Key << "locale" << YAML::Value << v.locale;
                if (!v.persona.empty()) o << YAML::Key << "persona" << YAML::Value << v.persona;
                emit_strings(o, "texts", v.texts);
                o << YAML::EndMap;
            }
            o << YAML::EndSeq << YAML::EndMap;
        }
        o << YAML::EndSeq << YAML::EndMap;
    }));

    write_file_atomic(dir / "persona.yaml", emit([&](YAML::Emitter& o) {
        const auto& p = cfg.persona;
        o << YAML::BeginMap;
        o << YAML::Key << "role_description" << YAML::Value << YAML::DoubleQuoted << p.role_description;
        emit_strings(o, "traits", p.traits);
        emit_strings(o, "style_tags", p.style_tags);
        o << YAML::Key << "style_directives" << YAML::Value << YAML::BeginMap;
        for (const auto& [k, v] : p.style_directives) o << YAML::Key << k << YAML::Value << YAML::DoubleQuoted << v;
        o << YAML::EndMap << YAML::EndMap;
    }));

    write_file_atomic(dir / "closed_qa.yaml", emit([&](YAML::Emitter& o) {
        o << YAML::BeginMap;
        emit_strings(o, "answers", cfg.closed_qa.answers);
        o << YAML::Key << "default_answer" << YAML::Value << YAML::DoubleQuoted << cfg.closed_qa.default_answer;
        o << YAML::Key << "prompt_template" << YAML::Value << cfg.closed_qa.prompt_template;
        o << YAML::EndMap;
    }));

    if (!cfg.prompts.empty()) {
        write_file_atomic(dir / "prompts.yaml", emit([&](YAML::Emitter& o) {
            o << YAML::BeginMap << YAML::Key << "prompts" << YAML::Value << YAML::BeginSeq;
            for (const auto& p : cfg.prompts) {
                o << YAML::BeginMap;
                o << YAML::Key << "id" << YAML::Value << p.id;
                if (!p.system.empty()) o << YAML::Key << "system" << YAML::Value << YAML::Literal << p.system;
                o << YAML::Key << "body" << YAML::Value << YAML::Literal << p.body;
                o << YAML::EndMap;
            }
            o << YAML::EndSeq << YAML::EndMap;
        }));
    } else if (fs::exists(dir / "prompts.yaml")) {
        fs::remove(dir / "prompts.yaml", ec);
    }
}

std::string locale_display_name(std::string_view tag) {
    static const std::map<std::string, std::string, std::less<>> names = {
        {"en", "English"},     {"en-US", "American English"}, {"en-GB", "British English"},
        {"de", "German"},      {"de-CH", "Swiss Standard German"}, {"de-CH-x-dialect", "Swiss German"},
        {"es", "Spanish"},     {"fr", "French"},      {"it", "Italian"},
        {"pt", "Portuguese"},  {"nl", "Dutch"},
    };
    auto it = names.find(tag);
    return it == names.end() ? std::string(tag) : it->second;
}

}  // namespace ca
