#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ca {

enum class Provenance { human, generated, approved, rejected };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

/// Only human-authored and explicitly approved examples may train the model.
inline bool usable_for_training(Provenance p) {
    return p == Provenance::human || p == Provenance::approved;
}

struct TrainingExample {
    std::string text;
    std::string locale;
    Provenance provenance = Provenance::human;

    bool operator==(const TrainingExample&) const = default;
};

struct IntentDef {
    std::string name;
    std::string description;        // human-readable, used by disambiguation prompts
    std::string response_template;  // empty for form-triggering intents
    std::vector<TrainingExample> examples;

    bool operator==(const IntentDef&) const = default;
};

enum class EntityKind { pattern, gazetteer };

/// Value normalizers for the built-in pattern entities.
enum class Normalizer { none, digits, amount, date };

std::string_view to_string(EntityKind k);
std::string_view to_string(Normalizer n);

struct GazetteerValue {
    std::string canonical;
    std::vector<std::string> synonyms;

    bool operator==(const GazetteerValue&) const = default;
};

struct EntityDef {
    std::string name;
    EntityKind kind = EntityKind::gazetteer;
    std::string pattern;  // pattern kind only (ECMAScript regex)
    bool case_insensitive = false;
    Normalizer normalizer = Normalizer::none;
    std::vector<GazetteerValue> values;  // gazetteer kind only

    bool operator==(const EntityDef&) const = default;
};

struct SlotDef {
    std::string name;
    std::string entity_type;
    std::string prompt_template;
    bool required = true;

    bool operator==(const SlotDef&) const = default;
};

struct FormDef {
    std::string name;
    std::string trigger_intent;
    std::vector<SlotDef> slots;
    std::string completion_template;
    std::string resume_template;
    bool confirm_required = false;
    std::string confirmation_template;  // one-line summary of the filled form

    bool operator==(const FormDef&) const = default;

    std::vector<std::string> required_slots() const;
    const SlotDef* slot(std::string_view name) const;
};

struct TemplateVariant {
    std::string locale;
    std::string persona;  // empty = default persona
    std::vector<std::string> texts;

    bool operator==(const TemplateVariant&) const = default;
};

struct ResponseTemplate {
    std::string key;
    std::vector<TemplateVariant> variants;
    std::string rephrase_directive;  // non-empty enables the rephrase booster

    bool operator==(const ResponseTemplate&) const = default;

    /// Union of placeholder names over all variant texts.
    std::set<std::string> placeholders() const;
};

struct PersonaDef {
    std::string role_description;
    std::vector<std::string> traits;
    std::vector<std::string> style_tags;
    std::map<std::string, std::string> style_directives;  // tag -> rephrase directive

    bool operator==(const PersonaDef&) const = default;
};

struct ClosedQAPolicy {
    std::vector<std::string> answers;
    std::string default_answer;
    std::string prompt_template = "closed_qa";

    bool operator==(const ClosedQAPolicy&) const = default;
};

struct ThresholdConfig {
    double tau_intent = 0.55;
    double tau_oos = 0.35;
    int max_fallbacks_before_handoff = 3;

    bool operator==(const ThresholdConfig&) const = default;
};

/// Dialog-policy knobs and the system template keys the dialog manager emits.
struct DialogConfig {
    int max_stack_depth = 4;
    std::string confirm_entity;  // gazetteer entity carrying affirm/deny values
    std::string affirm_value = "yes";
    std::string deny_value = "no";
    std::string abort_intent;  // optional: pops the active frame
    std::string fallback_template = "fallback";
    std::string confirm_request_template = "confirm_request";
    std::string confirm_accepted_template = "confirm_accepted";
    std::string confirm_rejected_template = "confirm_rejected";
    std::string stack_full_template = "stack_full";
    std::string handoff_template = "handoff_notice";
    std::string frame_aborted_template = "frame_aborted";
    std::string disambiguation_template = "disambiguation_fallback";

    bool operator==(const DialogConfig&) const = default;

    std::vector<std::string> template_keys() const;
};

struct BoosterConfig {
    bool autocorrect = true;
    bool out_of_scope = true;
    bool disambiguation = true;
    bool closed_qa = true;

    bool operator==(const BoosterConfig&) const = default;
};

/// LLM provider selection. The credential itself is never stored, only the
/// name of the environment variable holding it.
struct ProviderSettings {
    std::string kind = "mock";  // mock | http
    std::string endpoint;
    std::string model;
    std::string credential_env = "LLM_API_KEY";
    int timeout_ms = 30000;
    int max_retries = 2;
    std::string fixtures;  // relative to the project directory
    bool strict = true;

    bool operator==(const ProviderSettings&) const = default;
};

struct PromptOverride {
    std::string id;
    std::string system;
    std::string body;

    bool operator==(const PromptOverride&) const = default;
};

struct ProjectConfig {
    int schema_version = 1;
    std::string name;
    std::string domain;
    std::vector<std::string> locales;  // default first
    std::vector<IntentDef> intents;
    std::vector<EntityDef> entities;
    std::vector<FormDef> forms;
    std::vector<ResponseTemplate> templates;
    PersonaDef persona;
    ClosedQAPolicy closed_qa;
    ThresholdConfig thresholds;
    DialogConfig dialog;
    BoosterConfig boosters;
    ProviderSettings provider;
    std::vector<PromptOverride> prompts;

    bool operator==(const ProjectConfig&) const = default;

    const std::string& default_locale() const { return locales.front(); }

    const IntentDef* intent(std::string_view name) const;
    IntentDef* intent(std::string_view name);
    const EntityDef* entity(std::string_view name) const;
    EntityDef* entity(std::string_view name);
    const FormDef* form(std::string_view name) const;
    const FormDef* form_for_intent(std::string_view intent) const;
    const ResponseTemplate* template_for(std::string_view key) const;
    ResponseTemplate* template_for(std::string_view key);
    bool has_locale(std::string_view tag) const;
};

enum class Severity { error, warning };

struct Violation {
    std::string code;  // e.g. "unknown-entity", "untrainable-intent"
    std::string where;
    std::string message;
    Severity severity = Severity::error;

    std::string to_string() const;
};

/// Checks every invariant and reports all violations. Never throws.
std::vector<Violation> validate(const ProjectConfig& config);

/// Loads and validates a project directory. Throws Error(MissingFile | ParseError |
/// ValidationError); ValidationError details list every error-severity violation.
ProjectConfig load_project(const std::filesystem::path& dir);

/// Writes every project file atomically (temp file then rename). Throws Error(IoError).
void save_project(const ProjectConfig& config, const std::filesystem::path& dir);

/// Atomic text-file write used for all project and staging files.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// English display name for a locale tag ("de-CH-x-dialect" -> "Swiss German").
std::string locale_display_name(std::string_view tag);

}  // namespace ca
