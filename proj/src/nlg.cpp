#include "ca/nlg.hpp"

#include "ca/error.hpp"

#include <algorithm>

namespace ca::nlg {

namespace {

const TemplateVariant* find_variant(const ResponseTemplate& t, std::string_view locale, std::string_view persona) {
    for (const auto& v : t.variants)
        if (v.locale == locale && v.persona == persona) return &v;
    return nullptr;
}

const ResponseTemplate& lookup(const ProjectConfig& config, std::string_view key) {
    const ResponseTemplate* t = config.template_for(key);
    if (!t) throw Error(ErrorKind::UnknownTemplate, std::string(key), {std::string(key)});
    return *t;
}

}  // namespace

const TemplateVariant& select_variant(const ProjectConfig& config, std::string_view key, std::string_view locale,
                                      std::string_view persona) {
    const auto& t = lookup(config, key);
    const std::string_view fallback_locale = config.locales.empty() ? std::string_view{} : config.default_locale();
    for (std::string_view loc : {locale.empty() ? fallback_locale : locale, fallback_locale}) {
        if (!persona.empty())
            if (const auto* v = find_variant(t, loc, persona)) return *v;
        if (const auto* v = find_variant(t, loc, "")) return *v;
    }
    if (!t.variants.empty()) return t.variants.front();
    throw Error(ErrorKind::UnknownTemplate, std::string(key) + " has no variants", {std::string(key)});
}

bool has_persona_variant(const ProjectConfig& config, std::string_view key, std::string_view locale,
                         std::string_view persona) {
    if (persona.empty()) return true;
    return select_variant(config, key, locale, persona).persona == persona;
}

std::size_t variant_count(const ProjectConfig& config, std::string_view key, std::string_view locale,
                          std::string_view persona) {
    return select_variant(config, key, locale, persona).texts.size();
}

std::string render(const ProjectConfig& config, const RenderRequest& request) {
    const auto& variant = select_variant(config, request.key, request.locale, request.persona);
    if (variant.texts.empty())
        throw Error(ErrorKind::UnknownTemplate, request.key + " has an empty variant", {request.key});
    const std::size_t index = std::min(request.variant_index.value_or(0), variant.texts.size() - 1);
    return placeholder::substitute(variant.texts[index], request.bindings);
}

std::string render_slot_prompt(const ProjectConfig& config, std::string_view form, std::string_view slot,
                               const std::map<std::string, std::string>& filled, std::string_view locale,
                               std::string_view persona) {
    const FormDef* f = config.form(form);
    const SlotDef* s = f ? f->slot(slot) : nullptr;
    if (!s)
        throw Error(ErrorKind::UnknownTemplate, "no prompt for slot " + std::string(form) + "." + std::string(slot),
                    {std::string(slot)});
    RenderRequest request;
    request.key = s->prompt_template;
    request.bindings = filled;
    request.locale = std::string(locale);
    request.persona = std::string(persona);
    return render(config, request);
}

}  // namespace ca::nlg
