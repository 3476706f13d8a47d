#pragma once

#include "ca/placeholder.hpp"
#include "ca/project.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace ca::nlg {

struct RenderRequest {
    std::string key;
    placeholder::Bindings bindings;
    std::string locale;   // empty = default locale
    std::string persona;  // empty = default persona
    std::optional<std::size_t> variant_index;
};

/// Variant for (locale, persona). Locale falls back to the default locale and
/// persona to the default persona. Throws Error(UnknownTemplate).
const TemplateVariant& select_variant(const ProjectConfig& config, std::string_view key, std::string_view locale,
                                      std::string_view persona);

/// True when the selected variant was authored for exactly this persona tag.
bool has_persona_variant(const ProjectConfig& config, std::string_view key, std::string_view locale,
                         std::string_view persona);

std::size_t variant_count(const ProjectConfig& config, std::string_view key, std::string_view locale = {},
                          std::string_view persona = {});

/// Throws Error(UnknownTemplate) or Error(MissingBinding).
std::string render(const ProjectConfig& config, const RenderRequest& request);

/// Renders the slot's prompt template with the already-filled slot values bound.
/// Throws Error(UnknownTemplate) for an unknown form or slot.
std::string render_slot_prompt(const ProjectConfig& config, std::string_view form, std::string_view slot,
                               const std::map<std::string, std::string>& filled, std::string_view locale = {},
                               std::string_view persona = {});

}  // namespace ca::nlg
