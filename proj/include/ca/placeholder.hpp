#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// `{name}` placeholder syntax shared by response templates and prompt bodies.
// Literal braces are written doubled: `{{` and `}}`.
namespace ca::placeholder {

using Bindings = std::map<std::string, std::string>;

/// Placeholder names in order of first appearance; nullopt when the text is malformed.
std::optional<std::vector<std::string>> parse(std::string_view text);

/// Substitutes every placeholder exactly once; bound values are never re-scanned.
/// Throws Error(MissingBinding) or Error(ParseError) on malformed text.
std::string substitute(std::string_view text, const Bindings& bindings);

}  // namespace ca::placeholder
