#include "ca/placeholder.hpp"

#include "ca/error.hpp"

#include <algorithm>
#include <cctype>

namespace ca::placeholder {

namespace {

bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Walks the text once; calls on_literal / on_placeholder. Returns false on malformed input.
template <typename Lit, typename Ph>
bool scan(std::string_view text, Lit&& on_literal, Ph&& on_placeholder) {
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == '{') {
            if (i + 1 < text.size() && text[i + 1] == '{') {
                on_literal('{');
                i += 2;
                continue;
            }
            auto close = text.find('}', i + 1);
            if (close == std::string_view::npos) return false;
            auto name = text.substr(i + 1, close - i - 1);
            if (name.empty() || !std::all_of(name.begin(), name.end(), is_name_char)) return false;
            on_placeholder(std::string(name));
            i = close + 1;
        } else if (c == '}') {
            if (i + 1 < text.size() && text[i + 1] == '}') {
                on_literal('}');
                i += 2;
                continue;
            }
            return false;
        } else {
            on_literal(c);
            ++i;
        }
    }
    return true;
}

}  // namespace

std::optional<std::vector<std::string>> parse(std::string_view text) {
    std::vector<std::string> names;
    bool ok = scan(
        text, [](char) {},
        [&](std::string name) {
            if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(std::move(name));
        });
    if (!ok) return std::nullopt;
    return names;
}

std::string substitute(std::string_view text, const Bindings& bindings) {
    std::string out;
    out.reserve(text.size());
    std::string missing;
    bool ok = scan(
        text, [&](char c) { out.push_back(c); },
        [&](const std::string& name) {
            auto it = bindings.find(name);
            if (it == bindings.end()) {
                if (missing.empty()) missing = name;
                return;
            }
            out.append(it->second);
        });
    if (!ok) throw Error(ErrorKind::ParseError, "malformed placeholder syntax in \"" + std::string(text) + "\"");
    if (!missing.empty()) throw Error(ErrorKind::MissingBinding, missing, {missing});
    return out;
}

}  // namespace ca::placeholder
