#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 text helpers. Offsets are in Unicode code points unless stated.
namespace ca::text {

std::string nfc(std::string_view utf8);
std::string lower(std::string_view utf8);

std::string trim(std::string_view s);
std::string trim_right(std::string_view s);
/// NFC, trim, and collapse every internal whitespace run to one space.
std::string squash_whitespace(std::string_view utf8);

struct Token {
    std::string text;  // lowercased
    std::size_t start = 0;
    std::size_t end = 0;
};

/// Lowercased alphanumeric runs of an already-NFC string.
std::vector<Token> tokenize(std::string_view nfc_utf8);

std::size_t length(std::string_view utf8);
std::string substr(std::string_view utf8, std::size_t start, std::size_t end);
std::size_t codepoint_offset(std::string_view utf8, std::size_t byte_offset);

std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::vector<std::string> split_lines(std::string_view s);
bool starts_with_icase(std::string_view s, std::string_view prefix);

/// Lowercase snake_case identifier from free text ("Check account balance" -> check_account_balance).
std::string slugify(std::string_view s);

std::string sha256_hex(std::string_view data);

}  // namespace ca::text
