#include "ca/text.hpp"

#include <openssl/evp.h>
#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <array>
#include <cctype>
#include <stdexcept>

namespace ca::text {

namespace {

bool is_space(UChar32 c) { return u_isUWhiteSpace(c) != 0; }

template <typename Fn>
void for_each_codepoint(std::string_view s, Fn&& fn) {
    const auto* p = reinterpret_cast<const uint8_t*>(s.data());
    const auto n = static_cast<int32_t>(s.size());
    int32_t i = 0;
    while (i < n) {
        int32_t begin = i;
        UChar32 c;
        U8_NEXT(p, i, n, c);
        fn(c, static_cast<std::size_t>(begin), static_cast<std::size_t>(i));
    }
}

}  // namespace

std::string nfc(std::string_view utf8) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
    auto src = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    icu::UnicodeString out = norm->normalize(src, status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalization failed");
    std::string result;
    out.toUTF8String(result);
    return result;
}

std::string lower(std::string_view utf8) {
    auto s = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    s.toLower(icu::Locale::getRoot());
    std::string result;
    s.toUTF8String(result);
    return result;
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    return trim_right(s.substr(b));
}

std::string trim_right(std::string_view s) {
    std::size_t n = s.size();
    while (n > 0 && std::isspace(static_cast<unsigned char>(s[n - 1]))) --n;
    return std::string(s.substr(0, n));
}

std::string squash_whitespace(std::string_view utf8) {
    const std::string normalized = nfc(utf8);
    std::string out;
    bool pending_space = false;
    for_each_codepoint(normalized, [&](UChar32 c, std::size_t b, std::size_t e) {
        if (is_space(c)) {
            pending_space = !out.empty();
            return;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.append(normalized, b, e - b);
    });
    return out;
}

std::vector<Token> tokenize(std::string_view nfc_utf8) {
    std::vector<Token> tokens;
    std::size_t cp = 0;
    std::size_t run_start_byte = 0, run_start_cp = 0;
    bool in_run = false;
    auto flush = [&](std::size_t end_byte) {
        if (!in_run) return;
        tokens.push_back({lower(nfc_utf8.substr(run_start_byte, end_byte - run_start_byte)), run_start_cp, cp});
        in_run = false;
    };
    for_each_codepoint(nfc_utf8, [&](UChar32 c, std::size_t b, std::size_t) {
        const bool alnum = u_isalnum(c) != 0 || u_hasBinaryProperty(c, UCHAR_ALPHABETIC) != 0;
        if (alnum && !in_run) {
            in_run = true;
            run_start_byte = b;
            run_start_cp = cp;
        } else if (!alnum) {
            flush(b);
        }
        ++cp;
    });
    flush(nfc_utf8.size());
    return tokens;
}

std::size_t length(std::string_view utf8) {
    std::size_t n = 0;
    for_each_codepoint(utf8, [&](UChar32, std::size_t, std::size_t) { ++n; });
    return n;
}

std::string substr(std::string_view utf8, std::size_t start, std::size_t end) {
    std::size_t cp = 0, begin_byte = utf8.size(), end_byte = utf8.size();
    for_each_codepoint(utf8, [&](UChar32, std::size_t b, std::size_t) {
        if (cp == start) begin_byte = b;
        if (cp == end) end_byte = b;
        ++cp;
    });
    if (begin_byte > end_byte) return {};
    return std::string(utf8.substr(begin_byte, end_byte - begin_byte));
}

std::size_t codepoint_offset(std::string_view utf8, std::size_t byte_offset) {
    std::size_t cp = 0;
    for_each_codepoint(utf8, [&](UChar32, std::size_t b, std::size_t) {
        if (b < byte_offset) ++cp;
    });
    return cp;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

std::vector<std::string> split_lines(std::string_view s) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        auto nl = s.find('\n', pos);
        if (nl == std::string_view::npos) nl = s.size();
        std::string line(s.substr(pos, nl - pos));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        pos = nl + 1;
    }
    return lines;
}

bool starts_with_icase(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) != std::tolower(static_cast<unsigned char>(prefix[i])))
            return false;
    }
    return true;
}

std::string slugify(std::string_view s) {
    std::vector<std::string> words;
    for (auto& t : tokenize(nfc(s))) words.push_back(t.text);
    return join(words, "_");
}

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

}  // namespace ca::text
