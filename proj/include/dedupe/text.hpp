#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dedupe {

/// Decoded Unicode scalar sequence. Invalid UTF-8 bytes are mapped to
/// distinct code points above U+10FFFF so decoding never loses information.
using CodePoints = std::vector<char32_t>;

inline CodePoints decode_utf8(std::string_view s) {
    CodePoints out;
    out.reserve(s.size());
    std::size_t i = 0;
    const auto bad = [&](unsigned char b) { out.push_back(static_cast<char32_t>(0x110000u + b)); };
    while (i < s.size()) {
        const unsigned char b0 = static_cast<unsigned char>(s[i]);
        if (b0 < 0x80u) {
            out.push_back(b0);
            ++i;
            continue;
        }
        int len = 0;
        char32_t cp = 0;
        if ((b0 & 0xE0u) == 0xC0u) { len = 2; cp = b0 & 0x1Fu; }
        else if ((b0 & 0xF0u) == 0xE0u) { len = 3; cp = b0 & 0x0Fu; }
        else if ((b0 & 0xF8u) == 0xF0u) { len = 4; cp = b0 & 0x07u; }
        else { bad(b0); ++i; continue; }
        if (i + static_cast<std::size_t>(len) > s.size()) { bad(b0); ++i; continue; }
        bool ok = true;
        for (int k = 1; k < len; ++k) {
            const unsigned char bk = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
            if ((bk & 0xC0u) != 0x80u) { ok = false; break; }
            cp = (cp << 6) | (bk & 0x3Fu);
        }
        // Reject overlong forms, surrogates and out-of-range values.
        if (ok) {
            if (len == 2 && cp < 0x80u) ok = false;
            if (len == 3 && cp < 0x800u) ok = false;
            if (len == 4 && (cp < 0x10000u || cp > 0x10FFFFu)) ok = false;
            if (cp >= 0xD800u && cp <= 0xDFFFu) ok = false;
        }
        if (!ok) { bad(b0); ++i; continue; }
        out.push_back(cp);
        i += static_cast<std::size_t>(len);
    }
    return out;
}

inline bool is_ascii_space(char32_t c) {
    return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v';
}

/// Whitespace-delimited tokens of a decoded string.
inline std::vector<CodePoints> tokenize(const CodePoints& s) {
    std::vector<CodePoints> tokens;
    CodePoints cur;
    for (char32_t c : s) {
        if (is_ascii_space(c)) {
            if (!cur.empty()) { tokens.push_back(cur); cur.clear(); }
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    return tokens;
}

/// ASCII digits of s, everything else dropped.
inline std::string digits_only(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c >= '0' && c <= '9') out.push_back(c);
    }
    return out;
}

/// ASCII lowercase; non-ASCII bytes pass through untouched.
inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

/// First k code points of a UTF-8 string, re-encoded as the original bytes.
inline std::string utf8_prefix(std::string_view s, std::size_t k) {
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < s.size() && count < k) {
        const unsigned char b = static_cast<unsigned char>(s[i]);
        std::size_t len = 1;
        if ((b & 0xE0u) == 0xC0u) len = 2;
        else if ((b & 0xF0u) == 0xE0u) len = 3;
        else if ((b & 0xF8u) == 0xF0u) len = 4;
        if (i + len > s.size()) len = 1;
        i += len;
        ++count;
    }
    return std::string(s.substr(0, i));
}

/// True when s is empty or consists only of ASCII whitespace.
inline bool is_blank(std::string_view s) {
    for (char c : s) {
        if (!is_ascii_space(static_cast<char32_t>(static_cast<unsigned char>(c)))) return false;
    }
    return true;
}

} // namespace dedupe
