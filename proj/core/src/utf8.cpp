#include "tonalign/utf8.hpp"

#include <cctype>

#include "tonalign/errors.hpp"

namespace tonalign {

namespace {

int sequence_length(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead >> 5) == 0x6) return 2;
    if ((lead >> 4) == 0xE) return 3;
    if ((lead >> 3) == 0x1E) return 4;
    return 0;
}

}  // namespace

std::vector<std::string> utf8_chars(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const int len = sequence_length(static_cast<unsigned char>(text[i]));
        if (len == 0 || i + len > text.size()) {
            throw ParseError("malformed UTF-8 at byte " + std::to_string(i));
        }
        for (int k = 1; k < len; ++k) {
            if ((static_cast<unsigned char>(text[i + k]) >> 6) != 0x2) {
                throw ParseError("malformed UTF-8 at byte " + std::to_string(i + k));
            }
        }
        out.emplace_back(text.substr(i, len));
        i += len;
    }
    return out;
}

std::uint32_t utf8_codepoint(std::string_view text) {
    if (text.empty()) return 0;
    const unsigned char c0 = static_cast<unsigned char>(text[0]);
    const int len = sequence_length(c0);
    if (len == 0 || text.size() < static_cast<std::size_t>(len)) return 0;
    switch (len) {
        case 1: return c0;
        case 2: return ((c0 & 0x1Fu) << 6) | (text[1] & 0x3Fu);
        case 3: return ((c0 & 0x0Fu) << 12) | ((text[1] & 0x3Fu) << 6) | (text[2] & 0x3Fu);
        default:
            return ((c0 & 0x07u) << 18) | ((text[1] & 0x3Fu) << 12) | ((text[2] & 0x3Fu) << 6) |
                   (text[3] & 0x3Fu);
    }
}

bool is_punctuation_token(std::string_view token) {
    if (token.size() == 1) {
        const char c = token[0];
        return c == ',' || c == '.' || c == '!' || c == '?' || c == ';' || c == ':';
    }
    const std::uint32_t cp = utf8_codepoint(token);
    switch (cp) {
        case 0x3001:  // 、
        case 0x3002:  // 。
        case 0xFF0C:  // ，
        case 0xFF01:  // ！
        case 0xFF1F:  // ？
        case 0xFF1B:  // ；
        case 0xFF1A:  // ：
        case 0x2026:  // …
            return true;
        default:
            return false;
    }
}

std::vector<std::string> split_whitespace(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        if (j > i) out.emplace_back(text.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace tonalign
