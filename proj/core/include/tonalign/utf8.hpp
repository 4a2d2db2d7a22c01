#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tonalign {

/// Splits UTF-8 text into one string per code point. Throws ParseError on
/// malformed byte sequences.
std::vector<std::string> utf8_chars(std::string_view text);

/// Decodes the single code point at the start of `text`; 0 on malformed input.
std::uint32_t utf8_codepoint(std::string_view text);

/// CJK and ASCII sentence punctuation. Punctuation tokens attach to the
/// preceding syllable and never consume a note group.
bool is_punctuation_token(std::string_view token);

/// Splits on ASCII whitespace runs.
std::vector<std::string> split_whitespace(std::string_view text);

}  // namespace tonalign
