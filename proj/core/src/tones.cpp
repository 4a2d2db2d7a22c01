#include "tonalign/tones.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <sstream>

#include "tonalign/errors.hpp"
#include "tonalign/utf8.hpp"

namespace tonalign {

Tone::Tone(int value) : value_(value) {
    if (value < kMin || value > kMax) {
        throw Error("tone out of range: " + std::to_string(value));
    }
}

std::string_view to_string(TransitionCategory category) {
    switch (category) {
        case TransitionCategory::Level: return "level";
        case TransitionCategory::StepUp: return "step_up";
        case TransitionCategory::JumpUp: return "jump_up";
        case TransitionCategory::StepDown: return "step_down";
        case TransitionCategory::JumpDown: return "jump_down";
    }
    return "?";
}

TransitionCategory classify_transition(int pitch_prev, int pitch_next, int step_max) {
    if (step_max < 1) throw Error("step_max must be >= 1");
    const int delta = pitch_next - pitch_prev;
    if (delta == 0) return TransitionCategory::Level;
    if (delta > 0) {
        return delta <= step_max ? TransitionCategory::StepUp : TransitionCategory::JumpUp;
    }
    return -delta <= step_max ? TransitionCategory::StepDown : TransitionCategory::JumpDown;
}

namespace {

TransitionCategory category_from_string(std::string_view name) {
    if (name == "level") return TransitionCategory::Level;
    if (name == "step_up") return TransitionCategory::StepUp;
    if (name == "jump_up") return TransitionCategory::JumpUp;
    if (name == "step_down") return TransitionCategory::StepDown;
    if (name == "jump_down") return TransitionCategory::JumpDown;
    throw ParseError("unknown transition category: \"" + std::string(name) + "\"");
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(text.substr(start));
            return out;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

int parse_tone_digit(const std::string& text, const std::string& where) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || v < Tone::kMin ||
        v > Tone::kMax) {
        throw ParseError(where + ": bad tone \"" + text + "\"");
    }
    return v;
}

}  // namespace

TransitionTable TransitionTable::permissive() {
    TransitionTable table;
    for (auto& row : table.bits_) row.fill(0x1F);
    return table;
}

TransitionTable TransitionTable::load(std::istream& in) {
    TransitionTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split(line, '\t');
        if (fields.size() != 3) {
            throw ParseError("transition table line " + std::to_string(line_no) +
                             ": expected 3 tab-separated fields");
        }
        const std::string where = "transition table line " + std::to_string(line_no);
        const Tone prev{parse_tone_digit(fields[0], where)};
        const Tone next{parse_tone_digit(fields[1], where)};
        for (const auto& name : split(fields[2], ',')) {
            table.set(prev, next, category_from_string(name), true);
        }
    }
    if (!table.complete()) {
        throw ParseError("transition table incomplete: all 25 tone pairs need a non-empty "
                         "category set");
    }
    return table;
}

bool TransitionTable::acceptable(Tone prev, Tone next, TransitionCategory category) const {
    return bits_[prev.value() - 1][next.value() - 1] &
           (1u << static_cast<std::uint8_t>(category));
}

void TransitionTable::set(Tone prev, Tone next, TransitionCategory category, bool value) {
    auto& mask = bits_[prev.value() - 1][next.value() - 1];
    const std::uint8_t bit = 1u << static_cast<std::uint8_t>(category);
    if (value) {
        mask |= bit;
    } else {
        mask &= static_cast<std::uint8_t>(~bit);
    }
}

bool TransitionTable::complete() const {
    for (const auto& row : bits_) {
        for (const auto mask : row) {
            if (mask == 0) return false;
        }
    }
    return true;
}

bool transition_acceptable(Tone prev, Tone next, TransitionCategory category,
                           const TransitionTable& table) {
    return table.acceptable(prev, next, category);
}

ToneLexicon ToneLexicon::load(std::istream& in) {
    ToneLexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split(line, '\t');
        if (fields.size() != 3) {
            throw ParseError("tone lexicon line " + std::to_string(line_no) +
                             ": expected entry<TAB>pinyin<TAB>tones");
        }
        const std::string where = "tone lexicon line " + std::to_string(line_no);
        const auto chars = utf8_chars(fields[0]);
        if (chars.empty()) throw ParseError(where + ": empty entry");
        std::vector<int> tones;
        for (const auto& t : split(fields[2], ',')) tones.push_back(parse_tone_digit(t, where));
        if (tones.size() != chars.size()) {
            throw ParseError(where + ": " + std::to_string(tones.size()) + " tones for " +
                             std::to_string(chars.size()) + " characters");
        }
        if (chars.size() == 1) {
            lex.char_tones_.try_emplace(fields[0], tones[0]);  // first listed wins
        } else {
            lex.word_tones_.try_emplace(fields[0], std::move(tones));
        }
    }
    return lex;
}

ToneLexicon ToneLexicon::from_entries(
    const std::vector<std::pair<std::string, std::vector<int>>>& entries) {
    ToneLexicon lex;
    for (const auto& [entry, tones] : entries) {
        const auto chars = utf8_chars(entry);
        if (chars.size() != tones.size()) {
            throw Error("tone entry \"" + entry + "\": tone count mismatch");
        }
        for (int t : tones) Tone{t};  // range check
        if (chars.size() == 1) {
            lex.char_tones_.try_emplace(entry, tones[0]);
        } else {
            lex.word_tones_.try_emplace(entry, tones);
        }
    }
    return lex;
}

bool ToneLexicon::contains(const std::string& character) const {
    return char_tones_.contains(character);
}

Tone ToneLexicon::lookup(const std::string& character) const {
    const auto it = char_tones_.find(character);
    if (it == char_tones_.end()) {
        throw LookupError("no tone entry for \"" + character + "\"");
    }
    return Tone{it->second};
}

std::vector<Tone> ToneLexicon::annotate(std::span<const std::string> syllables,
                                        std::span<const WordSpan> words) const {
    std::vector<Tone> tones;
    tones.reserve(syllables.size());
    for (const auto& span : words) {
        std::string word;
        for (std::size_t i = span.begin; i < span.end; ++i) word += syllables[i];
        const auto it = word_tones_.find(word);
        if (span.end - span.begin > 1 && it != word_tones_.end()) {
            for (int t : it->second) tones.push_back(Tone{t});
        } else {
            for (std::size_t i = span.begin; i < span.end; ++i) {
                tones.push_back(lookup(syllables[i]));
            }
        }
    }
    return tones;
}

std::vector<std::string> ToneLexicon::characters() const {
    std::vector<std::string> out;
    out.reserve(char_tones_.size());
    for (const auto& [ch, tone] : char_tones_) out.push_back(ch);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Tone> apply_sandhi(std::vector<Tone> tones, std::span<const WordSpan> words) {
    std::size_t expected = 0;
    for (const auto& span : words) {
        if (span.begin != expected || span.end <= span.begin || span.end > tones.size()) {
            throw Error("word spans do not partition the syllables");
        }
        expected = span.end;
    }
    if (expected != tones.size()) throw Error("word spans do not partition the syllables");

    for (const auto& span : words) {
        for (std::size_t i = span.begin; i + 1 < span.end; ++i) {
            if (tones[i].value() == 3 && tones[i + 1].value() == 3) {
                tones[i] = Tone{2};
            }
        }
    }
    return tones;
}

}  // namespace tonalign
