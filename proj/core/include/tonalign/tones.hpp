#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tonalign/segmentation.hpp"

namespace tonalign {

/// One of the four Mandarin citation tones, or 5 for the neutral tone.
class Tone {
public:
    explicit Tone(int value);
    int value() const { return value_; }
    bool is_neutral() const { return value_ == 5; }
    bool operator==(const Tone&) const = default;

    static constexpr int kMin = 1;
    static constexpr int kMax = 5;

private:
    int value_;
};

/// Direction of a pitch move between two successive notes.
enum class TransitionCategory : std::uint8_t {
    Level = 0,
    StepUp,
    JumpUp,
    StepDown,
    JumpDown,
};
constexpr int kTransitionCategoryCount = 5;

std::string_view to_string(TransitionCategory category);

/// Classifies the move from one pitch to the next. Rises and falls of at
/// most step_max semitones are steps, larger moves are jumps.
TransitionCategory classify_transition(int pitch_prev, int pitch_next, int step_max);

/// Acceptable note transitions for each ordered pair of tones sung on
/// successive same-word syllables. Complete over all 25 pairs.
class TransitionTable {
public:
    /// Every category acceptable for every pair.
    static TransitionTable permissive();
    /// TSV: `tone_prev<TAB>tone_next<TAB>cat,cat,...` per line, '#' comments.
    /// Checks completeness (all 25 pairs, no empty set) at load.
    static TransitionTable load(std::istream& in);

    bool acceptable(Tone prev, Tone next, TransitionCategory category) const;
    void set(Tone prev, Tone next, TransitionCategory category, bool value);
    bool complete() const;

private:
    // bitmask of TransitionCategory per ordered tone pair
    std::array<std::array<std::uint8_t, 5>, 5> bits_{};
};

bool transition_acceptable(Tone prev, Tone next, TransitionCategory category,
                           const TransitionTable& table);

/// Citation tone lookup for characters and multi-character words. Word
/// entries carry one tone per syllable and take precedence over per-character
/// entries during annotation. The first listed tone wins for heteronyms.
class ToneLexicon {
public:
    /// TSV: `entry<TAB>pinyin<TAB>tones` per line ("3" or "2,3"), '#' comments.
    static ToneLexicon load(std::istream& in);
    static ToneLexicon from_entries(
        const std::vector<std::pair<std::string, std::vector<int>>>& entries);

    bool contains(const std::string& character) const;
    /// Citation (pre-sandhi) tone; throws LookupError for unknown characters.
    Tone lookup(const std::string& character) const;

    /// Citation tones for a syllable sequence, applying word-level entries
    /// over the given spans where available.
    std::vector<Tone> annotate(std::span<const std::string> syllables,
                               std::span<const WordSpan> words) const;

    /// All single-character entries in byte order (stable across runs).
    std::vector<std::string> characters() const;

    std::size_t size() const { return char_tones_.size() + word_tones_.size(); }

private:
    std::unordered_map<std::string, int> char_tones_;
    std::unordered_map<std::string, std::vector<int>> word_tones_;
};

/// Third-tone sandhi: one left-to-right pass per word turns tone 3 before
/// tone 3 into tone 2 on the left syllable. Spans must partition the input.
std::vector<Tone> apply_sandhi(std::vector<Tone> tones, std::span<const WordSpan> words);

}  // namespace tonalign
