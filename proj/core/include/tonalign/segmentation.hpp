#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace tonalign {

/// Half-open range [begin, end) of syllable positions making up one word.
struct WordSpan {
    std::size_t begin;
    std::size_t end;

    bool operator==(const WordSpan&) const = default;
};

/// Dictionary for forward maximum-match segmentation. An empty dictionary is
/// legal and degenerates to single-character words.
class SegLexicon {
public:
    SegLexicon() = default;
    static SegLexicon from_words(const std::vector<std::string>& words);
    /// One word per line, UTF-8, '#' comments.
    static SegLexicon load(std::istream& in);

    bool contains(const std::string& word) const { return words_.contains(word); }
    std::size_t max_word_chars() const { return max_word_chars_; }
    std::size_t size() const { return words_.size(); }

private:
    std::unordered_set<std::string> words_;
    std::size_t max_word_chars_ = 1;
};

/// Forward maximum match: at each position take the longest dictionary word
/// starting there, else a single character. Spans partition the input.
std::vector<WordSpan> segment(std::span<const std::string> chars, const SegLexicon& lexicon);

bool same_word(std::span<const WordSpan> spans, std::size_t left, std::size_t right);

/// Probability that a word boundary separates chars[i-1] and chars[i]:
/// 1.0 on a segmentation boundary, epsilon inside a word. Requires 1 <= i < n.
double boundary_prob(std::span<const std::string> chars, std::size_t i,
                     const SegLexicon& lexicon, double epsilon);

}  // namespace tonalign
