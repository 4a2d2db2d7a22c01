#include "tonalign/segmentation.hpp"

#include <algorithm>
#include <istream>

#include "tonalign/errors.hpp"
#include "tonalign/utf8.hpp"

namespace tonalign {

SegLexicon SegLexicon::from_words(const std::vector<std::string>& words) {
    SegLexicon lex;
    for (const auto& w : words) {
        if (w.empty()) continue;
        lex.max_word_chars_ = std::max(lex.max_word_chars_, utf8_chars(w).size());
        lex.words_.insert(w);
    }
    return lex;
}

SegLexicon SegLexicon::load(std::istream& in) {
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        words.push_back(line);
    }
    return from_words(words);
}

std::vector<WordSpan> segment(std::span<const std::string> chars, const SegLexicon& lexicon) {
    std::vector<WordSpan> spans;
    std::size_t pos = 0;
    while (pos < chars.size()) {
        std::size_t taken = 1;
        const std::size_t longest = std::min(lexicon.max_word_chars(), chars.size() - pos);
        for (std::size_t len = longest; len >= 2; --len) {
            std::string word;
            for (std::size_t k = 0; k < len; ++k) word += chars[pos + k];
            if (lexicon.contains(word)) {
                taken = len;
                break;
            }
        }
        spans.push_back(WordSpan{pos, pos + taken});
        pos += taken;
    }
    return spans;
}

bool same_word(std::span<const WordSpan> spans, std::size_t left, std::size_t right) {
    for (const auto& s : spans) {
        if (left >= s.begin && left < s.end) return right >= s.begin && right < s.end;
    }
    return false;
}

double boundary_prob(std::span<const std::string> chars, std::size_t i,
                     const SegLexicon& lexicon, double epsilon) {
    if (i < 1 || i >= chars.size()) {
        throw Error("boundary_prob: position " + std::to_string(i) + " out of range [1, " +
                    std::to_string(chars.size()) + ")");
    }
    const auto spans = segment(chars, lexicon);
    return same_word(spans, i - 1, i) ? epsilon : 1.0;
}

}  // namespace tonalign
