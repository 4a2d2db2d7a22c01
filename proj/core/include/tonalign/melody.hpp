#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tonalign/rational.hpp"

namespace tonalign {

/// The notes a single target syllable is sung on. Pitches use MIDI numbering
/// (C4 == 60, 1 == one semitone); durations are exact (1 == quarter note).
struct NoteGroup {
    std::vector<int> pitches;
    std::vector<Rational> durations;

    std::size_t note_count() const { return pitches.size(); }
    int first_pitch() const { return pitches.front(); }
    Rational total_duration() const;
};

/// One lyric line of melody: note groups in order, plus the duration of the
/// rest immediately before each group (zero when none).
struct MelodyLine {
    std::vector<NoteGroup> groups;
    std::vector<Rational> rests;

    std::size_t size() const { return groups.size(); }
    std::size_t total_notes() const;
    Rational total_duration() const;
    Rational total_rest() const;

    /// Checks the structural invariants; throws ParseError naming the first
    /// offending group and field.
    void validate() const;
};

/// Evaluation record: melody plus source lyrics and an optional reference
/// translation. The source is syllable-tokenized (whitespace separated).
struct AlignedTriple {
    MelodyLine melody;
    std::string source;
    std::optional<std::string> reference;

    std::vector<std::string> source_syllables() const;
};

enum class AssignmentStrategy {
    NoteToSyllable,      // every note becomes its own group
    SyllableToSyllable,  // keep the grouping authored in the input
};

std::optional<AssignmentStrategy> assignment_from_string(std::string_view name);
std::string_view to_string(AssignmentStrategy strategy);

/// Scientific pitch name ("A3", "C#4", "Bb2") to MIDI semitone number.
int note_name_to_pitch(std::string_view name);

/// Canonical (sharp-spelled) name for a MIDI pitch, e.g. 61 -> "C#4".
std::string pitch_to_note_name(int pitch);

/// Parses one JSON melody record (see README for the schema). Throws
/// ParseError with the offending field on schema or invariant violations.
MelodyLine parse_melody_line(const std::string& record);
AlignedTriple parse_triple(const std::string& record);

std::string serialize_melody_line(const MelodyLine& line);
std::string serialize_triple(const AlignedTriple& triple);

/// Reads one record per line, skipping blanks and '#' comments. Errors are
/// rethrown with the 1-based record number prepended.
std::vector<AlignedTriple> load_triples(std::istream& in);

MelodyLine apply_assignment(const MelodyLine& line, AssignmentStrategy strategy);

}  // namespace tonalign
