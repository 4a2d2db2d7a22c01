#include "tonalign/melody.hpp"

#include <cctype>
#include <charconv>
#include <istream>

#include <json.hpp>

#include "tonalign/errors.hpp"
#include "tonalign/utf8.hpp"

namespace tonalign {

using nlohmann::json;

Rational NoteGroup::total_duration() const {
    Rational sum;
    for (const auto& d : durations) sum = sum + d;
    return sum;
}

std::size_t MelodyLine::total_notes() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.note_count();
    return n;
}

Rational MelodyLine::total_duration() const {
    Rational sum;
    for (const auto& g : groups) sum = sum + g.total_duration();
    return sum;
}

Rational MelodyLine::total_rest() const {
    Rational sum;
    for (const auto& r : rests) sum = sum + r;
    return sum;
}

void MelodyLine::validate() const {
    if (groups.empty()) throw ParseError("melody line has no note groups");
    if (rests.size() != groups.size()) {
        throw ParseError("rests: " + std::to_string(rests.size()) + " entries for " +
                         std::to_string(groups.size()) + " groups");
    }
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const NoteGroup& g = groups[i];
        if (g.pitches.empty()) {
            throw ParseError("group " + std::to_string(i) + ": empty");
        }
        if (g.pitches.size() != g.durations.size()) {
            throw ParseError("group " + std::to_string(i) + ": " +
                             std::to_string(g.pitches.size()) + " pitches vs " +
                             std::to_string(g.durations.size()) + " durations");
        }
        for (const auto& d : g.durations) {
            if (!(Rational(0) < d)) {
                throw ParseError("group " + std::to_string(i) + ": non-positive duration " +
                                 to_string(d));
            }
        }
        if (rests[i].is_negative()) {
            throw ParseError("rests[" + std::to_string(i) + "]: negative rest " +
                             to_string(rests[i]));
        }
    }
}

std::vector<std::string> AlignedTriple::source_syllables() const {
    return split_whitespace(source);
}

std::optional<AssignmentStrategy> assignment_from_string(std::string_view name) {
    if (name == "note-to-syllable") return AssignmentStrategy::NoteToSyllable;
    if (name == "syllable-to-syllable") return AssignmentStrategy::SyllableToSyllable;
    return std::nullopt;
}

std::string_view to_string(AssignmentStrategy strategy) {
    return strategy == AssignmentStrategy::NoteToSyllable ? "note-to-syllable"
                                                          : "syllable-to-syllable";
}

namespace {

// Semitone offsets of the note letters within an octave, C-rooted.
constexpr int kLetterSemitone[7] = {9, 11, 0, 2, 4, 5, 7};  // A B C D E F G

}  // namespace

int note_name_to_pitch(std::string_view name) {
    const auto fail = [&] { throw ParseError("bad pitch name: \"" + std::string(name) + "\""); };
    if (name.size() < 2) fail();
    const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    if (letter < 'A' || letter > 'G') fail();
    int semitone = kLetterSemitone[letter - 'A'];
    std::size_t pos = 1;
    if (name[pos] == '#') {
        ++semitone;
        ++pos;
    } else if (name[pos] == 'b') {
        --semitone;
        ++pos;
    }
    if (pos >= name.size()) fail();
    int octave = 0;
    const char* first = name.data() + pos;
    const char* last = name.data() + name.size();
    auto [ptr, ec] = std::from_chars(first, last, octave);
    if (ec != std::errc() || ptr != last) fail();
    // MIDI convention: C4 == 60, octaves change at C.
    return (octave + 1) * 12 + semitone;
}

std::string pitch_to_note_name(int pitch) {
    static const char* kNames[12] = {"C",  "C#", "D",  "D#", "E",  "F",
                                     "F#", "G",  "G#", "A",  "A#", "B"};
    int idx = pitch % 12;
    if (idx < 0) idx += 12;
    const int octave = (pitch - idx) / 12 - 1;
    return std::string(kNames[idx]) + std::to_string(octave);
}

namespace {

Rational rational_from_json(const json& value, const std::string& where) {
    if (value.is_number_integer()) return Rational(value.get<std::int64_t>(), 1);
    if (value.is_string()) {
        try {
            return parse_rational(value.get<std::string>());
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    throw ParseError(where + ": expected integer or rational string, got " +
                     std::string(value.type_name()));
}

int pitch_from_json(const json& value, const std::string& where) {
    if (value.is_number_integer()) return value.get<int>();
    if (value.is_string()) {
        try {
            return note_name_to_pitch(value.get<std::string>());
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    // Fractional pitch input is rejected; comparisons need exact arithmetic.
    throw ParseError(where + ": expected integer pitch or note name, got " +
                     std::string(value.type_name()));
}

json parse_record(const std::string& record) {
    json j;
    try {
        j = json::parse(record);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("record is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("record must be a JSON object");
    return j;
}

MelodyLine melody_from_json(const json& j) {
    MelodyLine line;
    if (!j.contains("groups") || !j["groups"].is_array()) {
        throw ParseError("groups: missing or not an array");
    }
    std::size_t gi = 0;
    for (const auto& jg : j["groups"]) {
        const std::string where = "group " + std::to_string(gi);
        if (!jg.is_object() || !jg.contains("pitches") || !jg.contains("durations")) {
            throw ParseError(where + ": expected object with pitches and durations");
        }
        NoteGroup group;
        for (const auto& jp : jg["pitches"]) {
            group.pitches.push_back(pitch_from_json(jp, where + ".pitches"));
        }
        for (const auto& jd : jg["durations"]) {
            group.durations.push_back(rational_from_json(jd, where + ".durations"));
        }
        line.groups.push_back(std::move(group));
        ++gi;
    }
    if (!j.contains("rests") || !j["rests"].is_array()) {
        throw ParseError("rests: missing or not an array");
    }
    std::size_t ri = 0;
    for (const auto& jr : j["rests"]) {
        line.rests.push_back(rational_from_json(jr, "rests[" + std::to_string(ri) + "]"));
        ++ri;
    }
    line.validate();
    return line;
}

json melody_to_json(const MelodyLine& line) {
    json jgroups = json::array();
    for (const auto& g : line.groups) {
        json jg;
        jg["pitches"] = g.pitches;
        json jd = json::array();
        for (const auto& d : g.durations) jd.push_back(to_string(d));
        jg["durations"] = std::move(jd);
        jgroups.push_back(std::move(jg));
    }
    json jrests = json::array();
    for (const auto& r : line.rests) jrests.push_back(to_string(r));
    json j;
    j["groups"] = std::move(jgroups);
    j["rests"] = std::move(jrests);
    return j;
}

}  // namespace

MelodyLine parse_melody_line(const std::string& record) {
    return melody_from_json(parse_record(record));
}

AlignedTriple parse_triple(const std::string& record) {
    const json j = parse_record(record);
    AlignedTriple triple;
    triple.melody = melody_from_json(j);
    if (j.contains("source")) {
        if (!j["source"].is_string()) throw ParseError("source: expected string");
        triple.source = j["source"].get<std::string>();
        // Source syllables are aligned to the note groups as authored.
        const auto syllables = triple.source_syllables();
        if (!syllables.empty() && syllables.size() != triple.melody.size()) {
            throw ParseError("source: " + std::to_string(syllables.size()) +
                             " syllables vs " + std::to_string(triple.melody.size()) +
                             " note groups");
        }
    }
    if (j.contains("reference")) {
        if (!j["reference"].is_string()) throw ParseError("reference: expected string");
        triple.reference = j["reference"].get<std::string>();
    }
    return triple;
}

std::string serialize_melody_line(const MelodyLine& line) {
    return melody_to_json(line).dump();
}

std::string serialize_triple(const AlignedTriple& triple) {
    json j = melody_to_json(triple.melody);
    if (!triple.source.empty()) j["source"] = triple.source;
    if (triple.reference) j["reference"] = *triple.reference;
    return j.dump();
}

std::vector<AlignedTriple> load_triples(std::istream& in) {
    std::vector<AlignedTriple> out;
    std::string record;
    std::size_t line_no = 0;
    while (std::getline(in, record)) {
        ++line_no;
        if (record.empty() || record[0] == '#') continue;
        try {
            out.push_back(parse_triple(record));
        } catch (const ParseError& e) {
            throw ParseError("record " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

MelodyLine apply_assignment(const MelodyLine& line, AssignmentStrategy strategy) {
    if (strategy == AssignmentStrategy::SyllableToSyllable) return line;
    MelodyLine flat;
    for (std::size_t i = 0; i < line.groups.size(); ++i) {
        const NoteGroup& g = line.groups[i];
        for (std::size_t k = 0; k < g.pitches.size(); ++k) {
            flat.groups.push_back(NoteGroup{{g.pitches[k]}, {g.durations[k]}});
            // The rest precedes the group, so it attaches to its first note.
            flat.rests.push_back(k == 0 ? line.rests[i] : Rational(0));
        }
    }
    return flat;
}

}  // namespace tonalign
