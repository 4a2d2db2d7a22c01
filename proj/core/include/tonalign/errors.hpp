#pragma once

#include <stdexcept>
#include <string>

namespace tonalign {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input records, lexicon files, or schema violations.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

// A character or word missing from a lexicon.
class LookupError : public Error {
public:
    explicit LookupError(const std::string& msg) : Error(msg) {}
};

// A line could not be decoded (beam collapse, model failure, peer error).
class DecodeError : public Error {
public:
    explicit DecodeError(const std::string& msg) : Error(msg) {}
};

}  // namespace tonalign
