#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace tonalign {

/// Exact rational number for note and rest durations (1 == one quarter note).
/// Always stored reduced with a positive denominator.
class Rational {
public:
    constexpr Rational() : num_(0), den_(1) {}
    Rational(std::int64_t num, std::int64_t den);
    /* implicit */ constexpr Rational(std::int64_t whole) : num_(whole), den_(1) {}

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    bool is_zero() const { return num_ == 0; }
    bool is_negative() const { return num_ < 0; }
    bool is_integer() const { return den_ == 1; }

    Rational operator+(const Rational& rhs) const;
    Rational operator-(const Rational& rhs) const;
    bool operator==(const Rational& rhs) const = default;
    std::strong_ordering operator<=>(const Rational& rhs) const;

private:
    std::int64_t num_;
    std::int64_t den_;
};

/// Parses "3/2", "1/4" or the integer shorthand "1".
Rational parse_rational(std::string_view text);

/// Canonical form: "n" when integral, "n/d" otherwise.
std::string to_string(const Rational& r);

}  // namespace tonalign
