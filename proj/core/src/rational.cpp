#include "tonalign/rational.hpp"

#include <charconv>
#include <numeric>

#include "tonalign/errors.hpp"

namespace tonalign {

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
    std::int64_t value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ParseError("bad rational: \"" + std::string(whole) + "\"");
    }
    return value;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw ParseError("rational with zero denominator");
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

Rational Rational::operator+(const Rational& rhs) const {
    return Rational(num_ * rhs.den_ + rhs.num_ * den_, den_ * rhs.den_);
}

Rational Rational::operator-(const Rational& rhs) const {
    return Rational(num_ * rhs.den_ - rhs.num_ * den_, den_ * rhs.den_);
}

std::strong_ordering Rational::operator<=>(const Rational& rhs) const {
    return num_ * rhs.den_ <=> rhs.num_ * den_;
}

Rational parse_rational(std::string_view text) {
    if (text.empty()) throw ParseError("empty rational");
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        return Rational(parse_int(text, text), 1);
    }
    return Rational(parse_int(text.substr(0, slash), text),
                    parse_int(text.substr(slash + 1), text));
}

std::string to_string(const Rational& r) {
    if (r.is_integer()) return std::to_string(r.num());
    return std::to_string(r.num()) + "/" + std::to_string(r.den());
}

}  // namespace tonalign
