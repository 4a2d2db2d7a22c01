#include "tonalign/shape.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "tonalign/errors.hpp"

namespace tonalign {

namespace {

constexpr double kZeroTolerance = 1e-9;

// 3x3 Gaussian elimination with partial pivoting; false when singular.
bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> rhs,
            std::array<double, 3>& out) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row) {
            if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
        }
        if (std::abs(m[pivot][col]) < 1e-12) return false;
        std::swap(m[col], m[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (int row = col + 1; row < 3; ++row) {
            const double f = m[row][col] / m[col][col];
            for (int k = col; k < 3; ++k) m[row][k] -= f * m[col][k];
            rhs[row] -= f * rhs[col];
        }
    }
    for (int row = 2; row >= 0; --row) {
        double v = rhs[row];
        for (int k = row + 1; k < 3; ++k) v -= m[row][k] * out[k];
        out[row] = v / m[row][row];
    }
    return true;
}

}  // namespace

std::string_view to_string(ShapeCategory shape) {
    switch (shape) {
        case ShapeCategory::Level: return "level";
        case ShapeCategory::Rising: return "rising";
        case ShapeCategory::Falling: return "falling";
        case ShapeCategory::RisingFalling: return "rising-falling";
        case ShapeCategory::FallingRising: return "falling-rising";
    }
    return "?";
}

ParabolaFit fit_parabola(std::span<const int> pitches, std::span<const double> positions) {
    const std::size_t n = pitches.size();
    if (n < 2 || positions.size() != n) {
        throw Error("fit_parabola needs >= 2 points with matching positions");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(positions[i] > positions[i - 1])) {
            throw Error("fit_parabola positions must be strictly increasing");
        }
    }

    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    double t0 = 0, t1 = 0, t2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = positions[i];
        const double y = static_cast<double>(pitches[i]);
        const double xx = x * x;
        s1 += x;
        s2 += xx;
        s3 += xx * x;
        s4 += xx * xx;
        t0 += y;
        t1 += x * y;
        t2 += xx * y;
    }

    ParabolaFit fit;
    std::array<double, 3> coef{};  // c, b, a
    const bool solved =
        n >= 3 && solve3({{{static_cast<double>(n), s1, s2}, {s1, s2, s3}, {s2, s3, s4}}},
                         {t0, t1, t2}, coef);
    if (solved) {
        fit.c = coef[0];
        fit.b = coef[1];
        fit.a = coef[2];
    } else {
        // Two points or a singular system: least-squares line, a == 0.
        const double denom = static_cast<double>(n) * s2 - s1 * s1;
        fit.a = 0.0;
        fit.b = (static_cast<double>(n) * t1 - s1 * t0) / denom;
        fit.c = (t0 - fit.b * s1) / static_cast<double>(n);
    }
    fit.degenerate = std::abs(fit.a) <= kZeroTolerance;
    fit.axis = fit.degenerate ? std::numeric_limits<double>::quiet_NaN()
                              : -fit.b / (2.0 * fit.a);
    return fit;
}

ShapeCategory classify_shape(const NoteGroup& group, IntraXMode mode) {
    const std::size_t n = group.note_count();
    if (n < 2) throw Error("classify_shape needs a group of at least 2 notes");

    const auto [min_it, max_it] = std::minmax_element(group.pitches.begin(), group.pitches.end());
    if (*max_it - *min_it <= 1) return ShapeCategory::Level;

    std::vector<double> positions(n);
    if (mode == IntraXMode::Index) {
        for (std::size_t i = 0; i < n; ++i) positions[i] = static_cast<double>(i);
    } else {
        double onset = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            positions[i] = onset;
            onset += group.durations[i].to_double();
        }
    }

    const ParabolaFit fit = fit_parabola(group.pitches, positions);
    if (fit.degenerate) {
        // Limit of the a -> 0 cases: the line's slope decides.
        if (fit.b > kZeroTolerance) return ShapeCategory::Rising;
        if (fit.b < -kZeroTolerance) return ShapeCategory::Falling;
        return ShapeCategory::Level;
    }

    const double first = positions.front();
    const double last = positions.back();
    const double axis = fit.axis;
    if (axis <= first + kZeroTolerance) {
        return fit.a > 0 ? ShapeCategory::Rising : ShapeCategory::Falling;
    }
    if (axis >= last - kZeroTolerance) {
        return fit.a < 0 ? ShapeCategory::Rising : ShapeCategory::Falling;
    }
    return fit.a < 0 ? ShapeCategory::RisingFalling : ShapeCategory::FallingRising;
}

bool shape_matches_tone(ShapeCategory shape, Tone tone) {
    if (tone.is_neutral()) return true;
    switch (shape) {
        case ShapeCategory::Level: return true;
        case ShapeCategory::Rising: return tone.value() == 2;
        case ShapeCategory::Falling: return tone.value() == 4;
        case ShapeCategory::FallingRising: return tone.value() == 3;
        case ShapeCategory::RisingFalling: return false;
    }
    return false;
}

}  // namespace tonalign
