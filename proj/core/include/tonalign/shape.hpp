#pragma once

#include <span>
#include <string_view>

#include "tonalign/melody.hpp"
#include "tonalign/tones.hpp"

namespace tonalign {

/// Melodic shape of a multi-note group, mirroring the Mandarin tone shapes.
enum class ShapeCategory {
    Level,
    Rising,
    Falling,
    RisingFalling,
    FallingRising,
};

std::string_view to_string(ShapeCategory shape);

/// Least-squares fit of a*x^2 + b*x + c. `degenerate` marks an (effectively)
/// linear fit, |a| <= 1e-9; `axis` is -b/(2a) and NaN when degenerate.
struct ParabolaFit {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double axis = 0.0;
    bool degenerate = false;
};

/// Which x coordinates multi-note groups are fitted over: note indices
/// 0..n-1 (default, duration independent) or cumulative onset times.
enum class IntraXMode {
    Index,
    Duration,
};

/// Solves the quadratic normal equations over the sample points. Needs at
/// least two points with strictly increasing positions; two points (or any
/// exactly collinear input) produce the degenerate linear fit.
ParabolaFit fit_parabola(std::span<const int> pitches, std::span<const double> positions);

/// Shape of a group of two or more notes. A group whose pitch range is at
/// most one semitone is Level; otherwise the fitted curvature and axis of
/// symmetry decide between the four contour shapes.
ShapeCategory classify_shape(const NoteGroup& group, IntraXMode mode = IntraXMode::Index);

/// Level matches every tone; Rising matches tone 2, Falling tone 4,
/// FallingRising tone 3; RisingFalling matches no citation tone. The neutral
/// tone matches every shape.
bool shape_matches_tone(ShapeCategory shape, Tone tone);

}  // namespace tonalign
