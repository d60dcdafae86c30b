#pragma once

// Label anchoring: along-arrow position, side, perpendicular offset, rotation.
// Coordinates are document space: x rightward, y downward.

#include <string>

#include "cdc/dsl.hpp"
#include "cdc/fixedmath.hpp"
#include "cdc/styles.hpp"

namespace cdc {

struct Point {
    Sp x = 0;
    Sp y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Anchor codes: 0 text extends right of the point, 1 centered, 2 extends left.
/// `pos` is the anchor point at the vertical center of the label box.
struct LabelAnchor {
    Point pos;
    int anchor = 1;
    int rotation = 0;  // degrees counterclockwise
    TextBox box;
    std::string text;
    LabelCode code = LabelCode::Caret;

    friend bool operator==(const LabelAnchor&, const LabelAnchor&) = default;
};

namespace labels {

/// Caret and `<` sit on side A, the left of the travel direction.
bool on_side_a(LabelCode code);

/// Integer degrees of (x, y_up), truncated, in [0, 360).
int atan_degrees(std::int64_t x, std::int64_t y_up);

/// 0 when rotated labels are off, else the slope angle of start->end.
int rotation_angle(Point start, Point end, bool rotated);

/// start + f*(end - start) per coordinate, with TeX factor scaling.
Point point_on(Point start, Point end, Fraction f);

/// Unit normal for a side, scaled so that it is at least `dist` long and each
/// component is rounded away from zero.
Point side_offset(Point start, Point end, bool side_a, Sp along_normal_pad, const TextBox& box, bool rotated);

LabelAnchor place_label(const Label& label, Point start, Point end, const TextBox& box, Sp labelpad,
                        Fraction labelpoint, bool rotated);

}  // namespace labels
}  // namespace cdc
