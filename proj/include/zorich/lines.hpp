#pragma once

#include <optional>
#include <string_view>

#include "zorich/geometry.hpp"

namespace zorichlab {

// The four faces of Y = {P + (x1, x2, x3) : max(|x1|,|x2|) = 1, x3 > 0}.
enum class YFace { x1_pos, x1_neg, x2_pos, x2_neg };

// Face-local coordinates on Y. On the face x1 = +1 the point is P + (1, u2, u3);
// the other faces are obtained by the evident symmetries (see y_offset).
struct YPoint {
    YFace face = YFace::x1_pos;
    double u2 = 0.5;
    double u3 = 1.0;
};

Point3 y_offset(const YPoint& alpha) noexcept;

// u3 > 0 and u2 outside {-1, 0, 1} with |u2| < 1; removes the lines that lie in
// horizontal, coordinate and diagonal planes.
bool y_point_valid(const YPoint& alpha) noexcept;

std::string_view to_string(YFace face) noexcept;
std::optional<YFace> parse_face(std::string_view text) noexcept;

// Line base + s * direction.
struct LineSpec {
    Point3 base;
    Point3 direction;

    // The line through P and P + y_offset(alpha).
    static LineSpec through(const Point3& P, const YPoint& alpha) noexcept {
        return {P, y_offset(alpha)};
    }

    Point3 at(double s) const noexcept { return base + s * direction; }
};

// Families of lines whose images cannot be dense.
enum class LineClass {
    oblique,
    horizontal,        // inside the plane x3 = p3
    coordinate_plane,  // inside x1 = p1 or x2 = p2
    diagonal_plane,    // inside x2 - p2 = +-(x1 - p1)
    degenerate,        // zero direction
};

LineClass classify(const LineSpec& line) noexcept;
std::string_view to_string(LineClass c) noexcept;

// Y-coordinates of the line's unique crossing of Y, when the line is oblique.
std::optional<YPoint> y_parameter(const LineSpec& line) noexcept;

}  // namespace zorichlab
