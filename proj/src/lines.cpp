#include "zorich/lines.hpp"

#include <cmath>

namespace zorichlab {

Point3 y_offset(const YPoint& alpha) noexcept {
    switch (alpha.face) {
        case YFace::x1_pos: return {1.0, alpha.u2, alpha.u3};
        case YFace::x1_neg: return {-1.0, alpha.u2, alpha.u3};
        case YFace::x2_pos: return {alpha.u2, 1.0, alpha.u3};
        case YFace::x2_neg: return {alpha.u2, -1.0, alpha.u3};
    }
    return {};
}

bool y_point_valid(const YPoint& alpha) noexcept {
    if (!std::isfinite(alpha.u2) || !std::isfinite(alpha.u3)) return false;
    return alpha.u3 > 0.0 && std::fabs(alpha.u2) < 1.0 && alpha.u2 != 0.0;
}

std::string_view to_string(YFace face) noexcept {
    switch (face) {
        case YFace::x1_pos: return "x1+";
        case YFace::x1_neg: return "x1-";
        case YFace::x2_pos: return "x2+";
        case YFace::x2_neg: return "x2-";
    }
    return "?";
}

std::optional<YFace> parse_face(std::string_view text) noexcept {
    if (text == "x1+") return YFace::x1_pos;
    if (text == "x1-") return YFace::x1_neg;
    if (text == "x2+") return YFace::x2_pos;
    if (text == "x2-") return YFace::x2_neg;
    return std::nullopt;
}

LineClass classify(const LineSpec& line) noexcept {
    const Point3& d = line.direction;
    if (d.x1 == 0.0 && d.x2 == 0.0 && d.x3 == 0.0) return LineClass::degenerate;
    if (d.x3 == 0.0) return LineClass::horizontal;
    if (d.x1 == 0.0 || d.x2 == 0.0) return LineClass::coordinate_plane;
    if (std::fabs(d.x1) == std::fabs(d.x2)) return LineClass::diagonal_plane;
    return LineClass::oblique;
}

std::string_view to_string(LineClass c) noexcept {
    switch (c) {
        case LineClass::oblique: return "oblique";
        case LineClass::horizontal: return "horizontal";
        case LineClass::coordinate_plane: return "coordinate-plane";
        case LineClass::diagonal_plane: return "diagonal-plane";
        case LineClass::degenerate: return "degenerate";
    }
    return "?";
}

std::optional<YPoint> y_parameter(const LineSpec& line) noexcept {
    if (classify(line) != LineClass::oblique) return std::nullopt;
    Point3 d = line.direction;
    if (d.x3 < 0.0) d = -d;
    const double m = std::fmax(std::fabs(d.x1), std::fabs(d.x2));
    d *= 1.0 / m;
    if (std::fabs(d.x1) >= std::fabs(d.x2)) {
        return YPoint{d.x1 > 0.0 ? YFace::x1_pos : YFace::x1_neg, d.x2, d.x3};
    }
    return YPoint{d.x2 > 0.0 ? YFace::x2_pos : YFace::x2_neg, d.x1, d.x3};
}

}  // namespace zorichlab
