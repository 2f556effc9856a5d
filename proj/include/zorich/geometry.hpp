#pragma once

#include <cmath>
#include <numbers>

namespace zorichlab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Point of the (x1, x2) plane. Angular coordinates are in radians.
struct PlanePoint {
    double x1 = 0.0;
    double x2 = 0.0;

    friend constexpr bool operator==(const PlanePoint&, const PlanePoint&) = default;
};

// max(|x1|, |x2|)
inline double max_norm(const PlanePoint& p) {
    return std::fmax(std::fabs(p.x1), std::fabs(p.x2));
}

struct Point3 {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;

    constexpr Point3& operator+=(const Point3& o) {
        x1 += o.x1;
        x2 += o.x2;
        x3 += o.x3;
        return *this;
    }
    constexpr Point3& operator-=(const Point3& o) {
        x1 -= o.x1;
        x2 -= o.x2;
        x3 -= o.x3;
        return *this;
    }
    constexpr Point3& operator*=(double s) {
        x1 *= s;
        x2 *= s;
        x3 *= s;
        return *this;
    }

    friend constexpr Point3 operator+(Point3 a, const Point3& b) { return a += b; }
    friend constexpr Point3 operator-(Point3 a, const Point3& b) { return a -= b; }
    friend constexpr Point3 operator*(Point3 a, double s) { return a *= s; }
    friend constexpr Point3 operator*(double s, Point3 a) { return a *= s; }
    friend constexpr Point3 operator-(const Point3& a) { return {-a.x1, -a.x2, -a.x3}; }
    friend constexpr bool operator==(const Point3&, const Point3&) = default;
};

inline constexpr double dot(const Point3& a, const Point3& b) {
    return a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3;
}

inline constexpr Point3 cross(const Point3& a, const Point3& b) {
    return {a.x2 * b.x3 - a.x3 * b.x2, a.x3 * b.x1 - a.x1 * b.x3, a.x1 * b.x2 - a.x2 * b.x1};
}

inline double norm(const Point3& a) { return std::hypot(a.x1, a.x2, a.x3); }

inline double distance(const Point3& a, const Point3& b) { return norm(a - b); }

inline PlanePoint horizontal(const Point3& a) { return {a.x1, a.x2}; }

// Unit vector of R^3, e.g. a value of h on the sphere.
struct UnitVector3 {
    double u1 = 0.0;
    double u2 = 0.0;
    double u3 = 1.0;

    constexpr Point3 scaled(double s) const { return {s * u1, s * u2, s * u3}; }
    constexpr Point3 as_point() const { return {u1, u2, u3}; }

    friend constexpr bool operator==(const UnitVector3&, const UnitVector3&) = default;
};

}  // namespace zorichlab
