#pragma once

#include <cstdint>

#include "zorich/geometry.hpp"

namespace zorichlab {

// Largest x3 for which exp(x3) is evaluated.
inline constexpr double kMaxExponent = 700.0;

// Triangle-wave reduction of a real onto [-pi/2, pi/2].
struct FoldResult {
    double folded = 0.0;
    std::int64_t strip_index = 0;
    int parity = 0;  // strip_index mod 2, in {0, 1}
};

// Beam [-pi/2 + i pi, pi/2 + i pi] x [-pi/2 + j pi, pi/2 + j pi] x R.
struct BeamIndex {
    std::int64_t i = 0;
    std::int64_t j = 0;

    // 0 when the beam is mapped onto the upper half-space.
    int parity() const noexcept { return static_cast<int>(((i + j) % 2 + 2) % 2); }
    PlanePoint center() const noexcept {
        return {static_cast<double>(i) * kPi, static_cast<double>(j) * kPi};
    }

    friend constexpr bool operator==(const BeamIndex&, const BeamIndex&) = default;
};

// Beam containing x; points on a shared face go to the beam with the larger index.
BeamIndex beam_of(const PlanePoint& p);

// h on the closed square max(|x1|,|x2|) <= pi/2, onto the closed upper hemisphere.
// Throws DomainError outside the square (tolerance 1e-12).
UnitVector3 h_square(const PlanePoint& p);

FoldResult fold(double t) noexcept;

// Inverse of fold: q pi + (-1)^q t.
double unfold(double folded, std::int64_t strip_index) noexcept;

// Doubly periodic extension of h by reflection in the square sides.
UnitVector3 h_extended(const PlanePoint& p) noexcept;

// Z(x) = exp(x3) h(x1, x2). Throws OverflowError (Stage::first) if x3 > kMaxExponent.
Point3 zorich(const Point3& x);

// f = Z o Z. The OverflowError stage names the application that overflowed.
Point3 zorich_second(const Point3& x);

// Non-throwing kernels for hot loops. They return false (leaving `out` untouched)
// when the exponent exceeds kMaxExponent.
bool try_zorich(const Point3& x, Point3& out) noexcept;
bool try_zorich_second(const Point3& x, Point3& out) noexcept;

// Inverse of h_square on the closed upper hemisphere.
// Throws DomainError when u is not unit (1e-9) or u3 < -1e-12.
PlanePoint h_inverse(const UnitVector3& u);

// Branch of Z^{-1} with values in the given beam.
// Throws ZeroInputError for |y| < 1e-300 and ParityMismatchError when the sign of y3
// is incompatible with the beam parity.
Point3 zorich_inverse(const Point3& y, const BeamIndex& beam);

// Distance from (x1, x2) to the branch lattice {(pi/2 + j pi, pi/2 + k pi)}.
double branch_distance(const Point3& x) noexcept;

}  // namespace zorichlab
