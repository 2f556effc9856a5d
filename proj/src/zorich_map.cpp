#include "zorich/zorich_map.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "zorich/errors.hpp"

namespace zorichlab {

namespace {

constexpr double kSquareTolerance = 1e-12;

// h on the square, no range check.
UnitVector3 h_kernel(double x1, double x2) noexcept {
    const double m = std::fmax(std::fabs(x1), std::fabs(x2));
    if (m == 0.0) return {0.0, 0.0, 1.0};
    const double r = std::hypot(x1, x2);
    const double s = std::sin(m) / r;
    return {x1 * s, x2 * s, std::cos(m)};
}

}  // namespace

BeamIndex beam_of(const PlanePoint& p) {
    return {fold(p.x1).strip_index, fold(p.x2).strip_index};
}

UnitVector3 h_square(const PlanePoint& p) {
    if (!(max_norm(p) <= kHalfPi + kSquareTolerance)) {
        std::ostringstream os;
        os << "h_square: (" << p.x1 << ", " << p.x2
           << ") lies outside the square max(|x1|,|x2|) <= pi/2";
        throw DomainError(os.str());
    }
    return h_kernel(std::clamp(p.x1, -kHalfPi, kHalfPi), std::clamp(p.x2, -kHalfPi, kHalfPi));
}

FoldResult fold(double t) noexcept {
    const double qd = std::floor((t + kHalfPi) / kPi);
    const auto q = static_cast<std::int64_t>(qd);
    const int parity = static_cast<int>(q & 1);
    double folded = t - qd * kPi;
    if (parity) folded = -folded;
    return {std::clamp(folded, -kHalfPi, kHalfPi), q, parity};
}

double unfold(double folded, std::int64_t strip_index) noexcept {
    const double sign = (strip_index & 1) ? -1.0 : 1.0;
    return static_cast<double>(strip_index) * kPi + sign * folded;
}

UnitVector3 h_extended(const PlanePoint& p) noexcept {
    const FoldResult a = fold(p.x1);
    const FoldResult b = fold(p.x2);
    UnitVector3 v = h_kernel(a.folded, b.folded);
    if ((a.parity + b.parity) & 1) v.u3 = -v.u3;
    return v;
}

bool try_zorich(const Point3& x, Point3& out) noexcept {
    if (!(x.x3 <= kMaxExponent)) return false;
    out = h_extended({x.x1, x.x2}).scaled(std::exp(x.x3));
    return true;
}

bool try_zorich_second(const Point3& x, Point3& out) noexcept {
    Point3 y;
    return try_zorich(x, y) && try_zorich(y, out);
}

Point3 zorich(const Point3& x) {
    Point3 out;
    if (!try_zorich(x, out)) throw OverflowError(Stage::first, x.x3);
    return out;
}

Point3 zorich_second(const Point3& x) {
    const Point3 y = zorich(x);
    Point3 out;
    if (!try_zorich(y, out)) throw OverflowError(Stage::second, y.x3);
    return out;
}

PlanePoint h_inverse(const UnitVector3& u) {
    const double n = std::hypot(u.u1, u.u2, u.u3);
    if (!(std::fabs(n - 1.0) <= 1e-9)) {
        std::ostringstream os;
        os << "h_inverse: vector has norm " << n << ", expected a unit vector";
        throw DomainError(os.str());
    }
    if (!(u.u3 >= -1e-12)) {
        std::ostringstream os;
        os << "h_inverse: u3 = " << u.u3 << " is below the upper hemisphere";
        throw DomainError(os.str());
    }
    // atan2 form of arccos(u3): keeps full precision near the pole and the equator.
    const double rho = std::hypot(u.u1, u.u2);
    const double m = std::atan2(rho, std::clamp(u.u3, 0.0, 1.0));
    if (m < 1e-12) return {0.0, 0.0};
    const double inf_norm = std::fmax(std::fabs(u.u1), std::fabs(u.u2));
    return {m * u.u1 / inf_norm, m * u.u2 / inf_norm};
}

Point3 zorich_inverse(const Point3& y, const BeamIndex& beam) {
    const double r = norm(y);
    if (!(r >= 1e-300)) throw ZeroInputError("zorich_inverse: y = 0 has no preimage");
    const int parity = beam.parity();
    if ((parity == 0 && y.x3 < 0.0) || (parity == 1 && y.x3 > 0.0)) {
        std::ostringstream os;
        os << "zorich_inverse: y3 = " << y.x3 << " is incompatible with beam (" << beam.i << ", "
           << beam.j << ") of parity " << parity;
        throw ParityMismatchError(os.str());
    }
    UnitVector3 u{y.x1 / r, y.x2 / r, y.x3 / r};
    if (parity == 1) u.u3 = -u.u3;
    const PlanePoint ab = h_inverse(u);
    return {unfold(ab.x1, beam.i), unfold(ab.x2, beam.j), std::log(r)};
}

double branch_distance(const Point3& x) noexcept {
    const double c1 = kHalfPi + std::round((x.x1 - kHalfPi) / kPi) * kPi;
    const double c2 = kHalfPi + std::round((x.x2 - kHalfPi) / kPi) * kPi;
    return std::hypot(x.x1 - c1, x.x2 - c2);
}

}  // namespace zorichlab
