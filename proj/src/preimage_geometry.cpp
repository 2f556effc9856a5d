#include "zorich/preimage_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "zorich/errors.hpp"

namespace zorichlab {

namespace {

constexpr int kMaxBisections = 200;

BeamIndex base_beam(double level) { return level > 0.0 ? BeamIndex{0, 0} : BeamIndex{1, 0}; }

void require_level(double level) {
    if (!(level != 0.0) || !std::isfinite(level)) {
        throw DomainError("cone level must be finite and nonzero");
    }
}

bool is_even(std::int64_t v) { return (v % 2) == 0; }

// Beam-local coordinates in which `face` becomes {a >= |b|, a <= pi/2}.
PlanePoint face_frame(FaceId face, double d1, double d2) {
    switch (face) {
        case FaceId::plus_x1: return {d1, d2};
        case FaceId::minus_x1: return {-d1, d2};
        case FaceId::plus_x2: return {d2, d1};
        case FaceId::minus_x2: return {-d2, d1};
    }
    return {d1, d2};
}

// Shrinks [lo, hi] to the parameters where c0 + s c1 >= 0.
void clip(double c0, double c1, double& lo, double& hi) {
    if (c1 == 0.0) {
        if (c0 < 0.0) hi = -std::numeric_limits<double>::infinity();
        return;
    }
    const double root = -c0 / c1;
    if (c1 > 0.0) lo = std::max(lo, root);
    else hi = std::min(hi, root);
}

}  // namespace

BeamIndex cone_beam(const ConeSurface& cone) {
    require_level(cone.level);
    BeamIndex b = base_beam(cone.level);
    if (cone.element.flip) b = {1 - b.i, 1 - b.j};
    return {b.i + 2 * cone.element.m, b.j + 2 * cone.element.n};
}

ConeSurface cone_in_beam(double level, const BeamIndex& beam) {
    require_level(level);
    const int wanted = level > 0.0 ? 0 : 1;
    if (beam.parity() != wanted) {
        std::ostringstream os;
        os << "no component of Z^{-1}(H_t) for t = " << level << " in beam (" << beam.i << ", "
           << beam.j << "): the beam maps to the " << (beam.parity() == 0 ? "upper" : "lower")
           << " half-space";
        throw ParityMismatchError(os.str());
    }
    const BeamIndex b = base_beam(level);
    if (is_even(beam.i - b.i) && is_even(beam.j - b.j)) {
        return {level, GroupElement::translation((beam.i - b.i) / 2, (beam.j - b.j) / 2)};
    }
    return {level, GroupElement{(beam.i - 1 + b.i) / 2, (beam.j - 1 + b.j) / 2, true}};
}

double cone_height(double level, const PlanePoint& p) {
    if (!(level > 0.0)) throw DomainError("cone_height: level must be positive");
    const double m = max_norm(p);
    if (!(m < kHalfPi)) {
        std::ostringstream os;
        os << "cone_height: M(p) = " << m << " must be below pi/2";
        throw DomainError(os.str());
    }
    return std::log(level / std::cos(m));
}

Point3 cone_point(const ConeSurface& cone, const PlanePoint& p) {
    require_level(cone.level);
    Point3 x{p.x1, p.x2, cone_height(std::fabs(cone.level), p)};
    if (cone.level < 0.0) x.x1 = kPi - x.x1;
    return apply(cone.element, x);
}

double cone_residual(const ConeSurface& cone, const Point3& x) {
    const PlanePoint c = cone_beam(cone).center();
    const double m = std::fmax(std::fabs(x.x1 - c.x1), std::fabs(x.x2 - c.x2));
    return std::exp(x.x3) * std::cos(m) - std::fabs(cone.level);
}

double beam_boundary_distance(double level, double x3) {
    if (!(level > 0.0)) throw DomainError("beam_boundary_distance: level must be positive");
    const double v = level * std::exp(-x3);
    if (!(v <= 1.0 + 1e-12)) {
        std::ostringstream os;
        os << "beam_boundary_distance: height " << x3 << " lies below the cone vertex ln(" << level
           << ")";
        throw DomainError(os.str());
    }
    return std::asin(std::min(v, 1.0));
}

double separation_constant_a(double x0_abs) {
    if (!(x0_abs > 0.0) || x0_abs == 1.0 || !std::isfinite(x0_abs)) {
        throw DomainError("separation_constant_a: |x0| must be positive, finite and different from 1");
    }
    const double log_gap = std::fabs(std::log(x0_abs));
    const double from_gap = std::log(std::sqrt(2.0) * (kTwoPi / log_gap + 1.0));
    return std::max(from_gap, 0.5 * std::log(3.0)) + 1e-9;
}

LogSquareQuantities logsquare_quantities(double t1, double t2) {
    if (!(t1 < t2)) throw DomainError("logsquare_quantities: requires t1 < t2");
    const double growth = std::exp(2.0 * (t2 - t1));
    if (!(growth > 2.0)) {
        throw DegenerateError("logsquare_quantities: exp(2 (t2 - t1)) <= 2, the trapezoid is empty");
    }
    LogSquareQuantities q;
    q.area_image = 0.25 * kPi * (std::exp(2.0 * t2) - std::exp(2.0 * t1));
    q.area_trapezoid = 0.5 * std::exp(2.0 * t2) - std::exp(2.0 * t1);
    q.ratio = 0.25 * kPi * (growth - 1.0) / (0.5 * growth - 1.0);
    return q;
}

namespace {

void validate_ball_data(double r0, double x0_abs, double lambda) {
    if (!(x0_abs > 0.0) || x0_abs == 1.0 || !std::isfinite(x0_abs)) {
        throw DomainError("|x0| must be positive, finite and different from 1");
    }
    if (!(r0 > 0.0 && r0 < x0_abs)) throw DomainError("r0 must satisfy 0 < r0 < |x0|");
    if (!(lambda >= 1.0) || !std::isfinite(lambda)) throw DomainError("lambda must be >= 1");
}

}  // namespace

double coverage_constant_C(double r0, double x0_abs, double lambda) {
    validate_ball_data(r0, x0_abs, lambda);
    const double log_gap = std::fabs(std::log(x0_abs));
    const double denom = std::ldexp(1.0, 11) * std::pow(lambda, 4) * kPi * std::exp(2.0 * x0_abs) *
                         (1.0 + 4.0 * kPi / log_gap);
    return r0 * r0 / denom;
}

double tsmall_bound(double r0, double x0_abs, double lambda) {
    validate_ball_data(r0, x0_abs, lambda);
    return r0 * r0 / (std::ldexp(1.0, 9) * lambda * lambda * std::exp(2.0 * x0_abs));
}

DensityConstants make_density_constants(double x0_abs, double r0, double lambda) {
    DensityConstants k;
    k.x0_abs = x0_abs;
    k.r0 = r0;
    k.lambda = lambda;
    k.a = separation_constant_a(x0_abs);
    k.C = coverage_constant_C(r0, x0_abs, lambda);
    k.eps = k.C / 16.0;
    return k;
}

Point3 project_to_plane_M(const Point3& P, const YPoint& u, std::int64_t M) {
    if (u.face != YFace::x1_pos || !y_point_valid(u)) {
        throw DomainError("project_to_plane_M: expects a valid point of the face x1 = p1 + 1");
    }
    const double c = kHalfPi + static_cast<double>(M) * kPi - P.x1;
    if (!(c > 0.0)) {
        std::ostringstream os;
        os << "project_to_plane_M: plane x1 = pi/2 + " << M << " pi is not ahead of P";
        throw DegenerateError(os.str());
    }
    return {kHalfPi + static_cast<double>(M) * kPi, P.x2 + c * u.u2, P.x3 + c * u.u3};
}

double StripSpec::plane_x1() const noexcept { return kHalfPi + static_cast<double>(M) * kPi; }
double StripSpec::x2_lo() const noexcept { return kHalfPi + static_cast<double>(l - 1) * kPi + eta; }
double StripSpec::x2_hi() const noexcept { return kHalfPi + static_cast<double>(l) * kPi - eta; }

void validate(const StripSpec& spec) {
    if (!(spec.eta > 0.0 && spec.eta < 0.25 * kPi)) {
        throw DomainError("strip margin eta must lie in (0, pi/4)");
    }
    if (!std::isfinite(spec.s)) throw DomainError("strip height s must be finite");
}

bool strip_contains(const StripSpec& spec, const Point3& x) {
    return std::fabs(x.x1 - spec.plane_x1()) <= 1e-9 && x.x2 > spec.x2_lo() && x.x2 < spec.x2_hi() &&
           x.x3 > spec.s;
}

FaceSelection adjacent_face(double level, std::int64_t M, std::int64_t l) {
    require_level(level);
    const BeamIndex front{M, l};
    const int wanted = level > 0.0 ? 0 : 1;
    if (front.parity() == wanted) return {cone_in_beam(level, front), FaceId::plus_x1};
    return {cone_in_beam(level, BeamIndex{M + 1, l}), FaceId::minus_x1};
}

RayHit ray_cone_intersect(const Point3& P, const Point3& alpha, const ConeSurface& cone, FaceId face,
                          int scan_samples) {
    if (scan_samples < 1) throw DomainError("ray_cone_intersect: scan_samples must be positive");
    const Point3 v = alpha - P;
    const PlanePoint c = cone_beam(cone).center();
    const PlanePoint a0 = face_frame(face, P.x1 - c.x1, P.x2 - c.x2);
    const PlanePoint a1 = face_frame(face, v.x1, v.x2);

    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    clip(a0.x1 - a0.x2, a1.x1 - a1.x2, lo, hi);
    clip(a0.x1 + a0.x2, a1.x1 + a1.x2, lo, hi);
    clip(kHalfPi - a0.x1, -a1.x1, lo, hi);
    // keep exp(x3) finite
    clip(kMaxExponent - P.x3, -v.x3, lo, hi);
    if (!(lo <= hi)) throw NoIntersectionError("ray does not cross the face quadrant", lo, hi);
    if (std::isinf(hi)) hi = lo + 1e6;

    auto phi = [&](double s) { return cone_residual(cone, P + s * v); };
    const double tol = 1e-10 * std::max(1.0, std::fabs(cone.level));

    auto make_hit = [&](double s, double value) {
        const Point3 x = P + s * v;
        return RayHit{x, s, std::fabs(value), std::fabs(value) * std::exp(-x.x3)};
    };

    double s_prev = lo;
    double f_prev = phi(lo);
    if (f_prev == 0.0) return make_hit(lo, f_prev);
    double a = 0.0, b = 0.0, fa = 0.0, fb = 0.0;
    bool bracketed = false;
    for (int k = 1; k <= scan_samples; ++k) {
        const double s = (k == scan_samples) ? hi : lo + (hi - lo) * k / scan_samples;
        const double f = phi(s);
        if (f == 0.0) return make_hit(s, f);
        if ((f < 0.0) != (f_prev < 0.0)) {
            a = s_prev;
            fa = f_prev;
            b = s;
            fb = f;
            bracketed = true;
            break;
        }
        s_prev = s;
        f_prev = f;
    }
    if (!bracketed) throw NoIntersectionError("no sign change of the cone residual along the ray", lo, hi);

    for (int it = 0; it < kMaxBisections; ++it) {
        const bool narrow = (b - a) <= 1e-12 * std::max(1.0, std::fabs(b));
        if (narrow && std::min(std::fabs(fa), std::fabs(fb)) <= tol) break;
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double fm = phi(mid);
        if (fm == 0.0) return make_hit(mid, fm);
        if ((fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }
    return std::fabs(fa) <= std::fabs(fb) ? make_hit(a, fa) : make_hit(b, fb);
}

}  // namespace zorichlab
