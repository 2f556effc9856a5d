#pragma once

#include <cstdint>

#include "zorich/automorphy.hpp"
#include "zorich/geometry.hpp"
#include "zorich/lines.hpp"
#include "zorich/zorich_map.hpp"

namespace zorichlab {

// The component element(S_level) of Z^{-1}(H_level), H_level = {x3 = level}.
// For level > 0 the base cone lies in B0 = beam (0, 0) with vertex (0, 0, ln level):
//   x3 = ln(level / cos max(|x1|, |x2|)).
// For level < 0 it is the mirror image across x1 = pi/2, lying in B1 = beam (1, 0).
struct ConeSurface {
    double level = 1.0;
    GroupElement element;
};

BeamIndex cone_beam(const ConeSurface& cone);

// Component of Z^{-1}(H_level) inside `beam`. Throws DomainError for level == 0 and
// ParityMismatchError when the beam maps to the wrong half-space.
ConeSurface cone_in_beam(double level, const BeamIndex& beam);

// Faces are named by their outward direction in world coordinates, seen from the
// axis of the beam that holds the cone.
enum class FaceId { plus_x1, minus_x1, plus_x2, minus_x2 };

// One face cut between two heights, F ∩ {t1 < x3 < t2}.
struct FaceRegion {
    ConeSurface cone;
    FaceId face = FaceId::plus_x1;
    double t1 = 0.0;
    double t2 = 1.0;
};

// Height of the base cone over p: ln(level / cos M(p)).
// Throws DomainError unless level > 0 and M(p) < pi/2.
double cone_height(double level, const PlanePoint& p);

// Point of `cone` over the beam-local coordinate p (p relative to the base beam).
Point3 cone_point(const ConeSurface& cone, const PlanePoint& p);

// exp(x3) cos M(x - center) - |level|; zero exactly on the cone.
double cone_residual(const ConeSurface& cone, const Point3& x);

// Distance from the height-x3 cross-section of S_level to the beam boundary:
// arcsin(level exp(-x3)). Throws DomainError below the vertex.
double beam_boundary_distance(double level, double x3);

// Gap constant: for t1 > ln|ln x0_abs| and t2 > t1 + a,
//   exp(t2)/sqrt(2) - exp(t1) > 2 pi,   and exp(2a) > 3.
double separation_constant_a(double x0_abs);

struct LogSquareQuantities {
    double area_image = 0.0;      // area of Z(F(t1, t2)), a quarter annulus sector
    double area_trapezoid = 0.0;  // inscribed trapezoid between x1 = e^t1, x1 = e^t2/sqrt2
    double ratio = 0.0;
};

// Throws DegenerateError when exp(2 (t2 - t1)) <= 2.
LogSquareQuantities logsquare_quantities(double t1, double t2);

// Lower bound on the proportion of a face band that lies in f^{-1}(U) for U = B(x0, r0).
double coverage_constant_C(double r0, double x0_abs, double lambda);

// Intermediate bound r0^2 / (2^9 lambda^2 exp(2 |x0|)) on the trapezoid proportion.
double tsmall_bound(double r0, double x0_abs, double lambda);

struct DensityConstants {
    double x0_abs = 0.0;
    double r0 = 0.0;
    double lambda = 1.0;
    double a = 0.0;
    double C = 0.0;
    double eps = 0.0;  // C / 16
};

DensityConstants make_density_constants(double x0_abs, double r0, double lambda);

// Central projection from P of the face x1 = p1 + 1 of Y onto the plane
// x1 = pi/2 + M pi: P + c (1, u2, u3) with c = pi/2 + M pi - p1.
// Throws DomainError for an invalid Y-point and DegenerateError when c <= 0.
Point3 project_to_plane_M(const Point3& P, const YPoint& u, std::int64_t M);

// Vertical strip {x1 = pi/2 + M pi} x (pi/2 + (l-1) pi + eta, pi/2 + l pi - eta) x (s, inf).
struct StripSpec {
    std::int64_t M = 0;
    std::int64_t l = 0;
    double eta = 0.1;
    double s = 0.0;

    double plane_x1() const noexcept;
    double x2_lo() const noexcept;  // pi/2 + (l-1) pi + eta
    double x2_hi() const noexcept;  // pi/2 + l pi - eta
};

// Throws DomainError unless eta lies in (0, pi/4).
void validate(const StripSpec& spec);

bool strip_contains(const StripSpec& spec, const Point3& x);

struct FaceSelection {
    ConeSurface cone;
    FaceId face = FaceId::plus_x1;
};

// The face F_l of the component of Z^{-1}(H_level) that faces the plane
// x1 = pi/2 + M pi across the strip K_l: the +x1 face of the cone in beam (M, l)
// or the -x1 face of the cone in beam (M + 1, l), whichever exists.
FaceSelection adjacent_face(double level, std::int64_t M, std::int64_t l);

struct RayHit {
    Point3 point;
    double parameter = 0.0;         // point = P + parameter (alpha - P)
    double residual = 0.0;          // |cone_residual|
    double scaled_residual = 0.0;   // |cos M - |level| exp(-x3)|
};

// First point (smallest parameter > 0) where the ray from P through alpha meets the
// given face of the cone. Coarse scan of 1024 samples over the admissible range,
// then bisection. Throws NoIntersectionError when no sign change is bracketed.
// A coarser scan is enough where the residual is known to change sign once.
inline constexpr int kRayScanSamples = 1024;
RayHit ray_cone_intersect(const Point3& P, const Point3& alpha, const ConeSurface& cone, FaceId face,
                          int scan_samples = kRayScanSamples);

}  // namespace zorichlab
