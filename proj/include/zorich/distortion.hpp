#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "zorich/geometry.hpp"
#include "zorich/preimage_geometry.hpp"

namespace zorichlab {

using Map3 = std::function<Point3(const Point3&)>;
// Map from a planar parameter domain into R^3 (surface variant, the parameter
// plane carries its Euclidean metric).
using SurfaceMap = std::function<Point3(const PlanePoint&)>;

inline constexpr double kDefaultRadius = 1e-5;
inline constexpr int kDefaultDirections = 64;

struct LipschitzSample {
    double upper = 0.0;
    double lower = 0.0;
};

struct DistortionEstimate {
    double sup_upper = 0.0;
    double inf_lower = 0.0;
    double D = 1.0;
    std::int64_t sample_count = 0;
    double radius = 0.0;
};

// n quasi-uniform unit vectors, Fibonacci lattice on the sphere.
std::vector<Point3> fibonacci_directions(int n);
// n unit vectors at angles 2 pi k / n.
std::vector<PlanePoint> circle_directions(int n);

// max / min of |f(x + r v) - f(x)| / r over the direction set.
// Throws DomainError for radius <= 0 or n_dirs < 32, DegenerateError if lower < 1e-14.
LipschitzSample pointwise_lipschitz(const Map3& f, const Point3& x, double radius = kDefaultRadius,
                                    int n_dirs = kDefaultDirections);
LipschitzSample pointwise_lipschitz(const SurfaceMap& f, const PlanePoint& p,
                                    double radius = kDefaultRadius, int n_dirs = kDefaultDirections);

// Same for Z itself; additionally requires branch_distance(x) > 10 radius.
LipschitzSample zorich_lipschitz(const Point3& x, double radius = kDefaultRadius,
                                 int n_dirs = kDefaultDirections);

DistortionEstimate relative_distortion(const Map3& f, const std::vector<Point3>& samples,
                                       double radius = kDefaultRadius, int n_dirs = kDefaultDirections,
                                       unsigned threads = 1);
DistortionEstimate relative_distortion(const SurfaceMap& f, const std::vector<PlanePoint>& samples,
                                       double radius = kDefaultRadius, int n_dirs = kDefaultDirections,
                                       unsigned threads = 1);

// Numerical lambda(h): max of max(upper, 1/lower) for h over the cell centers of a
// grid_n x grid_n grid of the square (radius 1e-6, 64 directions). grid_n >= 64.
double lambda_h_estimate(int grid_n, unsigned threads = 1);

struct Slab {
    double t1 = 0.0;
    double t2 = 1.0;
};

struct SlabReport {
    Slab slab;
    double D_est = 0.0;
    double bound = 0.0;
    double lambda_hat = 1.0;
    std::int64_t samples = 0;
    bool pass = false;
};

// D(Z, R^2 x (t1, t2)) from n_samples random points of one period (seeded), against
// lambda_hat^2 e^{t2 - t1} (1 + slack). Requires t2 - t1 <= 20 and n_samples >= 1000.
SlabReport verify_slab_bound(const Slab& slab, std::int64_t n_samples, double lambda_hat,
                             std::uint64_t seed = 1, double slack = 0.01, unsigned threads = 1);

// Box [lo, hi] of the domain with a membership predicate.
struct Region3 {
    Point3 lo;
    Point3 hi;
    std::function<bool(const Point3&)> contains;
};

struct Region2 {
    PlanePoint lo;
    PlanePoint hi;
    std::function<bool(const PlanePoint&)> contains;
};

// Counting measures on a regular grid of the bounding box of E: m(E), m(U) count
// cells whose center lies in the region; m(f(E)), m(f(U)) add up the volume (area)
// of the images of those cells, cut into tetrahedra (triangles).
struct AreaTransportReport {
    std::string name;
    int dimension = 3;
    double mE = 0.0, mU = 0.0, mfE = 0.0, mfU = 0.0;
    double lambda = 1.0;  // measured D(f, E), before inflation
    double lower = 0.0;   // lambda'^-n m(U)/m(E)
    double ratio = 0.0;   // m(f(U))/m(f(E))
    double upper = 0.0;   // lambda'^n m(U)/m(E)
    std::int64_t cells = 0;
    bool pass = false;
};

// lambda' = lambda (1 + inflation). cells_per_axis^3 >= 1e6 (3-D) and ^2 >= 1e6 (2-D).
AreaTransportReport verify_area_transport(const std::string& name, const Map3& f, const Region3& E,
                                          const Region3& U, double lambda, int cells_per_axis = 100,
                                          double inflation = 0.02, unsigned threads = 1);
AreaTransportReport verify_area_transport(const std::string& name, const SurfaceMap& f,
                                          const Region2& E, const Region2& U, double lambda,
                                          int cells_per_axis = 1000, double inflation = 0.02,
                                          unsigned threads = 1);

// Surface map Pi_M on Y_1: (u2, u3) -> P + c (1, u2, u3).
SurfaceMap projection_plane_map(const Point3& P, std::int64_t M);

// Pi_{F_l}: strip point (x2, x3) on x1 = pi/2 + M pi -> first hit of the ray from P
// with the face F_l of the component of Z^{-1}(H_level).
SurfaceMap face_projection_map(const Point3& P, double level, std::int64_t M, std::int64_t l);

}  // namespace zorichlab
