#include "zorich/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "zorich/errors.hpp"
#include "zorich/parallel.hpp"
#include "zorich/zorich_map.hpp"

namespace zorichlab {

namespace {

void check_probe(double radius, int n_dirs) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("Lipschitz probe radius must be positive");
    if (n_dirs < 32) throw DomainError("Lipschitz probe needs at least 32 directions");
}

LipschitzSample finish(double hi, double lo) {
    if (!(lo >= 1e-14)) {
        std::ostringstream os;
        os << "lower pointwise Lipschitz constant " << lo << " below 1e-14 (map locally constant?)";
        throw DegenerateError(os.str());
    }
    return {hi, lo};
}

template <class Sample, class Point>
DistortionEstimate reduce(const std::vector<Point>& samples, double radius, unsigned threads,
                          const Sample& sample) {
    if (samples.empty()) throw DomainError("relative_distortion: empty sample set");
    std::vector<LipschitzSample> out(samples.size());
    parallel_for(samples.size(), threads, [&](std::size_t i) { out[i] = sample(samples[i]); });
    DistortionEstimate d;
    d.sup_upper = 0.0;
    d.inf_lower = std::numeric_limits<double>::infinity();
    for (const auto& s : out) {
        d.sup_upper = std::max(d.sup_upper, s.upper);
        d.inf_lower = std::min(d.inf_lower, s.lower);
    }
    d.D = d.sup_upper / d.inf_lower;
    d.sample_count = static_cast<std::int64_t>(samples.size());
    d.radius = radius;
    return d;
}

double tetra_volume(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
    return std::fabs(dot(b - a, cross(c - a, d - a))) / 6.0;
}

double triangle_area(const Point3& a, const Point3& b, const Point3& c) {
    return 0.5 * norm(cross(b - a, c - a));
}

}  // namespace

std::vector<Point3> fibonacci_directions(int n) {
    std::vector<Point3> dirs;
    dirs.reserve(static_cast<std::size_t>(std::max(n, 0)));
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < n; ++k) {
        const double z = 1.0 - (2.0 * k + 1.0) / n;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * k;
        dirs.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
    }
    return dirs;
}

std::vector<PlanePoint> circle_directions(int n) {
    std::vector<PlanePoint> dirs;
    dirs.reserve(static_cast<std::size_t>(std::max(n, 0)));
    for (int k = 0; k < n; ++k) {
        const double a = kTwoPi * k / n;
        dirs.push_back({std::cos(a), std::sin(a)});
    }
    return dirs;
}

LipschitzSample pointwise_lipschitz(const Map3& f, const Point3& x, double radius, int n_dirs) {
    check_probe(radius, n_dirs);
    const Point3 fx = f(x);
    double hi = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (const Point3& v : fibonacci_directions(n_dirs)) {
        const double q = distance(f(x + radius * v), fx) / radius;
        hi = std::max(hi, q);
        lo = std::min(lo, q);
    }
    return finish(hi, lo);
}

LipschitzSample pointwise_lipschitz(const SurfaceMap& f, const PlanePoint& p, double radius, int n_dirs) {
    check_probe(radius, n_dirs);
    const Point3 fp = f(p);
    double hi = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (const PlanePoint& v : circle_directions(n_dirs)) {
        const double q = distance(f({p.x1 + radius * v.x1, p.x2 + radius * v.x2}), fp) / radius;
        hi = std::max(hi, q);
        lo = std::min(lo, q);
    }
    return finish(hi, lo);
}

LipschitzSample zorich_lipschitz(const Point3& x, double radius, int n_dirs) {
    if (!(branch_distance(x) > 10.0 * radius)) {
        std::ostringstream os;
        os << "zorich_lipschitz: point within 10 radius of the branch set (distance " << branch_distance(x)
           << ")";
        throw DomainError(os.str());
    }
    return pointwise_lipschitz(Map3([](const Point3& y) { return zorich(y); }), x, radius, n_dirs);
}

DistortionEstimate relative_distortion(const Map3& f, const std::vector<Point3>& samples, double radius,
                                       int n_dirs, unsigned threads) {
    return reduce(samples, radius, threads,
                  [&](const Point3& x) { return pointwise_lipschitz(f, x, radius, n_dirs); });
}

DistortionEstimate relative_distortion(const SurfaceMap& f, const std::vector<PlanePoint>& samples,
                                       double radius, int n_dirs, unsigned threads) {
    return reduce(samples, radius, threads,
                  [&](const PlanePoint& p) { return pointwise_lipschitz(f, p, radius, n_dirs); });
}

double lambda_h_estimate(int grid_n, unsigned threads) {
    if (grid_n < 64) throw DomainError("lambda_h_estimate: grid_n must be at least 64");
    const SurfaceMap h = [](const PlanePoint& p) { return h_extended(p).as_point(); };
    const double step = kPi / grid_n;
    std::vector<double> rows(static_cast<std::size_t>(grid_n), 1.0);
    parallel_for(rows.size(), threads, [&](std::size_t i) {
        double worst = 1.0;
        const double x1 = -kHalfPi + (static_cast<double>(i) + 0.5) * step;
        for (int j = 0; j < grid_n; ++j) {
            const double x2 = -kHalfPi + (j + 0.5) * step;
            const LipschitzSample s = pointwise_lipschitz(h, {x1, x2}, 1e-6, 64);
            worst = std::max({worst, s.upper, 1.0 / s.lower});
        }
        rows[i] = worst;
    });
    return *std::max_element(rows.begin(), rows.end());
}

SlabReport verify_slab_bound(const Slab& slab, std::int64_t n_samples, double lambda_hat, std::uint64_t seed,
                             double slack, unsigned threads) {
    if (!(slab.t1 < slab.t2)) throw DomainError("slab requires t1 < t2");
    if (!(slab.t2 - slab.t1 <= 20.0)) throw DomainError("slab thickness must be at most 20");
    if (n_samples < 1000) throw DomainError("verify_slab_bound needs at least 1000 samples");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u1(-kHalfPi, 3.0 * kHalfPi), u2(-kHalfPi, kHalfPi),
        u3(slab.t1, slab.t2);
    std::vector<Point3> pts;
    pts.reserve(static_cast<std::size_t>(n_samples));
    while (static_cast<std::int64_t>(pts.size()) < n_samples) {
        const Point3 x{u1(rng), u2(rng), u3(rng)};
        if (branch_distance(x) > 10.0 * kDefaultRadius) pts.push_back(x);
    }
    const DistortionEstimate d = reduce(pts, kDefaultRadius, threads, [](const Point3& x) {
        return zorich_lipschitz(x, kDefaultRadius, kDefaultDirections);
    });

    SlabReport r;
    r.slab = slab;
    r.D_est = d.D;
    r.lambda_hat = lambda_hat;
    r.bound = lambda_hat * lambda_hat * std::exp(slab.t2 - slab.t1) * (1.0 + slack);
    r.samples = d.sample_count;
    r.pass = r.D_est <= r.bound;
    return r;
}

namespace {

AreaTransportReport conclude(AreaTransportReport r, double inflation) {
    const double lam = r.lambda * (1.0 + inflation);
    const double base = r.mU / r.mE;
    const double scale = std::pow(lam, r.dimension);
    r.lower = base / scale;
    r.upper = base * scale;
    r.ratio = r.mfU / r.mfE;
    r.pass = r.mE > 0.0 && r.mU > 0.0 && r.lower <= r.ratio && r.ratio <= r.upper;
    return r;
}

}  // namespace

AreaTransportReport verify_area_transport(const std::string& name, const Map3& f, const Region3& E,
                                          const Region3& U, double lambda, int n, double inflation,
                                          unsigned threads) {
    if (static_cast<double>(n) * n * n < 1e6) throw DomainError("area transport needs at least 1e6 cells");
    const Point3 step{(E.hi.x1 - E.lo.x1) / n, (E.hi.x2 - E.lo.x2) / n, (E.hi.x3 - E.lo.x3) / n};
    const std::size_t m = static_cast<std::size_t>(n) + 1;
    auto vertex = [&](std::size_t i, std::size_t j, std::size_t k) {
        return Point3{E.lo.x1 + i * step.x1, E.lo.x2 + j * step.x2, E.lo.x3 + k * step.x3};
    };
    std::vector<Point3> img(m * m * m);
    parallel_for(m, threads, [&](std::size_t i) {
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k) img[(i * m + j) * m + k] = f(vertex(i, j, k));
    });

    struct Acc {
        double cE = 0, cU = 0, vE = 0, vU = 0;
    };
    std::vector<Acc> acc(static_cast<std::size_t>(n));
    parallel_for(acc.size(), threads, [&](std::size_t i) {
        Acc a;
        for (std::size_t j = 0; j < m - 1; ++j) {
            for (std::size_t k = 0; k < m - 1; ++k) {
                const Point3 c = vertex(i, j, k) + 0.5 * step;
                if (!E.contains(c)) continue;
                auto at = [&](int di, int dj, int dk) { return img[((i + di) * m + j + dj) * m + k + dk]; };
                const Point3 p000 = at(0, 0, 0), p111 = at(1, 1, 1);
                // six tetrahedra around the main diagonal
                const Point3 ring[6] = {at(1, 0, 0), at(1, 1, 0), at(0, 1, 0), at(0, 1, 1), at(0, 0, 1), at(1, 0, 1)};
                double v = 0.0;
                for (int t = 0; t < 6; ++t) v += tetra_volume(p000, ring[t], ring[(t + 1) % 6], p111);
                a.cE += 1.0;
                a.vE += v;
                if (U.contains(c)) {
                    a.cU += 1.0;
                    a.vU += v;
                }
            }
        }
        acc[i] = a;
    });

    AreaTransportReport r;
    r.name = name;
    r.dimension = 3;
    const double cell = step.x1 * step.x2 * step.x3;
    for (const Acc& a : acc) {
        r.mE += a.cE * cell;
        r.mU += a.cU * cell;
        r.mfE += a.vE;
        r.mfU += a.vU;
    }
    r.lambda = lambda;
    r.cells = static_cast<std::int64_t>(n) * n * n;
    return conclude(r, inflation);
}

AreaTransportReport verify_area_transport(const std::string& name, const SurfaceMap& f, const Region2& E,
                                          const Region2& U, double lambda, int n, double inflation,
                                          unsigned threads) {
    if (static_cast<double>(n) * n < 1e6) throw DomainError("area transport needs at least 1e6 cells");
    const PlanePoint step{(E.hi.x1 - E.lo.x1) / n, (E.hi.x2 - E.lo.x2) / n};
    const std::size_t m = static_cast<std::size_t>(n) + 1;
    auto vertex = [&](std::size_t i, std::size_t j) {
        return PlanePoint{E.lo.x1 + i * step.x1, E.lo.x2 + j * step.x2};
    };
    std::vector<Point3> img(m * m);
    parallel_for(m, threads, [&](std::size_t i) {
        for (std::size_t j = 0; j < m; ++j) img[i * m + j] = f(vertex(i, j));
    });

    struct Acc {
        double cE = 0, cU = 0, aE = 0, aU = 0;
    };
    std::vector<Acc> acc(static_cast<std::size_t>(n));
    parallel_for(acc.size(), threads, [&](std::size_t i) {
        Acc a;
        for (std::size_t j = 0; j < m - 1; ++j) {
            const PlanePoint v = vertex(i, j);
            const PlanePoint c{v.x1 + 0.5 * step.x1, v.x2 + 0.5 * step.x2};
            if (!E.contains(c)) continue;
            const Point3& p00 = img[i * m + j];
            const Point3& p10 = img[(i + 1) * m + j];
            const Point3& p01 = img[i * m + j + 1];
            const Point3& p11 = img[(i + 1) * m + j + 1];
            const double area = triangle_area(p00, p10, p11) + triangle_area(p00, p11, p01);
            a.cE += 1.0;
            a.aE += area;
            if (U.contains(c)) {
                a.cU += 1.0;
                a.aU += area;
            }
        }
        acc[i] = a;
    });

    AreaTransportReport r;
    r.name = name;
    r.dimension = 2;
    const double cell = step.x1 * step.x2;
    for (const Acc& a : acc) {
        r.mE += a.cE * cell;
        r.mU += a.cU * cell;
        r.mfE += a.aE;
        r.mfU += a.aU;
    }
    r.lambda = lambda;
    r.cells = static_cast<std::int64_t>(n) * n;
    return conclude(r, inflation);
}

SurfaceMap projection_plane_map(const Point3& P, std::int64_t M) {
    return [P, M](const PlanePoint& u) { return project_to_plane_M(P, {YFace::x1_pos, u.x1, u.x2}, M); };
}

SurfaceMap face_projection_map(const Point3& P, double level, std::int64_t M, std::int64_t l) {
    const FaceSelection face = adjacent_face(level, M, l);
    const double plane = kHalfPi + static_cast<double>(M) * kPi;
    return [P, face, plane](const PlanePoint& q) {
        return ray_cone_intersect(P, {plane, q.x1, q.x2}, face.cone, face.face, 32).point;
    };
}

}  // namespace zorichlab
