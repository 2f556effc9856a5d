#include "zorich/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "zorich/automorphy.hpp"
#include "zorich/distortion.hpp"
#include "zorich/errors.hpp"
#include "zorich/parallel.hpp"
#include "zorich/preimage_geometry.hpp"
#include "zorich/zorich_map.hpp"

namespace zorichlab {

namespace {

using Clock = std::chrono::steady_clock;

CheckRecord upper(std::string name, std::string anchor, double value, double bound, double tol = 0.0) {
    CheckRecord r;
    r.name = std::move(name);
    r.anchor = std::move(anchor);
    r.value = value;
    r.bound = bound;
    r.tolerance = tol;
    r.pass = std::isfinite(value) && value <= bound;
    return r;
}

CheckRecord lower(std::string name, std::string anchor, double value, double bound) {
    CheckRecord r = upper(std::move(name), std::move(anchor), value, bound);
    r.pass = std::isfinite(value) && value >= bound;
    return r;
}

template <class F>
std::vector<CheckRecord> timed(F&& f) {
    const auto t0 = Clock::now();
    std::vector<CheckRecord> out = f();
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    for (auto& r : out) r.seconds = dt / static_cast<double>(out.size());
    return out;
}

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(6) << v;
    return s.str();
}

GeneratorWord random_word(std::mt19937_64& rng, int max_len) {
    std::uniform_int_distribution<int> len(0, max_len);
    std::uniform_int_distribution<int> sym(0, 4);
    GeneratorWord w;
    const int n = len(rng);
    for (int k = 0; k < n; ++k) w.push_back(static_cast<Generator>(sym(rng)));
    return w;
}

Point3 ray_plane_x1(const Point3& base, const Point3& d, double h) {
    return base + ((h - base.x1) / d.x1) * d;
}

std::int64_t scaled(std::int64_t full, VerifyLevel level, std::int64_t floor) {
    return level == VerifyLevel::full ? full : std::max(floor, full / 10);
}

}  // namespace

bool VerificationReport::pass() const noexcept {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

const CheckRecord* VerificationReport::find(const std::string& name) const noexcept {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

CheckSizes CheckSizes::for_level(VerifyLevel level) {
    CheckSizes s;
    if (level == VerifyLevel::full) return s;
    s.norm_samples = scaled(s.norm_samples, level, 1000);
    s.automorphy_samples = scaled(s.automorphy_samples, level, 1000);
    s.inverse_samples = scaled(s.inverse_samples, level, 1000);
    s.cone_samples = scaled(s.cone_samples, level, 1000);
    s.boundary_samples = scaled(s.boundary_samples, level, 1000);
    s.constant_a_samples = scaled(s.constant_a_samples, level, 100);
    s.area_ratio_samples = scaled(s.area_ratio_samples, level, 20);
    s.projection_samples = scaled(s.projection_samples, level, 1000);
    s.slabs = 5;
    s.face_configs = 2;
    s.strip_rays = scaled(s.strip_rays, level, 100);
    s.transport_configs = 4;
    s.coverage_lines = 1;
    s.excluded_budget = 1000000;
    s.base_sequence_scan = 100000;
    return s;
}

std::vector<LineSpec> coverage_lines(int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u2(0.05, 0.95), u3(1.2e-4, 2e-4);
    std::vector<LineSpec> out;
    while (static_cast<int>(out.size()) < count) {
        const YPoint a{YFace::x1_pos, u2(rng), u3(rng)};
        if (y_point_valid(a)) out.push_back(LineSpec::through({0, 0, 0}, a));
    }
    return out;
}

TraceOptions coverage_trace_options(std::int64_t budget) {
    TraceOptions o;
    o.budget = budget;
    o.h_max = -1.0;
    o.x3_lo = 8.0;
    o.x3_hi = 24.0;
    return o;
}

std::vector<CheckRecord> check_norm_law(const CheckSizes& sizes) {
    return timed([&] {
        std::mt19937_64 rng(101);
        std::uniform_real_distribution<double> c(-20, 20), h(-10, 10);
        double worst = 0.0;
        for (std::int64_t k = 0; k < sizes.norm_samples; ++k) {
            const Point3 x{c(rng), c(rng), h(rng)};
            const double e = std::exp(x.x3);
            worst = std::max(worst, std::fabs(norm(zorich(x)) - e) / e);
        }
        // inverse direction: sphere points go back to the plane x3 = ln r
        double worst_inv = 0.0;
        std::normal_distribution<double> g(0.0, 1.0);
        std::uniform_int_distribution<int> idx(-4, 4);
        for (std::int64_t k = 0; k < sizes.norm_samples / 10; ++k) {
            Point3 v{g(rng), g(rng), g(rng)};
            v *= 1.0 / norm(v);
            const double t = h(rng);
            BeamIndex beam{idx(rng), idx(rng)};
            if ((v.x3 >= 0.0) != (beam.parity() == 0)) beam.i += 1;
            const Point3 x = zorich_inverse(std::exp(t) * v, beam);
            worst_inv = std::max(worst_inv, std::fabs(x.x3 - t));
        }
        return std::vector<CheckRecord>{
            upper("norm_law", "horizontal planes go onto spheres: ||Z(x)| - exp(x3)| / exp(x3)", worst, 1e-12),
            upper("sphere_preimage", "sphere of radius r pulls back into the plane x3 = ln r", worst_inv, 1e-9),
        };
    });
}

std::vector<CheckRecord> check_automorphy(const CheckSizes& sizes) {
    return timed([&] {
        std::mt19937_64 rng(102);
        std::uniform_real_distribution<double> c(-10, 10), h(-8, 8);
        double worst = 0.0;
        std::int64_t fiber_failures = 0;
        for (std::int64_t k = 0; k < sizes.automorphy_samples; ++k) {
            const Point3 x{c(rng), c(rng), h(rng)};
            const GroupElement g = from_word(random_word(rng, 8));
            const Point3 gx = apply(g, x);
            worst = std::max(worst, distance(zorich(gx), zorich(x)) / std::max(1.0, std::exp(x.x3)));
            const auto found = find_g(x, gx);
            if (!found || distance(apply(*found, x), gx) > 1e-9 * std::max(1.0, norm(gx))) ++fiber_failures;
        }
        return std::vector<CheckRecord>{
            upper("strong_automorphy", "Z o g = Z for every element g of the group", worst, 1e-9),
            upper("fibers_are_orbits", "points with one image differ by a group element (failures)",
                  static_cast<double>(fiber_failures), 0.0),
        };
    });
}

std::vector<CheckRecord> check_inverse_branches(const CheckSizes& sizes) {
    return timed([&] {
        std::mt19937_64 rng(103);
        std::uniform_real_distribution<double> u(-kHalfPi, kHalfPi), h(-10.0, 10.0);
        std::uniform_int_distribution<int> idx(-5, 5);
        std::int64_t done[2] = {0, 0};
        double worst = 0.0;
        while (done[0] < sizes.inverse_samples || done[1] < sizes.inverse_samples) {
            const BeamIndex beam{idx(rng), idx(rng)};
            if (done[beam.parity()] >= sizes.inverse_samples) continue;
            const PlanePoint c = beam.center();
            const Point3 x{c.x1 + u(rng), c.x2 + u(rng), h(rng)};
            if (branch_distance(x) <= 1e-6) continue;
            const Point3 back = zorich_inverse(zorich(x), beam);
            worst = std::max(worst, distance(back, x) / std::max(1.0, norm(x)));
            ++done[beam.parity()];
        }
        return std::vector<CheckRecord>{
            upper("inverse_branches", "branch inverse on each beam undoes Z (relative error, both parities)", worst,
                  1e-9)};
    });
}

std::vector<CheckRecord> check_cones(const CheckSizes& sizes) {
    return timed([&] {
        std::mt19937_64 rng(104);
        std::uniform_real_distribution<double> c(-1.5, 1.5), lv(0.05, 20.0), w(-20, 20), h(-5, 30);
        std::uniform_int_distribution<int> t(-4, 4), f(0, 1), k6(-6, 6);
        double worst = 0.0;
        std::int64_t outside = 0;
        for (std::int64_t k = 0; k < sizes.cone_samples; ++k) {
            const double level = f(rng) ? lv(rng) : -lv(rng);
            const ConeSurface cone{level, GroupElement{t(rng), t(rng), f(rng) == 1}};
            const Point3 x = cone_point(cone, {c(rng), c(rng)});
            worst = std::max(worst, std::fabs(zorich(x).x3 - level) / std::max(1.0, std::fabs(level)));
            if (!(beam_of(horizontal(x)) == cone_beam(cone))) ++outside;
        }
        double worst_face = 0.0;
        for (std::int64_t k = 0; k < sizes.cone_samples; ++k) {
            const double x3 = h(rng);
            const Point3 a{kHalfPi + k6(rng) * kPi, w(rng), x3};
            const Point3 b{w(rng), kHalfPi + k6(rng) * kPi, x3};
            worst_face = std::max({worst_face, std::fabs(zorich(a).x3) / std::exp(x3),
                                   std::fabs(zorich(b).x3) / std::exp(x3)});
        }
        CheckRecord level = upper("cone_level", "the cone in each beam maps into the plane H_t: |Z3 - t| / max(1,|t|)",
                                  worst, 1e-9);
        if (outside > 0) {
            level.pass = false;
            level.note = std::to_string(outside) + " samples left their beam";
        }
        return std::vector<CheckRecord>{
            level,
            upper("beam_faces", "beam faces map into the plane x3 = 0: |Z3| / exp(x3)", worst_face, 1e-12),
        };
    });
}

std::vector<CheckRecord> check_boundary_distance(const CheckSizes& sizes) {
    return timed([&] {
        std::mt19937_64 rng(105);
        std::uniform_real_distribution<double> c(-1.5, 1.5), lv(0.05, 20.0);
        double worst = 0.0;
        for (std::int64_t k = 0; k < sizes.boundary_samples; ++k) {
            const double t = lv(rng);
            const PlanePoint p{c(rng), c(rng)};
            const double x3 = cone_height(t, p);
            worst = std::max(worst, std::fabs(beam_boundary_distance(t, x3) - (kHalfPi - max_norm(p))));
        }
        return std::vector<CheckRecord>{upper(
            "boundary_distance", "cone cross-section at height x3 is arcsin(t exp(-x3)) from the beam boundary",
            worst, 1e-9)};
    });
}

std::vector<CheckRecord> check_constant_a(const CheckSizes& sizes) {
    return timed([&] {
        std::mt19937_64 rng(106);
        std::uniform_real_distribution<double> x0(0.05, 20.0), u(-3.0, 3.0), off(1e-6, 5.0);
        std::int64_t violations = 0;
        std::int64_t n = 0;
        while (n < sizes.constant_a_samples) {
            const double x = x0(rng);
            if (std::fabs(x - 1.0) <= 0.05) continue;
            const double a = separation_constant_a(x);
            if (!(std::exp(2 * a) > 3.0)) ++violations;
            for (std::int64_t j = 0; j < sizes.constant_a_samples / 100 + 1; ++j) {
                const double t1 = std::log(std::fabs(std::log(x))) + off(rng);
                const double t2 = t1 + a + std::fabs(u(rng));
                if (!(std::exp(t2) / std::sqrt(2.0) - std::exp(t1) > kTwoPi)) ++violations;
            }
            ++n;
        }
        return std::vector<CheckRecord>{upper(
            "constant_a", "gap constant a: exp(t2)/sqrt2 - exp(t1) > 2 pi and exp(2a) > 3 (violations)",
            static_cast<double>(violations), 0.0)};
    });
}

std::vector<CheckRecord> check_preimage_disks(const CheckSizes& sizes) {
    return timed([&] {
        // disk of radius r0 / (8 lambda e^|x0|) in the plane x3 = ln|x0| around a preimage of x0
        const double lam = lambda_h_estimate(128);
        std::mt19937_64 rng(112);
        std::normal_distribution<double> g(0.0, 1.0);
        std::uniform_real_distribution<double> rad(0.1, 6.0), fr(0.05, 0.95), ang(0.0, kTwoPi);
        std::uniform_int_distribution<int> idx(-3, 3);
        double worst = 0.0;
        std::int64_t n = 0;
        while (n < sizes.constant_a_samples) {
            Point3 v{g(rng), g(rng), g(rng)};
            const double r = rad(rng);
            if (std::fabs(r - 1.0) < 0.05) continue;
            const Point3 x0 = (r / norm(v)) * v;
            const double r0 = fr(rng) * std::min(r, std::fabs(r - 1.0));
            BeamIndex beam{idx(rng), idx(rng)};
            if ((x0.x3 >= 0.0) != (beam.parity() == 0)) beam.i += 1;
            const Point3 p = zorich_inverse(x0, beam);
            const double rho = r0 / (8.0 * lam * std::exp(r));
            for (int k = 0; k < 64; ++k) {
                const double th = ang(rng);
                const double s = (k % 2 ? 1.0 : std::sqrt(fr(rng)));
                const Point3 q{p.x1 + s * rho * std::cos(th), p.x2 + s * rho * std::sin(th), p.x3};
                worst = std::max(worst, distance(zorich(q), x0) / r0);
            }
            ++n;
        }
        return std::vector<CheckRecord>{upper(
            "preimage_disk", "each component of the pre-image of U on the sphere |y| = |x0| holds a disk of radius "
                             "r0 / (8 lambda e^|x0|) (worst |Z(q) - x0| / r0)",
            worst, 1.0)};
    });
}

std::vector<CheckRecord> check_area_ratio(const CheckSizes& sizes) {
    return timed([&] {
        using boost::math::quadrature::gauss_kronrod;
        const double level = 1.5;
        // angular extent of the image of the +x1 face, located through the inverse map
        auto on_face = [&](double rho, double theta) {
            const Point3 x = zorich_inverse({rho * std::cos(theta), rho * std::sin(theta), level}, {0, 0});
            return x.x1 >= std::fabs(x.x2);
        };
        auto edge = [&](double rho, double inside, double outside) {
            for (int it = 0; it < 200 && std::fabs(outside - inside) > 1e-15; ++it) {
                const double mid = 0.5 * (inside + outside);
                (on_face(rho, mid) ? inside : outside) = mid;
            }
            return 0.5 * (inside + outside);
        };

        std::mt19937_64 rng(107);
        std::uniform_real_distribution<double> t1d(0.5, 2.5), dd(0.5 * std::log(2.0) + 0.05, 3.0);
        double worst_image = 0.0, worst_trap = 0.0;
        std::int64_t ratio_violations = 0;
        for (std::int64_t k = 0; k < sizes.area_ratio_samples; ++k) {
            const double t1 = t1d(rng);
            const double t2 = t1 + dd(rng);
            const auto q = logsquare_quantities(t1, t2);
            const double r1 = std::sqrt(std::exp(2 * t1) - level * level);
            const double r2 = std::sqrt(std::exp(2 * t2) - level * level);
            const double th_hi = edge(0.5 * (r1 + r2), 0.0, kHalfPi);
            const double th_lo = edge(0.5 * (r1 + r2), 0.0, -kHalfPi);
            // area in polar coordinates; the radial limits are where |Z(x)| = exp(t)
            const double area = gauss_kronrod<double, 15>::integrate(
                [&](double) {
                    return gauss_kronrod<double, 15>::integrate([](double rho) { return rho; }, r1, r2, 0, 1e-14);
                },
                th_lo, th_hi, 0, 1e-14);
            const double trap = gauss_kronrod<double, 15>::integrate([](double x1) { return 2.0 * x1; },
                                                                     std::exp(t1), std::exp(t2) / std::sqrt(2.0), 0,
                                                                     1e-14);
            worst_image = std::max(worst_image, std::fabs(area - q.area_image) / q.area_image);
            worst_trap = std::max(worst_trap, std::fabs(trap - q.area_trapezoid) / q.area_trapezoid);
        }
        // ratio below 2 pi once t2 - t1 >= a
        std::uniform_real_distribution<double> x0(0.05, 20.0), extra(0.0, 3.0);
        for (std::int64_t k = 0; k < sizes.area_ratio_samples; ++k) {
            const double x = x0(rng);
            if (std::fabs(x - 1.0) <= 0.05) continue;
            const double a = separation_constant_a(x);
            if (!(logsquare_quantities(0.7, 0.7 + a + extra(rng)).ratio < kTwoPi)) ++ratio_violations;
        }
        const double at3 = logsquare_quantities(1.0, 1.0 + 0.5 * std::log(3.0)).ratio;
        return std::vector<CheckRecord>{
            upper("logsquare_area", "image of a cone-face band: closed form vs quadrature (relative)",
                  std::max(worst_image, worst_trap), 1e-9),
            upper("area_ratio_bound", "area ratio of log-square to trapezoid below 2 pi once the gap is at least a "
                                      "(violations)",
                  static_cast<double>(ratio_violations), 0.0),
            upper("area_ratio_at_3", "ratio equals pi when exp(2 (t2 - t1)) = 3: |ratio - pi|", std::fabs(at3 - kPi),
                  1e-12),
        };
    });
}

std::vector<CheckRecord> check_projection(const CheckSizes& sizes) {
    return timed([&] {
        std::mt19937_64 rng(108);
        std::uniform_real_distribution<double> c(-3, 3), u2(-0.99, 0.99), u3(0.01, 3.0);
        std::uniform_int_distribution<int> m(1, 6);
        double worst = 0.0;
        for (std::int64_t k = 0; k < sizes.projection_samples; ++k) {
            const Point3 P{c(rng), c(rng), c(rng)};
            const YPoint u{YFace::x1_pos, u2(rng), u3(rng)};
            if (!y_point_valid(u)) continue;
            const int M = m(rng);
            const Point3 got = project_to_plane_M(P, u, M);
            const Point3 want = ray_plane_x1(P, y_offset(u), kHalfPi + M * kPi);
            worst = std::max(worst, distance(got, want) / std::max(1.0, norm(want)));
        }
        double worst_d = 0.0;
        std::uniform_real_distribution<double> p2(0.05, 0.6), p3(0.2, 2.0);
        for (int k = 0; k < 5; ++k) {
            const Point3 P{c(rng), c(rng), c(rng)};
            if (P.x1 > 1.0) continue;
            const double a = p2(rng), b = p3(rng);
            std::vector<PlanePoint> pts;
            for (int i = 0; i < 8; ++i)
                for (int j = 0; j < 8; ++j) pts.push_back({a + 0.03 * i, b + 0.1 * j});
            worst_d = std::max(worst_d, std::fabs(relative_distortion(projection_plane_map(P, m(rng)), pts).D - 1.0));
        }
        return std::vector<CheckRecord>{
            upper("projection_closed_form", "central projection of Y_1 onto x1 = pi/2 + M pi vs ray-plane oracle",
                  worst, 1e-12),
            upper("projection_distortion", "central projection of Y_1 is conformal: |D - 1|", worst_d, 1e-6),
        };
    });
}

std::vector<CheckRecord> check_slabs(const CheckSizes& sizes, unsigned threads, double bound_scale) {
    return timed([&] {
        const double lam = lambda_h_estimate(128, threads);
        const double lam_fine = lambda_h_estimate(256, threads);
        std::mt19937_64 rng(109);
        std::uniform_real_distribution<double> t1(-5, 5), dt(1e-3, 3.0);
        double worst = 0.0;
        for (int k = 0; k < sizes.slabs; ++k) {
            const double a = t1(rng);
            const auto r = verify_slab_bound({a, a + dt(rng)}, 1000, lam, 200 + k, 0.01, threads);
            worst = std::max(worst, r.D_est / (r.bound * bound_scale));
        }
        CheckRecord stab = upper("lambda_stability", "bi-Lipschitz constant of h stable under grid refinement "
                                                     "(128 vs 256, relative)",
                                 std::fabs(lam - lam_fine) / lam_fine, 0.02);
        stab.note = "lambda_hat=" + fmt(lam) + " fine=" + fmt(lam_fine);
        CheckRecord slab = upper("slab_bound", "distortion of Z on a slab at most lambda^2 exp(t2 - t1) (1.01): "
                                               "worst D / bound",
                                 worst, 1.0, 0.01);
        return std::vector<CheckRecord>{stab, slab};
    });
}

std::vector<CheckRecord> check_face_distortion(const CheckSizes& sizes) {
    return timed([&] {
        const double levels[] = {1.0, 2.0, 0.5, 4.0, 8.0};
        const double eta = 0.3;
        double worst = 0.0;
        int n = 0;
        for (int M : {2, 3}) {
            for (double level : levels) {
                if (n >= sizes.face_configs) break;
                const double s = std::log(level / std::sin(eta / 4));
                const SurfaceMap f = face_projection_map({0, 0, 0}, level, M, 0);
                std::vector<PlanePoint> pts;
                for (int a = 0; a < 6; ++a)
                    for (int b = 0; b < 6; ++b) pts.push_back({-0.25 + 0.1 * a, s + 0.6 + 0.3 * b});
                worst = std::max(worst, relative_distortion(f, pts).D);
                ++n;
            }
        }
        CheckRecord r = upper("face_distortion", "nearest-point projection of a strip onto the cone face has "
                                                 "distortion at most 2 (allowance 2.1)",
                              worst, 2.1);
        r.note = std::to_string(n) + " configurations";
        return std::vector<CheckRecord>{r};
    });
}

std::vector<CheckRecord> check_strip_intersection(const CheckSizes& sizes) {
    return timed([&] {
        std::mt19937_64 rng(110);
        std::uniform_real_distribution<double> lv(0.5, 4.0), et(0.1, 0.7), fr(0.05, 0.95), uu(0.0, 1.0);
        std::uniform_int_distribution<int> mm(2, 4);
        std::int64_t failures = 0;
        const Point3 P{0, 0, 0};
        std::int64_t used = 0;
        while (used < sizes.strip_rays) {
            const double level = lv(rng);
            const std::int64_t M = mm(rng);
            const double eta = et(rng);
            const double xi = fr(rng) * eta / 3;
            const StripSpec strip{M, 0, eta, std::log(level / std::sin(xi))};
            const Point3 alpha{strip.plane_x1(), strip.x2_lo() + (strip.x2_hi() - strip.x2_lo()) * uu(rng),
                               strip.s + 2.0 * uu(rng)};
            if (!strip_contains(strip, alpha)) continue;
            const FaceSelection face = adjacent_face(level, M, 0);
            ++used;
            try {
                const RayHit hit = ray_cone_intersect(P, alpha, face.cone, face.face);
                const PlanePoint c = cone_beam(face.cone).center();
                const double d1 = (face.face == FaceId::plus_x1 ? 1.0 : -1.0) * (hit.point.x1 - c.x1);
                const bool on_face = d1 >= std::fabs(hit.point.x2 - c.x2) - 1e-12;
                if (!on_face || hit.scaled_residual > 1e-9) ++failures;
            } catch (const NoIntersectionError&) {
                ++failures;
            }
        }
        CheckRecord r = upper("strip_intersection", "segments from P through a strip with xi < eta/3 meet the "
                                                    "adjacent cone face (failures)",
                              static_cast<double>(failures), 0.0);
        r.note = std::to_string(used) + " rays";
        return std::vector<CheckRecord>{r};
    });
}

std::vector<CheckRecord> check_area_transport(const CheckSizes& sizes, unsigned threads) {
    return timed([&] {
        std::mt19937_64 rng(111);
        std::uniform_real_distribution<double> a(-1.0, 1.0);
        int failures = 0, n = 0;
        std::string worst_name;
        auto record = [&](const AreaTransportReport& r) {
            ++n;
            if (!r.pass) {
                ++failures;
                worst_name = r.name;
            }
        };
        const Map3 Z = [](const Point3& x) { return zorich(x); };
        for (int k = 0; n < sizes.transport_configs; ++k) {
            switch (k % 3) {
                case 0: {
                    double m[9];
                    for (double& v : m) v = a(rng);
                    for (int i = 0; i < 3; ++i) m[4 * i] += 2.0;  // keep it invertible
                    const Map3 f = [m](const Point3& x) {
                        return Point3{m[0] * x.x1 + m[1] * x.x2 + m[2] * x.x3 + 0.3,
                                      m[3] * x.x1 + m[4] * x.x2 + m[5] * x.x3 - 1.0,
                                      m[6] * x.x1 + m[7] * x.x2 + m[8] * x.x3};
                    };
                    const Region3 E{{0, 0, 0}, {1, 1, 1}, [](const Point3&) { return true; }};
                    const Region3 U{E.lo, E.hi, [](const Point3& x) { return x.x1 + x.x2 < 0.8; }};
                    std::vector<Point3> pts;
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j)
                            for (int l = 0; l < 3; ++l) pts.push_back({0.5 * i, 0.5 * j, 0.5 * l});
                    const double D = relative_distortion(f, pts, 1e-3, 64, threads).D;
                    record(verify_area_transport("affine " + std::to_string(k), f, E, U, D, 100, 0.02, threads));
                    break;
                }
                case 1: {
                    const Point3 lo{0.6 * a(rng), 0.6 * a(rng), 2.0 * a(rng)};
                    const Point3 hi = lo + Point3{0.2, 0.2, 0.2};
                    const Region3 E{lo, hi, [](const Point3&) { return true; }};
                    const Point3 mid = lo + Point3{0.1, 0.1, 0.1};
                    const Region3 U{lo, hi, [mid](const Point3& x) { return distance(x, mid) < 0.09; }};
                    std::vector<Point3> pts;
                    for (int i = 0; i < 5; ++i)
                        for (int j = 0; j < 5; ++j)
                            for (int l = 0; l < 5; ++l) pts.push_back(lo + Point3{0.05 * i, 0.05 * j, 0.05 * l});
                    const double D = relative_distortion(Z, pts, kDefaultRadius, 64, threads).D;
                    record(verify_area_transport("zorich cube " + std::to_string(k), Z, E, U, D, 100, 0.02, threads));
                    break;
                }
                default: {
                    const std::int64_t M = 2 + (k / 3) % 2;
                    const double level = (k / 3) % 4 < 2 ? 1.0 : 2.0;
                    const double s = std::log(level / std::sin(0.3 / 4));
                    const SurfaceMap f = face_projection_map({0, 0, 0}, level, M, 0);
                    const Region2 E{{-0.25, s + 0.6}, {0.35, s + 2.1}, [](const PlanePoint&) { return true; }};
                    const Region2 U{E.lo, E.hi, [s](const PlanePoint& p) { return p.x1 < 0.05 && p.x2 < s + 1.5; }};
                    std::vector<PlanePoint> pts;
                    for (int i = 0; i < 6; ++i)
                        for (int j = 0; j < 6; ++j) pts.push_back({-0.25 + 0.12 * i, s + 0.6 + 0.3 * j});
                    const double D = relative_distortion(f, pts, kDefaultRadius, 64, threads).D;
                    record(verify_area_transport("face " + std::to_string(k), f, E, U, D, 1000, 0.02, threads));
                    break;
                }
            }
        }
        CheckRecord r = upper("area_transport", "ratio of image measures within lambda'^-n and lambda'^n times the "
                                                "ratio of measures (failed configurations)",
                              static_cast<double>(failures), 0.0, 0.02);
        r.note = std::to_string(n) + " configurations" + (worst_name.empty() ? "" : ", failed: " + worst_name);
        return std::vector<CheckRecord>{r};
    });
}

std::vector<CheckRecord> check_parametrization(const CheckSizes& sizes) {
    return timed([&] {
        int wrong = 0;
        wrong += y_point_valid({YFace::x1_pos, 0.5, 2.0}) ? 0 : 1;
        wrong += y_point_valid({YFace::x1_pos, 0.0, 2.0}) ? 1 : 0;
        wrong += y_point_valid({YFace::x1_pos, 0.5, 0.0}) ? 1 : 0;
        wrong += y_point_valid({YFace::x1_pos, 1.0, 1.0}) ? 1 : 0;
        wrong += y_point_valid({YFace::x1_pos, -1.0, 1.0}) ? 1 : 0;

        TraceOptions opt;
        opt.budget = 100000;
        const LineSpec excluded[] = {
            {{0.3, -0.2, 0.5}, {1.0, 0.7, 0.0}},
            {{0.0, 0.4, 0.0}, {0.0, 1.0, 0.02}},
            {{0.7, kPi, 0.0}, {1.0, 0.0, 0.02}},
            {{0.0, 0.0, 0.0}, {1.0, 1.0, 0.02}},
            {{1.0, -1.0, 0.0}, {1.0, -1.0, 0.02}},
        };
        std::int64_t violations = 0;
        for (const LineSpec& line : excluded) {
            const ConfinementReport r = check_confinement(line, opt);
            violations += r.applicable ? r.violations : 1;
        }

        BaseSequence seq;
        std::int64_t found = -1;
        for (std::int64_t n = 1; n <= sizes.base_sequence_scan && found < 0; ++n) {
            const BallSpec b = seq.next();
            if (distance(b.center, {3, 0, 0}) + b.radius <= 0.5) found = n;
        }

        const LineSpec line = LineSpec::through({0, 0, 0}, {YFace::x1_pos, 0.3137, 0.2});
        int witness_failures = 0;
        for (double s0 : {3.0, 11.0, 17.5}) {
            const Point3 y = line_image(line, s0);
            if (!(norm(y) > 0.2 && std::fabs(norm(y) - 1.0) > 1e-3)) continue;
            const HitResult r = hits_ball(line, {y, 0.1}, 200000);
            if (!r.hit || !r.witness_param || distance(line_image(line, *r.witness_param), y) >= 0.1)
                ++witness_failures;
        }

        CheckRecord base = upper("base_sequence", "the countable base has a ball inside B((3,0,0), 0.5) "
                                                  "(first index)",
                                 found < 0 ? INFINITY : static_cast<double>(found),
                                 static_cast<double>(sizes.base_sequence_scan));
        return std::vector<CheckRecord>{
            upper("line_parametrization", "Y-points with x1 x2 (x1^2 - x2^2) = 0 or x3 <= 0 are rejected (wrong)",
                  wrong, 0.0),
            upper("excluded_lines_confined", "removed lines have images in a sphere or a plane (violations)",
                  static_cast<double>(violations), 0.0),
            base,
            upper("hit_witness", "a ball around a traced image point is hit with a valid witness (failures)",
                  witness_failures, 0.0),
        };
    });
}

std::vector<CheckRecord> check_coverage(const CheckSizes& sizes, unsigned threads) {
    return timed([&] {
        const auto lines = coverage_lines(sizes.coverage_lines);
        std::vector<CoverageRun> runs(lines.size());
        parallel_for(lines.size(), threads, [&](std::size_t i) {
            VoxelGrid grid(10.0, 64);
            runs[i] = trace_coverage(lines[i], grid, coverage_trace_options(sizes.coverage_budget));
        });
        double worst = 1.0, worst_cap = 0.0;
        bool monotone = true;
        std::ostringstream note;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            worst = std::min(worst, runs[i].final_coverage);
            worst_cap = std::max(worst_cap, runs[i].stats.cap_hit_fraction());
            for (std::size_t j = 1; j < runs[i].series.size(); ++j)
                monotone = monotone && runs[i].series[j].coverage >= runs[i].series[j - 1].coverage;
            note << (i ? " " : "") << fmt(runs[i].final_coverage);
        }
        CheckRecord cov = lower("coverage", "curve f(L) fills the voxel grid over [-10,10]^3 off S^2 and 0 "
                                            "(worst line coverage)",
                                worst, kCoverageThreshold);
        cov.pass = cov.pass && monotone;
        cov.note = "lines=" + std::to_string(lines.size()) + " coverage=" + note.str() +
                   " cap_hit_fraction=" + fmt(worst_cap) + (monotone ? "" : " NOT MONOTONE");

        // excluded lines: a horizontal line and one in the plane x1 = 0
        const LineSpec bad[] = {{{0.0, 0.0, 1.0}, {1.0, 0.4123, 0.0}},
                                {{0.0, 0.0, 0.0}, {0.0, 1.0, 1.5e-4}}};
        double best_bad = 0.0;
        for (const LineSpec& line : bad) {
            VoxelGrid grid(10.0, 64);
            best_bad = std::max(best_bad, trace_coverage(line, grid, coverage_trace_options(sizes.excluded_budget))
                                              .final_coverage);
        }
        CheckRecord ex = upper("coverage_excluded", "removed lines do not fill the grid (best coverage, must stay "
                                                    "below the threshold)",
                               best_bad, kCoverageThreshold);
        ex.pass = best_bad < kCoverageThreshold;
        return std::vector<CheckRecord>{cov, ex};
    });
}

std::vector<CheckRecord> check_epsilon_density(const DensityExperiment& e, unsigned threads) {
    return timed([&] {
        const BallSpec U = base_sequence(e.ball_index);
        const auto recs =
            epsilon_density({0, 0, 0}, e.patch, U, e.grid_n, e.budget_per_line, e.rungs, TraceOptions{}, threads);
        double worst = 1.0;
        std::ostringstream note;
        for (std::size_t i = 0; i < recs.size(); ++i) {
            worst = std::min(worst, recs[i].fraction);
            note << (i ? " " : "") << fmt(recs[i].fraction);
        }
        const double lam = lambda_h_estimate(128, threads);
        const double C = coverage_constant_C(U.radius, norm(U.center), lam);
        CheckRecord r = lower("epsilon_density", "hit fraction of X_U near a point of Y stays away from 0 down "
                                                 "the delta ladder (smallest rung)",
                              worst, kDensityFractionFloor);
        r.note = "fractions=" + note.str() + " C/16=" + fmt(C / 16);
        return std::vector<CheckRecord>{r};
    });
}

VerificationReport run_verification(const VerifyOptions& options) {
    VerificationReport report;
    report.level = options.level;
    const CheckSizes sizes = CheckSizes::for_level(options.level);
    auto add = [&](std::vector<CheckRecord> recs) {
        for (auto& r : recs) {
            if (options.progress) options.progress(r);
            report.checks.push_back(std::move(r));
        }
    };
    auto guarded = [&](const std::string& name, auto&& run) {
        try {
            add(run());
        } catch (const std::exception& ex) {
            CheckRecord r;
            r.name = name;
            r.anchor = "check raised an error";
            r.value = NAN;
            r.note = ex.what();
            add({r});
        }
    };
    const unsigned th = options.threads;
    guarded("norm_law", [&] { return check_norm_law(sizes); });
    guarded("strong_automorphy", [&] { return check_automorphy(sizes); });
    guarded("inverse_branches", [&] { return check_inverse_branches(sizes); });
    guarded("cone_level", [&] { return check_cones(sizes); });
    guarded("boundary_distance", [&] { return check_boundary_distance(sizes); });
    guarded("constant_a", [&] { return check_constant_a(sizes); });
    guarded("preimage_disk", [&] { return check_preimage_disks(sizes); });
    guarded("logsquare_area", [&] { return check_area_ratio(sizes); });
    guarded("projection_closed_form", [&] { return check_projection(sizes); });
    guarded("slab_bound", [&] { return check_slabs(sizes, th, options.slab_bound_scale); });
    guarded("face_distortion", [&] { return check_face_distortion(sizes); });
    guarded("strip_intersection", [&] { return check_strip_intersection(sizes); });
    guarded("area_transport", [&] { return check_area_transport(sizes, th); });
    guarded("line_parametrization", [&] { return check_parametrization(sizes); });
    guarded("coverage", [&] { return check_coverage(sizes, th); });
    guarded("epsilon_density", [&] { return check_epsilon_density(DensityExperiment{}, th); });
    return report;
}

void write_report(std::ostream& out, const VerificationReport& report) {
    auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char ch : s) {
            if (ch == '"' || ch == '\\') q += '\\';
            q += ch;
        }
        return q + '"';
    };
    out << "# verification report, level=" << (report.level == VerifyLevel::full ? "full" : "quick")
        << "; fields: check anchor value bound tolerance pass note\n";
    out << std::setprecision(10);
    for (const auto& c : report.checks) {
        out << "check=" << c.name << " anchor=" << quote(c.anchor) << " value=" << c.value << " bound=" << c.bound
            << " tolerance=" << c.tolerance << " pass=" << (c.pass ? 1 : 0) << " note=" << quote(c.note) << '\n';
    }
    out << "overall pass=" << (report.pass() ? 1 : 0) << '\n';
}

}  // namespace zorichlab
