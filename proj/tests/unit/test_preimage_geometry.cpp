#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "zorich/errors.hpp"
#include "zorich/preimage_geometry.hpp"

using namespace zorichlab;

namespace {

double rel_err(double got, double want) { return std::fabs(got - want) / std::max(1.0, std::fabs(want)); }

// Generic line/plane intersection: base + s d meets {n . x = h}.
Point3 ray_plane(const Point3& base, const Point3& d, const Point3& n, double h) {
    const double s = (h - dot(n, base)) / dot(n, d);
    return base + s * d;
}

}  // namespace

TEST_CASE("cone_height") {
    CHECK(cone_height(1.0, {0, 0}) == 0.0);
    CHECK(cone_height(1.0, {kPi / 4, 0}) == doctest::Approx(std::log(std::sqrt(2.0))).epsilon(1e-14));
    CHECK(cone_height(std::exp(1.0), {0, 0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(cone_height(1.0, {kHalfPi, 0}), DomainError);
    CHECK_THROWS_AS(cone_height(1.0, {0.1, -2.0}), DomainError);
    CHECK_THROWS_AS(cone_height(-1.0, {0, 0}), DomainError);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> c(-1.5, 1.5), lv(0.01, 50.0);
    for (int k = 0; k < 1000; ++k) {
        const PlanePoint p{c(rng), c(rng)};
        const double t = lv(rng);
        const double x3 = cone_height(t, p);
        CHECK(rel_err(std::exp(x3) * std::cos(max_norm(p)), t) <= 1e-12 * t);
    }
}

TEST_CASE("cone_point and its image") {
    const Point3 v = cone_point({1.0, {}}, {0, 0});
    CHECK(v == Point3{0, 0, 0});
    CHECK(distance(zorich(v), {0, 0, 1}) <= 1e-15);

    const Point3 w = cone_point({-1.0, {}}, {0, 0});
    CHECK(distance(w, {kPi, 0, 0}) <= 1e-15);
    CHECK(distance(zorich(w), {0, 0, -1}) <= 1e-15);

    CHECK_THROWS_AS(cone_point({0.0, {}}, {0, 0}), DomainError);

    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> c(-1.5, 1.5), lv(0.05, 20.0);
    std::uniform_int_distribution<int> t(-4, 4), f(0, 1), sg(0, 1);
    for (int k = 0; k < 10000; ++k) {
        const double level = sg(rng) ? lv(rng) : -lv(rng);
        const ConeSurface cone{level, GroupElement{t(rng), t(rng), f(rng) == 1}};
        const Point3 x = cone_point(cone, {c(rng), c(rng)});
        const Point3 y = zorich(x);
        CHECK(std::fabs(y.x3 - level) <= 1e-9 * std::max(1.0, std::fabs(level)));
        CHECK(beam_of(horizontal(x)) == cone_beam(cone));
        CHECK(std::fabs(cone_residual(cone, x)) <= 1e-9 * std::max(1.0, std::fabs(level)));
    }
}

TEST_CASE("cone_point is injective on a grid") {
    for (double level : {2.0, -0.5}) {
        const ConeSurface cone{level, GroupElement{1, -1, true}};
        std::vector<Point3> images;
        const int n = 40;
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                const PlanePoint p{-1.5 + 3.0 * a / (n - 1), -1.5 + 3.0 * b / (n - 1)};
                const Point3 y = zorich(cone_point(cone, p));
                CHECK(std::fabs(y.x3 - level) <= 1e-9 * std::fabs(level));
                images.push_back(y);
            }
        }
        double closest = 1e300;
        for (std::size_t i = 0; i < images.size(); ++i) {
            for (std::size_t j = i + 1; j < images.size(); ++j) {
                closest = std::min(closest, distance(images[i], images[j]));
            }
        }
        CHECK(closest > 1e-6);
    }
}

TEST_CASE("cone_in_beam and cone_beam") {
    for (int i = -5; i <= 5; ++i) {
        for (int j = -5; j <= 5; ++j) {
            const BeamIndex b{i, j};
            const double level = b.parity() == 0 ? 3.0 : -3.0;
            CHECK(cone_beam(cone_in_beam(level, b)) == b);
            CHECK_THROWS_AS(cone_in_beam(-level, b), ParityMismatchError);
        }
    }
    CHECK_THROWS_AS(cone_in_beam(0.0, {0, 0}), DomainError);
}

TEST_CASE("beam faces map to the horizontal plane") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> c(-20, 20), h(-5, 30);
    std::uniform_int_distribution<int> k(-6, 6);
    for (int n = 0; n < 10000; ++n) {
        const double x3 = h(rng);
        const Point3 a{kHalfPi + k(rng) * kPi, c(rng), x3};
        const Point3 b{c(rng), kHalfPi + k(rng) * kPi, x3};
        CHECK(std::fabs(zorich(a).x3) <= 1e-12 * std::exp(x3));
        CHECK(std::fabs(zorich(b).x3) <= 1e-12 * std::exp(x3));
    }
}

TEST_CASE("beam_boundary_distance") {
    CHECK(beam_boundary_distance(1.0, std::log(2.0)) == doctest::Approx(kPi / 6).epsilon(1e-14));
    CHECK(beam_boundary_distance(1.0, 0.0) == doctest::Approx(kHalfPi).epsilon(1e-15));
    CHECK_THROWS_AS(beam_boundary_distance(1.0, -0.1), DomainError);
    CHECK_THROWS_AS(beam_boundary_distance(0.0, 1.0), DomainError);

    double prev = 10.0;
    for (double x3 = 0.0; x3 < 60.0; x3 += 0.5) {
        const double d = beam_boundary_distance(1.0, x3);
        CHECK(d < prev);
        prev = d;
    }
    CHECK(prev < 1e-12);

    // against the distance of cone samples to the boundary of the square
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> c(-1.5, 1.5), lv(0.05, 20.0);
    for (int k = 0; k < 10000; ++k) {
        const double t = lv(rng);
        const PlanePoint p{c(rng), c(rng)};
        const double x3 = cone_height(t, p);
        const double direct = kHalfPi - max_norm(p);
        CHECK(std::fabs(beam_boundary_distance(t, x3) - direct) <= 1e-9);
    }
}

TEST_CASE("separation_constant_a") {
    const double e = std::exp(1.0);
    const double a = separation_constant_a(e);
    CHECK(a == doctest::Approx(std::log(std::sqrt(2.0) * (kTwoPi + 1.0))).epsilon(1e-9));
    CHECK(a == doctest::Approx(2.3322).epsilon(1e-4));
    CHECK_THROWS_AS(separation_constant_a(1.0), DomainError);
    CHECK_THROWS_AS(separation_constant_a(0.0), DomainError);
    CHECK_THROWS_AS(separation_constant_a(-2.0), DomainError);

    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> x0(0.05, 20.0), u(0.0, 3.0), off(1e-6, 5.0);
    for (int k = 0; k < 1000; ++k) {
        double x = x0(rng);
        if (std::fabs(x - 1.0) < 0.05) continue;
        const double ak = separation_constant_a(x);
        CHECK(std::exp(2 * ak) > 3.0);
        const double t1 = std::log(std::fabs(std::log(x))) + off(rng);
        const double t2 = t1 + ak + u(rng);
        CHECK(std::exp(t2) / std::sqrt(2.0) - std::exp(t1) > kTwoPi);
    }
}

TEST_CASE("logsquare_quantities closed forms") {
    const auto q4 = logsquare_quantities(0.0, std::log(2.0));
    CHECK(q4.ratio == doctest::Approx(3 * kPi / 4).epsilon(1e-13));
    const auto q3 = logsquare_quantities(1.0, 1.0 + 0.5 * std::log(3.0));
    CHECK(q3.ratio == doctest::Approx(kPi).epsilon(1e-13));
    CHECK(q3.ratio < kTwoPi);
    CHECK(q4.area_image / q4.area_trapezoid == doctest::Approx(q4.ratio).epsilon(1e-14));

    CHECK_THROWS_AS(logsquare_quantities(0.0, 0.5 * std::log(2.0)), DegenerateError);
    CHECK_THROWS_AS(logsquare_quantities(0.0, 0.1), DegenerateError);
    CHECK_THROWS_AS(logsquare_quantities(1.0, 1.0), DomainError);

    double prev = 1e300;
    for (double d = 0.5 * std::log(2.0) + 1e-3; d < 6.0; d += 0.01) {
        const double r = logsquare_quantities(0.3, 0.3 + d).ratio;
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("logsquare area against surface quadrature") {
    // Area of Z(F(t1, t2)) as the integral of |d_p1 y x d_p2 y| over the face of the cone
    // parametrized by its horizontal coordinates.
    const double level = 1.5;
    const double t1 = 1.0;
    const double t2 = 2.2;
    const ConeSurface cone{level, {}};
    auto image = [&](double p1, double p2) { return zorich(cone_point(cone, {p1, p2})); };
    auto jac = [&](double p1, double p2) {
        const double h = 1e-6;
        const Point3 d1 = (image(p1 + h, p2) - image(p1 - h, p2)) * (0.5 / h);
        const Point3 d2 = (image(p1, p2 + h) - image(p1, p2 - h)) * (0.5 / h);
        return norm(cross(d1, d2));
    };
    const double m_lo = std::acos(level * std::exp(-t1));
    const double m_hi = std::acos(level * std::exp(-t2));
    using boost::math::quadrature::gauss_kronrod;
    auto inner = [&](double p1) {
        return gauss_kronrod<double, 31>::integrate([&](double p2) { return jac(p1, p2); }, -p1, p1, 8,
                                                    1e-10);
    };
    const double area = gauss_kronrod<double, 31>::integrate(inner, m_lo, m_hi, 8, 1e-10);
    const auto q = logsquare_quantities(t1, t2);
    CHECK(area == doctest::Approx(q.area_image).epsilon(1e-6));
}

TEST_CASE("coverage constants") {
    const double e = std::exp(1.0);
    const double C = coverage_constant_C(1.0, e, 1.0);
    CHECK(C == doctest::Approx(1.0 / (2048.0 * kPi * std::exp(2 * e) * (1 + 4 * kPi))).epsilon(1e-13));
    CHECK(coverage_constant_C(0.5, e, 1.0) == doctest::Approx(C / 4).epsilon(1e-14));
    CHECK(tsmall_bound(1.0, e, 1.0) == doctest::Approx(1.0 / (512.0 * std::exp(2 * e))).epsilon(1e-13));

    CHECK_THROWS_AS(coverage_constant_C(3.0, e, 1.0), DomainError);
    CHECK_THROWS_AS(coverage_constant_C(0.5, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(coverage_constant_C(0.5, e, 0.9), DomainError);
    CHECK_THROWS_AS(tsmall_bound(-0.5, e, 1.0), DomainError);

    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> x0(0.05, 20.0), fr(0.01, 0.99), lam(1.0, 8.0);
    for (int k = 0; k < 1000; ++k) {
        const double x = x0(rng);
        if (std::fabs(x - 1.0) < 1e-3) continue;
        const double r = fr(rng) * x;
        const double l = lam(rng);
        const double c = coverage_constant_C(r, x, l);
        CHECK(c > 0.0);
        CHECK(c <= tsmall_bound(r, x, l));
        CHECK(coverage_constant_C(2 * r < x ? 2 * r : r, x, l) >= c);
    }

    const auto k = make_density_constants(e, 1.0, 1.0);
    CHECK(k.eps == doctest::Approx(k.C / 16).epsilon(1e-15));
    CHECK(std::exp(2 * k.a) > 3.0);
}

TEST_CASE("width window rearrangement") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> x0(0.05, 20.0), off(0.0, 4.0), dt(0.0, 6.0);
    int checked = 0;
    for (int k = 0; k < 200000 && checked < 1000; ++k) {
        const double x = x0(rng);
        if (std::fabs(x - 1.0) < 0.05) continue;
        const double g = std::fabs(std::log(x));
        const double t1 = std::log(g) + off(rng);
        const double t2 = t1 + dt(rng);
        if (std::exp(t2) / std::sqrt(2.0) - std::exp(t1) > 4 * kPi) continue;
        ++checked;
        CHECK(std::exp(t2 - t1) <= std::sqrt(2.0) * (1 + 4 * kPi / g));
    }
    CHECK(checked == 1000);
}

TEST_CASE("project_to_plane_M") {
    const Point3 r = project_to_plane_M({0, 0, 0}, {YFace::x1_pos, 0.5, 1.0}, 1);
    CHECK(distance(r, {3 * kPi / 2, 3 * kPi / 4, 3 * kPi / 2}) <= 1e-14);

    CHECK_THROWS_AS(project_to_plane_M({5, 0, 0}, {YFace::x1_pos, 0.5, 1.0}, 1), DegenerateError);
    CHECK_THROWS_AS(project_to_plane_M({0, 0, 0}, {YFace::x1_pos, 0.0, 1.0}, 1), DomainError);
    CHECK_THROWS_AS(project_to_plane_M({0, 0, 0}, {YFace::x1_pos, 0.5, -1.0}, 1), DomainError);
    CHECK_THROWS_AS(project_to_plane_M({0, 0, 0}, {YFace::x2_pos, 0.5, 1.0}, 1), DomainError);

    std::mt19937_64 rng(18);
    std::uniform_real_distribution<double> c(-3, 3), u2(-0.99, 0.99), u3(0.01, 3.0);
    std::uniform_int_distribution<int> m(1, 6);
    for (int k = 0; k < 10000; ++k) {
        const Point3 P{c(rng), c(rng), c(rng)};
        YPoint u{YFace::x1_pos, u2(rng), u3(rng)};
        if (u.u2 == 0.0) continue;
        const int M = m(rng);
        const Point3 got = project_to_plane_M(P, u, M);
        const Point3 want = ray_plane(P, y_offset(u), {1, 0, 0}, kHalfPi + M * kPi);
        CHECK(got.x1 == kHalfPi + M * kPi);
        CHECK(distance(got, want) <= 1e-12 * std::max(1.0, norm(want)));
    }
}

TEST_CASE("strip_contains") {
    const StripSpec k{2, 1, 0.2, 3.0};
    validate(k);
    const double mid = 0.5 * (k.x2_lo() + k.x2_hi());
    CHECK(mid == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(strip_contains(k, {k.plane_x1(), mid, k.s + 1}));
    CHECK_FALSE(strip_contains(k, {k.plane_x1(), kHalfPi + 0 * kPi + k.eta / 2, k.s + 1}));
    CHECK(strip_contains(k, {k.plane_x1(), kHalfPi + kPi - 2 * k.eta, k.s + 10}));
    CHECK_FALSE(strip_contains(k, {k.plane_x1() + 1e-6, mid, k.s + 1}));
    CHECK_FALSE(strip_contains(k, {k.plane_x1(), mid, k.s}));
    CHECK_THROWS_AS(validate(StripSpec{0, 0, kPi / 4, 0.0}), DomainError);
    CHECK_THROWS_AS(validate(StripSpec{0, 0, 0.0, 0.0}), DomainError);
}

TEST_CASE("adjacent_face") {
    for (int M = -3; M <= 3; ++M) {
        for (int l = -3; l <= 3; ++l) {
            for (double level : {2.0, -2.0}) {
                const FaceSelection f = adjacent_face(level, M, l);
                const BeamIndex b = cone_beam(f.cone);
                CHECK(b.j == l);
                if (f.face == FaceId::plus_x1) CHECK(b.i == M);
                else CHECK(b.i == M + 1);
                // the selected face touches the plane x1 = pi/2 + M pi
                const double edge = b.center().x1 + (f.face == FaceId::plus_x1 ? kHalfPi : -kHalfPi);
                CHECK(edge == doctest::Approx(kHalfPi + M * kPi));
            }
        }
    }
}

TEST_CASE("ray_cone_intersect through the vertex") {
    const ConeSurface cone{1.0, {}};
    const RayHit hit = ray_cone_intersect({0, 0, -1}, {0, 0, 1}, cone, FaceId::plus_x1);
    CHECK(distance(hit.point, {0, 0, 0}) <= 1e-10);
    CHECK(hit.residual <= 1e-10);
}

TEST_CASE("ray_cone_intersect in the strip configuration") {
    // Line from P = 0 through the face x1 = +1 of Y; its crossing of the plane
    // x1 = 5 pi / 2 lies in a strip whose distance to the face is below eta / 3.
    const double level = 1.0;
    const std::int64_t M = 2;
    const std::int64_t l = 0;
    const double eta = 0.3;
    const double xi = eta / 4;
    const double s = std::log(level / std::sin(xi));
    CHECK(beam_boundary_distance(level, s) == doctest::Approx(xi).epsilon(1e-12));
    const StripSpec strip{M, l, eta, s};
    const FaceSelection face = adjacent_face(level, M, l);

    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u2(-0.15, 0.15), u3(0.6, 1.1);
    int used = 0;
    for (int k = 0; k < 500; ++k) {
        const YPoint u{YFace::x1_pos, u2(rng), u3(rng)};
        if (!y_point_valid(u)) continue;
        const Point3 P{0, 0, 0};
        const Point3 alpha = project_to_plane_M(P, u, M);
        if (!strip_contains(strip, alpha)) continue;
        ++used;
        const RayHit hit = ray_cone_intersect(P, alpha, face.cone, face.face);
        CHECK(hit.residual <= 1e-10 * std::max(1.0, level));
        CHECK(hit.parameter > 0.0);
        CHECK(hit.parameter <= 1.0);
        // on the +x1 quadrant of the cone in beam (M, l)
        const PlanePoint c = cone_beam(face.cone).center();
        const double d1 = hit.point.x1 - c.x1;
        const double d2 = hit.point.x2 - c.x2;
        CHECK(d1 >= std::fabs(d2) - 1e-12);
        CHECK(std::fabs(zorich(hit.point).x3 - level) <= 1e-9);
        CHECK(alpha.x1 - hit.point.x1 < eta);
    }
    CHECK(used > 100);
}

TEST_CASE("ray_cone_intersect failures") {
    const ConeSurface cone{1.0, {}};
    // horizontal ray below the vertex never reaches the cone
    CHECK_THROWS_AS(ray_cone_intersect({-1, 0.1, -2}, {1, 0.1, -2}, cone, FaceId::plus_x1),
                    NoIntersectionError);
    // ray that stays on the other side of the beam
    CHECK_THROWS_AS(ray_cone_intersect({-1, 0, 3}, {-1.2, 0, 4}, cone, FaceId::plus_x1), NoIntersectionError);
    try {
        ray_cone_intersect({-1, 0.1, -2}, {1, 0.1, -2}, cone, FaceId::plus_x1);
    } catch (const NoIntersectionError& e) {
        CHECK(e.range_lo() <= e.range_hi());
    }
}
