#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "zorich/distortion.hpp"
#include "zorich/errors.hpp"

using namespace zorichlab;

namespace {

const Map3 kIdentity = [](const Point3& x) { return x; };
const Map3 kZorich = [](const Point3& x) { return zorich(x); };

double lambda_hat() {
    static const double v = lambda_h_estimate(128);
    return v;
}

}  // namespace

TEST_CASE("direction sets are unit vectors") {
    for (const Point3& v : fibonacci_directions(64)) CHECK(std::fabs(norm(v) - 1.0) <= 1e-15);
    const auto c = circle_directions(64);
    CHECK(c.size() == 64);
    CHECK(c[16].x2 == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("pointwise_lipschitz of linear maps") {
    const Point3 x{0.3, -2.0, 7.0};
    const auto id = pointwise_lipschitz(kIdentity, x, 1e-3, 64);
    CHECK(id.upper == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(id.lower == doctest::Approx(1.0).epsilon(1e-9));
    const auto s3 = pointwise_lipschitz(Map3([](const Point3& y) { return 3.0 * y; }), x, 1e-5, 64);
    CHECK(s3.upper == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(s3.lower == doctest::Approx(3.0).epsilon(1e-9));

    CHECK_THROWS_AS(pointwise_lipschitz(kIdentity, x, 0.0, 64), DomainError);
    CHECK_THROWS_AS(pointwise_lipschitz(kIdentity, x, 1e-5, 16), DomainError);
    CHECK_THROWS_AS(pointwise_lipschitz(Map3([](const Point3&) { return Point3{1, 2, 3}; }), x, 1e-5, 64),
                    DegenerateError);
}

TEST_CASE("pointwise_lipschitz of Z") {
    const double lam = lambda_hat();
    const auto s = zorich_lipschitz({0, 0, 0}, 1e-5, 64);
    CHECK(s.lower >= 1.0 / lam);
    CHECK(s.upper <= lam * std::exp(1e-5));
    CHECK(s.lower <= s.upper);
    CHECK_THROWS_AS(zorich_lipschitz({kHalfPi + 5e-5, kHalfPi, 0}, 1e-5, 64), DomainError);
}

TEST_CASE("h at the pole") {
    // |h(r v) - h(0)| / r -> M(v), so the constants tend to 1/sqrt(2) and 1
    const SurfaceMap h = [](const PlanePoint& p) { return h_extended(p).as_point(); };
    const auto s = pointwise_lipschitz(h, {0, 0}, 1e-6, 64);
    CHECK(std::isfinite(s.upper));
    CHECK(s.upper == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s.lower == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("relative_distortion of conformal linear maps") {
    std::vector<Point3> pts;
    for (int k = 0; k < 20; ++k) pts.push_back({0.1 * k, -0.3 * k, 1.0 + k});
    CHECK(relative_distortion(kIdentity, pts).D == doctest::Approx(1.0).epsilon(1e-9));
    const auto d2 = relative_distortion(Map3([](const Point3& y) { return 2.0 * y; }), pts);
    CHECK(d2.D == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d2.sample_count == 20);
    CHECK_THROWS_AS(relative_distortion(kIdentity, std::vector<Point3>{}), DomainError);
}

TEST_CASE("projection onto the plane has distortion one") {
    for (int M : {1, 2, 4}) {
        const SurfaceMap pm = projection_plane_map({0.2, -0.1, 0.5}, M);
        std::vector<PlanePoint> pts;
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b) pts.push_back({0.1 + 0.1 * a, 0.2 + 0.3 * b});
        CHECK(std::fabs(relative_distortion(pm, pts).D - 1.0) <= 1e-6);
    }
}

TEST_CASE("lambda_h_estimate") {
    const double a = lambda_h_estimate(128);
    const double b = lambda_h_estimate(256);
    CHECK(a >= 1.0);
    CHECK(std::fabs(a - b) / b <= 0.02);
    CHECK_THROWS_AS(lambda_h_estimate(32), DomainError);
}

TEST_CASE("slab bound") {
    const double lam = lambda_hat();
    const auto thin = verify_slab_bound({0.0, 1e-9}, 1000, lam, 3, 0.02);
    CHECK(thin.pass);
    CHECK(thin.D_est <= lam * lam * 1.02);
    const auto unit = verify_slab_bound({0.0, 1.0}, 1000, lam);
    CHECK(unit.bound == doctest::Approx(lam * lam * std::exp(1.0) * 1.01).epsilon(1e-14));

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> t1(-5, 5), dt(1e-3, 3.0);
    for (int k = 0; k < 50; ++k) {
        const double a = t1(rng);
        const auto r = verify_slab_bound({a, a + dt(rng)}, 1000, lam, 100 + k);
        CHECK(r.pass);
        CHECK(r.D_est >= 1.0);
    }
    CHECK_THROWS_AS(verify_slab_bound({0.0, 25.0}, 1000, lam), DomainError);
    CHECK_THROWS_AS(verify_slab_bound({0.0, 1.0}, 10, lam), DomainError);
}

TEST_CASE("slab estimate does not depend on the thread count") {
    const double lam = lambda_hat();
    const auto a = verify_slab_bound({1.0, 2.0}, 2000, lam, 9, 0.01, 1);
    const auto b = verify_slab_bound({1.0, 2.0}, 2000, lam, 9, 0.01, 3);
    CHECK(a.D_est == b.D_est);
}

TEST_CASE("radius refinement of Z estimates") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> c(-4, 4), h(-3, 3);
    int n = 0;
    while (n < 200) {
        const Point3 x{c(rng), c(rng), h(rng)};
        if (branch_distance(x) <= 1e-3) continue;
        ++n;
        const auto a = zorich_lipschitz(x, 2e-5, 64);
        const auto b = zorich_lipschitz(x, 1e-5, 64);
        CHECK(std::fabs(a.upper - b.upper) / b.upper < 0.01);
        CHECK(std::fabs(a.lower - b.lower) / b.lower < 0.01);
    }
}

TEST_CASE("face projection distortion") {
    const double level = 1.0;
    const double eta = 0.3;
    const double s = std::log(level / std::sin(eta / 4));
    for (std::int64_t M : {2, 3}) {
        const SurfaceMap f = face_projection_map({0, 0, 0}, level, M, 0);
        std::vector<PlanePoint> pts;
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) pts.push_back({-0.25 + 0.1 * a, s + 0.6 + 0.3 * b});
        const auto d = relative_distortion(f, pts);
        CHECK(d.D <= 2.1);
        CHECK(d.D >= 1.0);
    }
}

TEST_CASE("area transport") {
    SUBCASE("affine") {
        const Region3 E{{0, 0, 0}, {1, 1, 1}, [](const Point3&) { return true; }};
        const Region3 U{{0, 0, 0}, {1, 1, 1}, [](const Point3& x) { return x.x1 < 0.5; }};
        const auto r = verify_area_transport("affine", Map3([](const Point3& x) { return 2.0 * x; }), E, U, 1.0);
        CHECK(r.pass);
        CHECK(r.ratio == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(r.mfE == doctest::Approx(8.0).epsilon(1e-12));
        CHECK(r.cells >= 1000000);
    }
    SUBCASE("Z on a small cube") {
        const Region3 E{{0.3, 0.2, 1.0}, {0.5, 0.4, 1.2}, [](const Point3&) { return true; }};
        const Region3 U{E.lo, E.hi, [](const Point3& x) { return x.x1 < 0.4 && x.x2 < 0.3 && x.x3 < 1.1; }};
        std::vector<Point3> pts;
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b)
                for (int c = 0; c < 5; ++c) pts.push_back({0.3 + 0.05 * a, 0.2 + 0.05 * b, 1.0 + 0.05 * c});
        const double D = relative_distortion(kZorich, pts).D;
        const auto r = verify_area_transport("zorich cube", kZorich, E, U, D);
        CHECK(r.pass);
        // the volume element of Z is exp(3 x3) |det Dh|; the image of E is close to its integral
        CHECK(r.mfE > 0.0);
    }
    SUBCASE("a failing configuration is reported") {
        const Region3 E{{0, 0, 0}, {1, 1, 1}, [](const Point3&) { return true; }};
        const Region3 U{E.lo, E.hi, [](const Point3& x) { return x.x1 < 0.5; }};
        // x -> (x1^3, x2, x3) has distortion far above 1
        const Map3 g = [](const Point3& x) { return Point3{x.x1 * x.x1 * x.x1 + 0.01 * x.x1, x.x2, x.x3}; };
        const auto r = verify_area_transport("cubic", g, E, U, 1.0);
        CHECK_FALSE(r.pass);
    }
}
