// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "thresholds.hpp"
#include "zorich/density.hpp"
#include "zorich/distortion.hpp"
#include "zorich/preimage_geometry.hpp"
#include "zorich/verify.hpp"

using namespace zorichlab;
namespace acc = acceptance;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const CheckRecord& pick(const std::vector<CheckRecord>& recs, const std::string& name) {
    for (const auto& r : recs)
        if (r.name == name) return r;
    std::fprintf(stderr, "missing check %s\n", name.c_str());
    std::abort();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

int failures = 0;

void criterion(int id, const char* title, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), since(t0));
    std::fflush(stdout);
}

}  // namespace

int main() {
    const CheckSizes full = CheckSizes::for_level(VerifyLevel::full);
    const unsigned threads = 0;

    criterion(1, "norm law", [&] {
        const auto t0 = Clock::now();
        const auto recs = check_norm_law(full);
        const double dt = since(t0);
        const double v = pick(recs, "norm_law").value;
        return Outcome{v <= acc::kNormLaw && dt < acc::kNormLawSeconds,
                       "max rel err " + num(v) + " <= " + num(acc::kNormLaw) + ", 1e5 samples in " + num(dt) +
                           " s < 1 s"};
    });

    criterion(2, "strong automorphy", [&] {
        const double v = pick(check_automorphy(full), "strong_automorphy").value;
        return Outcome{v <= acc::kAutomorphy, "max err " + num(v) + " <= " + num(acc::kAutomorphy) + ", 1e4 words"};
    });

    criterion(3, "inverse branches", [&] {
        const double v = pick(check_inverse_branches(full), "inverse_branches").value;
        return Outcome{v <= acc::kInverse, "max rel err " + num(v) + " <= " + num(acc::kInverse) + ", 1e4 per parity"};
    });

    criterion(4, "cone correctness", [&] {
        const auto recs = check_cones(full);
        const auto& a = pick(recs, "cone_level");
        const auto& b = pick(recs, "beam_faces");
        return Outcome{a.pass && a.value <= acc::kConeLevel && b.value <= acc::kBeamFace,
                       "|Z3 - t| " + num(a.value) + " <= " + num(acc::kConeLevel) + "; faces " + num(b.value) +
                           " <= " + num(acc::kBeamFace)};
    });

    criterion(5, "boundary distance", [&] {
        const double v = pick(check_boundary_distance(full), "boundary_distance").value;
        return Outcome{v <= acc::kBoundaryDistance, "max diff " + num(v) + " <= " + num(acc::kBoundaryDistance)};
    });

    criterion(6, "constant a", [&] {
        const double v = pick(check_constant_a(full), "constant_a").value;
        return Outcome{v == 0.0, num(v) + " violations"};
    });

    criterion(7, "area ratio", [&] {
        const auto recs = check_area_ratio(full);
        const double q = pick(recs, "logsquare_area").value;
        const double b = pick(recs, "area_ratio_bound").value;
        const double p = pick(recs, "area_ratio_at_3").value;
        return Outcome{q <= acc::kLogSquareArea && b == 0.0 && p <= acc::kRatioAtThree,
                       "quadrature " + num(q) + " <= " + num(acc::kLogSquareArea) + "; ratio >= 2pi: " + num(b) +
                           "; |ratio(3) - pi| " + num(p) + " <= " + num(acc::kRatioAtThree)};
    });

    criterion(8, "projection onto x1 = pi/2 + M pi", [&] {
        const auto recs = check_projection(full);
        const double a = pick(recs, "projection_closed_form").value;
        const double d = pick(recs, "projection_distortion").value;
        return Outcome{a <= acc::kProjection && d <= acc::kProjectionDistortion,
                       "vs oracle " + num(a) + " <= " + num(acc::kProjection) + "; |D - 1| " + num(d) +
                           " <= " + num(acc::kProjectionDistortion)};
    });

    criterion(9, "slab distortion", [&] {
        const auto recs = check_slabs(full, threads);
        const auto& st = pick(recs, "lambda_stability");
        const auto& sl = pick(recs, "slab_bound");
        return Outcome{st.value <= acc::kLambdaStability && sl.value <= 1.0 && sl.tolerance == acc::kSlabSlack,
                       "worst D / (lambda^2 e^Delta 1.01) " + num(sl.value) + " over 50 slabs; " + st.note +
                           ", refinement " + num(st.value) + " <= " + num(acc::kLambdaStability)};
    });

    criterion(10, "face projection distortion", [&] {
        const auto recs = check_face_distortion(full);
        const auto& r = pick(recs, "face_distortion");
        return Outcome{r.value <= acc::kFaceDistortion && full.face_configs == acc::kFaceConfigs,
                       "max D " + num(r.value) + " <= " + num(acc::kFaceDistortion) + ", " + r.note};
    });

    criterion(11, "ray-strip-face intersection", [&] {
        const auto recs = check_strip_intersection(full);
        const auto& r = pick(recs, "strip_intersection");
        return Outcome{r.value == 0.0 && full.strip_rays == acc::kStripRays,
                       num(r.value) + " no-intersection errors, " + r.note};
    });

    criterion(12, "area transport", [&] {
        const auto recs = check_area_transport(full, threads);
        const auto& r = pick(recs, "area_transport");
        return Outcome{r.value == 0.0 && r.tolerance == acc::kTransportInflation &&
                           full.transport_configs == acc::kTransportConfigs,
                       num(r.value) + " failed, " + r.note + ", lambda inflated 2%"};
    });

    criterion(13, "density phenomenon", [&] {
        const auto t0 = Clock::now();
        const auto lines = coverage_lines(acc::kCoverageLines);
        std::string detail = "coverage";
        bool ok = true;
        for (const LineSpec& line : lines) {
            VoxelGrid grid(10.0, 64);
            const CoverageRun run = trace_coverage(line, grid, coverage_trace_options(full.coverage_budget));
            for (std::size_t j = 1; j < run.series.size(); ++j)
                ok = ok && run.series[j].coverage >= run.series[j - 1].coverage;
            ok = ok && run.final_coverage >= kCoverageThreshold;
            detail += " " + num(run.final_coverage);
        }
        // excluded: the plane x3 = 1 and the plane x1 = 0
        const LineSpec horizontal{{0.0, 0.0, 1.0}, {1.0, 0.4123, 0.0}};
        const LineSpec vertical_plane{{0.0, 0.0, 0.0}, {0.0, 1.0, 1.5e-4}};
        detail += "; excluded";
        for (const LineSpec& line : {horizontal, vertical_plane}) {
            VoxelGrid grid(10.0, 64);
            const double c = trace_coverage(line, grid, coverage_trace_options(full.coverage_budget)).final_coverage;
            ok = ok && c < kCoverageThreshold;
            detail += " " + num(c);
        }
        const double dt = since(t0);
        ok = ok && dt < acc::kCoverageSeconds;
        return Outcome{ok, detail + " vs threshold " + num(kCoverageThreshold) + " (pilot low " +
                               num(acc::kPilotCoverageLow) + "), " + num(dt) + " s < 300 s"};
    });

    criterion(14, "epsilon-density trend", [&] {
        const DensityExperiment e;
        const BallSpec U = base_sequence(e.ball_index);
        const auto recs =
            epsilon_density({0, 0, 0}, e.patch, U, e.grid_n, e.budget_per_line, e.rungs, TraceOptions{}, threads);
        bool ok = static_cast<int>(recs.size()) == 4;
        std::string detail = "fractions";
        for (const auto& r : recs) {
            ok = ok && r.fraction >= kDensityFractionFloor;
            detail += " " + num(r.fraction);
        }
        const double lam = lambda_h_estimate(128, threads);
        const double eps = coverage_constant_C(U.radius, norm(U.center), lam) / 16;
        return Outcome{ok, detail + " >= " + num(kDensityFractionFloor) + " (pilot low " +
                               num(acc::kPilotDensityLow) + "); C/16 = " + num(eps) + " (observational)"};
    });

    criterion(15, "verify command", [&] {
        auto t0 = Clock::now();
        const VerificationReport quick = run_verification({VerifyLevel::quick, threads, 1.0, {}});
        const double tq = since(t0);
        t0 = Clock::now();
        const VerificationReport fullr = run_verification({VerifyLevel::full, threads, 1.0, {}});
        const double tf = since(t0);
        return Outcome{quick.pass() && tq < acc::kQuickSeconds && fullr.pass() && tf < acc::kFullSeconds,
                       std::string("quick ") + (quick.pass() ? "pass" : "FAIL") + " in " + num(tq) + " s < 60 s; full " +
                           (fullr.pass() ? "pass" : "FAIL") + " in " + num(tf) + " s < 900 s"};
    });

    std::printf("%d of 15 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
