// zorichlab: command-line front end over the library.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zorich/density.hpp"
#include "zorich/distortion.hpp"
#include "zorich/errors.hpp"
#include "zorich/io.hpp"
#include "zorich/preimage_geometry.hpp"
#include "zorich/verify.hpp"
#include "zorich/zorich_map.hpp"

using namespace zorichlab;
namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

struct Common {
    std::string out = "out";
    unsigned threads = 0;
    bool quick = false;
};

Point3 triple(const std::vector<double>& v) { return {v.at(0), v.at(1), v.at(2)}; }

CLI::Option* add_triple(CLI::App* app, const std::string& name, std::vector<double>& target,
                        const std::string& help) {
    return app->add_option(name, target, help)->expected(3)->delimiter(',');
}

// Parameters of a subcommand as they were finally resolved (config file, then flags).
nlohmann::json parameters(const CLI::App* app) {
    nlohmann::json j = nlohmann::json::object();
    for (const CLI::Option* opt : app->get_options()) {
        const std::string name = opt->get_single_name();
        if (name.empty() || name == "help") continue;
        const auto& res = opt->results();
        if (!res.empty()) {
            std::string joined;
            for (std::size_t i = 0; i < res.size(); ++i) joined += (i ? "," : "") + res[i];
            j[name] = joined;
        } else if (!opt->get_default_str().empty()) {
            j[name] = opt->get_default_str();
        }
    }
    return j;
}

void print_point(const char* label, const Point3& p) {
    std::printf("%s = (%.17g, %.17g, %.17g)\n", label, p.x1, p.x2, p.x3);
}

struct LineArgs {
    std::vector<double> base{0, 0, 0};
    std::string face = "x1+";
    double u2 = 0.4123;
    double u3 = 1.5e-4;
    std::vector<double> direction;  // overrides the Y-point when given

    void attach(CLI::App* app) {
        add_triple(app, "--base", base, "base point P of the line");
        app->add_option("--face", face, "face of Y: x1+, x1-, x2+, x2-");
        app->add_option("--u2", u2, "face coordinate u2, |u2| < 1");
        app->add_option("--u3", u3, "face coordinate u3 > 0");
        add_triple(app, "--direction", direction, "explicit direction (allows the excluded families)");
    }

    LineSpec line() const {
        const Point3 P = triple(base);
        if (!direction.empty()) {
            const LineSpec l{P, triple(direction)};
            if (classify(l) == LineClass::degenerate) throw DomainError("direction must be nonzero");
            return l;
        }
        const auto f = parse_face(face);
        if (!f) throw DomainError("unknown face '" + face + "' (expected x1+, x1-, x2+ or x2-)");
        const YPoint a{*f, u2, u3};
        if (!y_point_valid(a))
            throw DomainError("Y-point must have u3 > 0 and u2 outside {-1, 0, 1} with |u2| < 1");
        return LineSpec::through(P, a);
    }
};

void flag_line_class(const LineSpec& line) {
    const LineClass c = classify(line);
    std::printf("line_class = %s\n", std::string(to_string(c)).c_str());
    switch (c) {
        case LineClass::horizontal:
            std::printf("flag = bounded image (|f| <= exp(exp(p3)) = %.6g)\n", std::exp(std::exp(line.base.x3)));
            break;
        case LineClass::coordinate_plane:
        case LineClass::diagonal_plane:
            std::printf("flag = planar image (the line lies in a plane preserved by f)\n");
            break;
        default:
            break;
    }
}

std::vector<fs::path> g_inputs;

void finish(const std::string& command, const CLI::App* app, const fs::path& dir,
            const std::vector<fs::path>& outputs) {
    RunManifest m;
    m.command = command;
    m.parameters = parameters(app);
    m.inputs = g_inputs;
    m.outputs = outputs;
    const fs::path path = dir / (command + "_manifest.json");
    write_manifest(path, m);
    for (const auto& o : outputs) std::printf("wrote %s\n", o.string().c_str());
    std::printf("wrote %s\n", path.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Experiments with the Zorich map Z and its second iterate f = Z o Z"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value configuration file; command-line flags win");
    app.option_defaults()->always_capture_default();

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", common.out, "output directory");
        sub->add_option("--threads", common.threads, "worker threads (0: all cores)");
        sub->add_flag("--quick", common.quick, "reduced sample counts");
    };

    // eval
    std::vector<double> eval_x;
    auto* eval = app.add_subcommand("eval", "evaluate Z(x) and f(x)");
    add_triple(eval, "--x", eval_x, "point x")->required();
    add_common(eval);

    // invert
    std::vector<double> inv_y;
    std::vector<std::int64_t> inv_beam{0, 0};
    auto* invert = app.add_subcommand("invert", "branch of Z^-1 on a beam");
    add_triple(invert, "--y", inv_y, "point y")->required();
    invert->add_option("--beam", inv_beam, "beam index i,j")->expected(2)->delimiter(',');
    add_common(invert);

    // cone
    double cone_level = 1.0, cone_x3_max = 3.0;
    std::vector<std::int64_t> cone_beam_ij{0, 0};
    int cone_n = 32;
    auto* cone = app.add_subcommand("cone", "mesh of the pre-image of the plane x3 = level in one beam");
    cone->add_option("--level", cone_level, "level t != 0");
    cone->add_option("--beam", cone_beam_ij, "beam index i,j (parity must match the sign of t)")
        ->expected(2)
        ->delimiter(',');
    cone->add_option("--x3-max", cone_x3_max, "cut height");
    cone->add_option("--n", cone_n, "cells per side");
    add_common(cone);

    // trace
    LineArgs trace_line;
    TraceOptions trace_opt;
    auto* trace = app.add_subcommand("trace", "adaptive point cloud of f along a line");
    trace_line.attach(trace);
    trace->add_option("--budget", trace_opt.budget, "evaluations of f");
    trace->add_option("--h-max", trace_opt.h_max, "largest gap between in-box points");
    trace->add_option("--R", trace_opt.R, "half extent of the box");
    trace->add_option("--x3-lo", trace_opt.x3_lo, "parameter window, lower height");
    trace->add_option("--x3-hi", trace_opt.x3_hi, "parameter window, upper height");
    add_common(trace);

    // coverage
    LineArgs cov_line;
    TraceOptions cov_opt = coverage_trace_options(10000000);
    int cov_grid = 64;
    auto* coverage = app.add_subcommand("coverage", "voxel coverage of f(L) over [-R, R]^3");
    cov_line.attach(coverage);
    coverage->add_option("--budget", cov_opt.budget, "evaluations of f");
    coverage->add_option("--grid", cov_grid, "voxels per axis");
    coverage->add_option("--R", cov_opt.R, "half extent of the grid");
    coverage->add_option("--x3-lo", cov_opt.x3_lo, "parameter window, lower height");
    coverage->add_option("--x3-hi", cov_opt.x3_hi, "parameter window, upper height");
    add_common(coverage);

    // density
    DensityExperiment dens;
    std::vector<double> dens_P{0, 0, 0};
    auto* density = app.add_subcommand("density", "hit fractions of X_U over a shrinking patch of Y");
    density->add_option("--ball-index", dens.ball_index, "U = n-th ball of the countable base");
    density->add_option("--u2", dens.patch.center.u2, "patch center u2 on the face x1 = +1");
    density->add_option("--u3", dens.patch.center.u3, "patch center u3");
    density->add_option("--delta", dens.patch.delta, "patch half-width of the first rung");
    density->add_option("--grid", dens.grid_n, "grid points per axis (>= 16)");
    density->add_option("--budget", dens.budget_per_line, "evaluations per line");
    density->add_option("--rungs", dens.rungs, "rungs of the delta ladder");
    add_triple(density, "--P", dens_P, "common point of the lines");
    add_common(density);

    // distortion
    std::string dist_kind = "slab";
    double dist_t1 = 0.0, dist_t2 = 1.0, dist_level = 1.0;
    std::int64_t dist_samples = 1000, dist_M = 2, dist_l = 0;
    int dist_grid = 128;
    auto* distortion = app.add_subcommand("distortion", "distortion estimates");
    distortion->add_option("--kind", dist_kind, "lambda | slab | face")
        ->check(CLI::IsMember({"lambda", "slab", "face"}));
    distortion->add_option("--t1", dist_t1, "slab lower height");
    distortion->add_option("--t2", dist_t2, "slab upper height");
    distortion->add_option("--samples", dist_samples, "slab sample points (>= 1000)");
    distortion->add_option("--grid", dist_grid, "grid for lambda(h) (>= 64)");
    distortion->add_option("--level", dist_level, "face: level t > 0");
    distortion->add_option("--M", dist_M, "face: plane index M");
    distortion->add_option("--l", dist_l, "face: strip index l");
    add_common(distortion);

    // verify
    bool verify_full = false;
    double slab_scale = 1.0;
    auto* verify = app.add_subcommand("verify", "run every check and write the verification report");
    verify->add_flag("--full", verify_full, "full sample counts (default: quick)");
    verify->add_option("--mutate-slab-bound", slab_scale, "multiply the slab bound (mutation test)")
        ->group("");
    add_common(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    const fs::path dir = common.out;
    if (app["--config"]->count() > 0) g_inputs.push_back(app["--config"]->as<std::string>());
    try {
        if (*eval) {
            const Point3 x = triple(eval_x);
            print_point("Z(x)", zorich(x));
            Point3 y;
            if (try_zorich_second(x, y)) print_point("f(x)", y);
            else std::printf("f(x) = overflow (Z(x)_3 > 700)\n");
            return 0;
        }
        if (*invert) {
            const Point3 y = triple(inv_y);
            const BeamIndex beam{inv_beam.at(0), inv_beam.at(1)};
            print_point("x", zorich_inverse(y, beam));
            return 0;
        }
        if (*cone) {
            const ConeSurface c = cone_in_beam(cone_level, {cone_beam_ij.at(0), cone_beam_ij.at(1)});
            const fs::path path = dir / "cone_mesh.txt";
            write_triangle_soup(path, cone_mesh(c, cone_x3_max, cone_n));
            finish("cone", cone, dir, {path});
            return 0;
        }
        if (*trace) {
            const LineSpec line = trace_line.line();
            if (common.quick) trace_opt.budget = std::max<std::int64_t>(1000, trace_opt.budget / 10);
            flag_line_class(line);
            const fs::path path = dir / "trace_points.txt";
            PointCloudWriter w(path);
            const TraceStats st = adaptive_trace(line, trace_opt, [&](const TracePoint& p, const TraceStats&) {
                w.add(p.value);
                return true;
            });
            std::printf("evaluations = %lld emitted = %lld overflow_dropped = %lld cap_hit_fraction = %.6g\n",
                        static_cast<long long>(st.evaluations), static_cast<long long>(st.emitted),
                        static_cast<long long>(st.overflow_dropped), st.cap_hit_fraction());
            finish("trace", trace, dir, {path});
            return 0;
        }
        if (*coverage) {
            const LineSpec line = cov_line.line();
            if (common.quick) cov_opt.budget = std::max<std::int64_t>(1000, cov_opt.budget / 10);
            flag_line_class(line);
            VoxelGrid grid(cov_opt.R, cov_grid);
            const CoverageRun run = trace_coverage(line, grid, cov_opt);
            const fs::path path = dir / "coverage.csv";
            write_coverage_csv(path, run.series);
            std::printf("coverage = %.6f (threshold %.2f) cap_hit_fraction = %.6g\n", run.final_coverage,
                        kCoverageThreshold, run.stats.cap_hit_fraction());
            finish("coverage", coverage, dir, {path});
            return 0;
        }
        if (*density) {
            if (common.quick) dens.budget_per_line = std::max<std::int64_t>(1000, dens.budget_per_line / 10);
            const BallSpec U = base_sequence(dens.ball_index);
            const auto recs = epsilon_density(triple(dens_P), dens.patch, U, dens.grid_n, dens.budget_per_line,
                                              dens.rungs, TraceOptions{}, common.threads);
            const fs::path path = dir / "density.csv";
            write_density_csv(path, recs);
            const double lam = lambda_h_estimate(128, common.threads);
            std::printf("U = B((%.6g, %.6g, %.6g), %.6g)\n", U.center.x1, U.center.x2, U.center.x3, U.radius);
            for (const auto& r : recs) std::printf("delta = %.6g fraction = %.6f\n", r.delta, r.fraction);
            std::printf("C/16 = %.6g (lambda_hat = %.6g)\n",
                        coverage_constant_C(U.radius, norm(U.center), lam) / 16, lam);
            finish("density", density, dir, {path});
            return 0;
        }
        if (*distortion) {
            const fs::path path = dir / "distortion.txt";
            auto out = open_output(path);
            if (dist_kind == "lambda") {
                const double lam = lambda_h_estimate(dist_grid, common.threads);
                out << "lambda_hat=" << lam << " grid=" << dist_grid << '\n';
                std::printf("lambda_hat = %.10g\n", lam);
            } else if (dist_kind == "slab") {
                const double lam = lambda_h_estimate(128, common.threads);
                const auto r = verify_slab_bound({dist_t1, dist_t2}, dist_samples, lam, 1, 0.01, common.threads);
                out << "t1=" << dist_t1 << " t2=" << dist_t2 << " D=" << r.D_est << " bound=" << r.bound
                    << " pass=" << (r.pass ? 1 : 0) << '\n';
                std::printf("D = %.6g bound = %.6g pass = %d\n", r.D_est, r.bound, r.pass ? 1 : 0);
            } else {
                const double s = std::log(dist_level / std::sin(0.3 / 4));
                const SurfaceMap f = face_projection_map({0, 0, 0}, dist_level, dist_M, dist_l);
                std::vector<PlanePoint> pts;
                const double mid = kHalfPi + (dist_l - 0.5) * kPi;
                for (int a = 0; a < 6; ++a)
                    for (int b = 0; b < 6; ++b) pts.push_back({mid - 0.25 + 0.1 * a, s + 0.6 + 0.3 * b});
                const auto d = relative_distortion(f, pts, kDefaultRadius, kDefaultDirections, common.threads);
                out << "level=" << dist_level << " M=" << dist_M << " l=" << dist_l << " D=" << d.D << '\n';
                std::printf("D = %.6g\n", d.D);
            }
            out.close();
            finish("distortion", distortion, dir, {path});
            return 0;
        }
        if (*verify) {
            VerifyOptions vo;
            vo.level = verify_full ? VerifyLevel::full : VerifyLevel::quick;
            vo.threads = common.threads;
            vo.slab_bound_scale = slab_scale;
            vo.progress = [](const CheckRecord& r) {
                std::printf("%-24s %s value=%.6g bound=%.6g %.2fs %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                            r.value, r.bound, r.seconds, r.note.c_str());
                std::fflush(stdout);
            };
            const auto t0 = std::chrono::steady_clock::now();
            const VerificationReport report = run_verification(vo);
            const fs::path path = dir / "verification_report.txt";
            {
                auto out = open_output(path);
                write_report(out, report);
            }
            std::printf("overall %s in %.1f s\n", report.pass() ? "PASS" : "FAIL",
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
            finish("verify", verify, dir, {path});
            return report.pass() ? 0 : 1;
        }
    } catch (const ZeroInputError& e) {
        std::fprintf(stderr, "error: zero input: %s\n", e.what());
        return kExitValidation;
    } catch (const PreconditionError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return kExitNumeric;
    }
    return 0;
}
