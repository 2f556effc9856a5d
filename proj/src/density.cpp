#include "zorich/density.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "zorich/errors.hpp"
#include "zorich/parallel.hpp"
#include "zorich/zorich_map.hpp"

namespace zorichlab {

// ---- base sequence ----

bool ball_valid(const BallSpec& ball) noexcept {
    const double q = norm(ball.center);
    return std::isfinite(q) && ball.radius > 0.0 && ball.radius < q && q != 1.0;
}

void BaseSequence::start_stage(int k) {
    stage_ = k;
    half_ = std::int64_t{1} << (2 * k);
    i_ = j_ = l_ = 0;
}

BallSpec BaseSequence::next() {
    if (stage_ == 0) start_stage(1);
    for (;;) {
        if (i_ > 2 * half_) start_stage(stage_ + 1);
        const double step = std::ldexp(1.0, -stage_);
        const Point3 q{step * static_cast<double>(i_ - half_), step * static_cast<double>(j_ - half_),
                       step * static_cast<double>(l_ - half_)};
        if (++l_ > 2 * half_) {
            l_ = 0;
            if (++j_ > 2 * half_) {
                j_ = 0;
                ++i_;
            }
        }
        const double r = norm(q);
        if (r >= 2.0 * step && std::fabs(r - 1.0) >= 2.0 * step) {
            ++index_;
            return {q, step};
        }
    }
}

BallSpec base_sequence(std::int64_t n) {
    if (n < 1) throw DomainError("base_sequence: n must be at least 1");
    BaseSequence seq;
    BallSpec b;
    for (std::int64_t k = 0; k < n; ++k) b = seq.next();
    return b;
}

// ---- tracing ----

namespace {

constexpr long double kTwoPiL = 6.283185307179586476925286766559005768L;
constexpr long double kPiL = 3.141592653589793238462643383279502884L;

struct Sample {
    long double s = 0.0L;
    Point3 f;
    double fnorm = 0.0;  // |f| = exp(z3), +inf on overflow
    double z3 = 0.0;     // third coordinate of Z(x)
    std::int64_t bi = 0, bj = 0;
    bool finite = true;
};

long double reduce(long double t) { return t - floorl(t / kTwoPiL) * kTwoPiL; }

Sample evaluate(const LineSpec& line, long double s) {
    Sample out;
    out.s = s;
    const long double x1 = static_cast<long double>(line.base.x1) + s * line.direction.x1;
    const long double x2 = static_cast<long double>(line.base.x2) + s * line.direction.x2;
    const long double x3 = static_cast<long double>(line.base.x3) + s * line.direction.x3;
    out.bi = static_cast<std::int64_t>(floorl((x1 + kPiL / 2) / kPiL));
    out.bj = static_cast<std::int64_t>(floorl((x2 + kPiL / 2) / kPiL));
    const Point3 x{static_cast<double>(reduce(x1)), static_cast<double>(reduce(x2)), static_cast<double>(x3)};
    Point3 z;
    if (!try_zorich(x, z)) {
        out.z3 = std::numeric_limits<double>::infinity();
        out.fnorm = out.z3;
        out.finite = false;
        return out;
    }
    out.z3 = z.x3;
    if (!try_zorich(z, out.f)) {
        out.fnorm = std::numeric_limits<double>::infinity();
        out.finite = false;
        return out;
    }
    out.fnorm = std::exp(z.x3);
    return out;
}

bool in_box(const Point3& p, double R) {
    return std::fabs(p.x1) <= R && std::fabs(p.x2) <= R && std::fabs(p.x3) <= R;
}

struct BallTarget {
    Point3 q;
    double delta = 0.0;
    double qnorm = 0.0;
};

struct Interval {
    Sample a, b;
    int depth = 0;
};

class Tracer {
public:
    Tracer(const LineSpec& line, const TraceOptions& opt, const BallTarget* ball, const TraceSink& sink)
        : line_(line), opt_(opt), ball_(ball), sink_(sink) {
        far_ = ball ? ball->qnorm + ball->delta : std::sqrt(3.0) * opt.R;
        ln_far_ = std::log(far_);
    }

    TraceStats run() {
        if (!(opt_.R > 0.0) || !(opt_.h_max > 0.0) || opt_.max_depth < 1 || opt_.parts < 1 ||
            opt_.part < 0 || opt_.part >= opt_.parts) {
            throw DomainError("adaptive_trace: invalid options");
        }
        const Point3& d = line_.direction;
        if (d.x1 == 0.0 && d.x2 == 0.0 && d.x3 == 0.0) throw DomainError("adaptive_trace: zero direction");
        long double s0, s1;
        if (d.x3 != 0.0) {
            s0 = (static_cast<long double>(opt_.x3_lo) - line_.base.x3) / d.x3;
            s1 = (static_cast<long double>(opt_.x3_hi) - line_.base.x3) / d.x3;
            if (s0 > s1) std::swap(s0, s1);
        } else {
            s0 = -opt_.s_extent;
            s1 = opt_.s_extent;
        }
        // initial intervals: at most pi/8 of horizontal motion and 1/4 of vertical motion
        const double horiz = std::fmax(std::fabs(d.x1), std::fabs(d.x2));
        double step = std::numeric_limits<double>::infinity();
        if (horiz > 0.0) step = std::min(step, kPi / 8.0 / horiz);
        if (d.x3 != 0.0) step = std::min(step, 0.25 / std::fabs(d.x3));
        const auto total = static_cast<std::int64_t>(std::max(1.0L, ceill((s1 - s0) / step)));
        const std::int64_t first = total * opt_.part / opt_.parts;
        const std::int64_t last = total * (opt_.part + 1) / opt_.parts;
        stats_.initial_intervals = last - first;
        const long double width = (s1 - s0) / total;

        if (first == last) return stats_;
        Sample a = eval(s0 + width * first);
        if (!emit(a)) return stats_;
        for (std::int64_t k = first; k < last && !stop_; ++k) {
            if (stats_.evaluations >= opt_.budget) {
                stats_.budget_exhausted = true;
                break;
            }
            Sample b = eval(k + 1 == total ? s1 : s0 + width * (k + 1));
            refine({a, b, 0});
            a = b;
        }
        return stats_;
    }

    const TraceStats& stats() const { return stats_; }

private:
    Sample eval(long double s) {
        ++stats_.evaluations;
        Sample x = evaluate(line_, s);
        if (ball_ && x.finite) {
            const double dq = distance(x.f, ball_->q);
            if (dq < ball_dmin_) ball_dmin_ = dq;
            if (dq < ball_->delta && !witness_) witness_ = static_cast<double>(s);
        }
        return x;
    }

    bool emit(const Sample& x) {
        if (!x.finite) {
            ++stats_.overflow_dropped;
            return true;
        }
        ++stats_.emitted;
        if (!sink_({static_cast<double>(x.s), x.f}, stats_)) stop_ = true;
        if (ball_ && witness_) stop_ = true;
        return !stop_;
    }

    // decides one interval; 0 accept, 1 skip, 2 split
    int classify(const Interval& iv) const {
        const Sample& a = iv.a;
        const Sample& b = iv.b;
        const bool same = a.bi == b.bi && a.bj == b.bj;
        const bool even = ((a.bi + a.bj) % 2) == 0;
        double chord = (a.finite && b.finite) ? distance(a.f, b.f) : std::numeric_limits<double>::infinity();
        if (same && even) {
            // ln Z3 is concave on a beam: the smallest |f| sits at an endpoint
            if (std::min(a.z3, b.z3) > ln_far_) return 1;
        } else if (same) {
            // |f| = exp(-|Z3|) is largest at an endpoint
            const double rho = std::exp(std::max(a.z3, b.z3));
            if (ball_ && rho < ball_->qnorm - ball_->delta) return 1;
            if (2.0 * rho <= opt_.h_max) return 0;
        }
        const bool near = !same || a.fnorm <= far_ || b.fnorm <= far_;
        if (!near) return 0;
        if (chord > opt_.h_max) return 2;
        if (ball_) {
            const double dmin = std::min(a.finite ? distance(a.f, ball_->q) : chord,
                                         b.finite ? distance(b.f, ball_->q) : chord);
            if (chord >= std::max(dmin - ball_->delta, 1e-6 * ball_->delta)) return 2;
        }
        return 0;
    }

    void refine(Interval root) {
        stack_.clear();
        stack_.push_back(root);
        while (!stack_.empty() && !stop_) {
            Interval iv = stack_.back();
            stack_.pop_back();
            stats_.deepest = std::max(stats_.deepest, iv.depth);
            const int verdict = classify(iv);
            const bool boxed = (iv.a.finite && in_box(iv.a.f, opt_.R)) || (iv.b.finite && in_box(iv.b.f, opt_.R));
            if (verdict == 2) {
                if (iv.depth < opt_.max_depth && stats_.evaluations < opt_.budget) {
                    const long double mid = 0.5L * (iv.a.s + iv.b.s);
                    if (mid > iv.a.s && mid < iv.b.s) {
                        const Sample m = eval(mid);
                        stack_.push_back({m, iv.b, iv.depth + 1});
                        stack_.push_back({iv.a, m, iv.depth + 1});
                        continue;
                    }
                }
                if (stats_.evaluations >= opt_.budget) stats_.budget_exhausted = true;
                else if (boxed) ++stats_.cap_hits;
            }
            if (verdict == 1) ++stats_.skipped_intervals;
            else if (boxed) ++stats_.leaves_in_box;
            if (!emit(iv.b)) return;
        }
    }

    const LineSpec& line_;
    const TraceOptions& opt_;
    const BallTarget* ball_;
    const TraceSink& sink_;
    double far_ = 0.0;
    double ln_far_ = 0.0;
    TraceStats stats_;
    std::vector<Interval> stack_;
    bool stop_ = false;

public:
    std::optional<double> witness_;
    double ball_dmin_ = std::numeric_limits<double>::infinity();
};

}  // namespace

Point3 line_image(const LineSpec& line, long double s) noexcept {
    const Sample x = evaluate(line, s);
    if (!x.finite) {
        const double inf = std::numeric_limits<double>::infinity();
        return {inf, inf, inf};
    }
    return x.f;
}

TraceStats adaptive_trace(const LineSpec& line, const TraceOptions& options, const TraceSink& sink) {
    Tracer t(line, options, nullptr, sink);
    return t.run();
}

// ---- voxels ----

VoxelGrid::VoxelGrid(double half_extent, int resolution, double r_excl, double shell_w)
    : R_(half_extent), N_(resolution) {
    if (!(half_extent > 0.0) || resolution < 1 || resolution > 1024) {
        throw DomainError("VoxelGrid: need half_extent > 0 and 1 <= resolution <= 1024");
    }
    const double h = voxel_size();
    const double diag = std::sqrt(3.0) * h;
    r_excl_ = r_excl < 0.0 ? diag : r_excl;
    shell_w_ = shell_w < 0.0 ? diag : shell_w;
    const auto words = static_cast<std::size_t>((cells() + 63) / 64);
    occupancy_.assign(words, 0);
    exclusion_.assign(words, 0);
    for (std::int64_t idx = 0; idx < cells(); ++idx) {
        const Point3 c = center(idx);
        // distance range from the origin over the voxel
        auto axis_min = [&](double v) { return std::max(0.0, std::fabs(v) - 0.5 * h); };
        auto axis_max = [&](double v) { return std::fabs(v) + 0.5 * h; };
        const double dmin = std::hypot(axis_min(c.x1), axis_min(c.x2), axis_min(c.x3));
        const double dmax = std::hypot(axis_max(c.x1), axis_max(c.x2), axis_max(c.x3));
        const bool near_origin = dmin < r_excl_;
        const bool near_shell = dmin < 1.0 + shell_w_ && dmax > 1.0 - shell_w_;
        if (near_origin || near_shell) {
            exclusion_[static_cast<std::size_t>(idx >> 6)] |= std::uint64_t{1} << (idx & 63);
        } else {
            ++eligible_;
        }
    }
}

std::optional<std::int64_t> VoxelGrid::index_of(const Point3& p) const noexcept {
    const double h = voxel_size();
    auto axis = [&](double v) -> std::int64_t {
        if (!(v >= -R_ && v <= R_)) return -1;
        return std::min<std::int64_t>(N_ - 1, static_cast<std::int64_t>((v + R_) / h));
    };
    const std::int64_t i = axis(p.x1), j = axis(p.x2), k = axis(p.x3);
    if (i < 0 || j < 0 || k < 0) return std::nullopt;
    return (i * N_ + j) * N_ + k;
}

Point3 VoxelGrid::center(std::int64_t index) const noexcept {
    const double h = voxel_size();
    const std::int64_t k = index % N_;
    const std::int64_t j = (index / N_) % N_;
    const std::int64_t i = index / (static_cast<std::int64_t>(N_) * N_);
    return {-R_ + (i + 0.5) * h, -R_ + (j + 0.5) * h, -R_ + (k + 0.5) * h};
}

bool VoxelGrid::excluded(std::int64_t index) const noexcept { return test(exclusion_, index); }
bool VoxelGrid::occupied(std::int64_t index) const noexcept { return test(occupancy_, index); }

bool VoxelGrid::mark(const Point3& p) noexcept {
    const auto idx = index_of(p);
    if (!idx) return false;
    auto& word = occupancy_[static_cast<std::size_t>(*idx >> 6)];
    const std::uint64_t bit = std::uint64_t{1} << (*idx & 63);
    if (word & bit) return false;
    word |= bit;
    if (!excluded(*idx)) ++covered_;
    return true;
}

void VoxelGrid::merge(const VoxelGrid& other) {
    if (other.R_ != R_ || other.N_ != N_ || other.r_excl_ != r_excl_ || other.shell_w_ != shell_w_) {
        throw DomainError("VoxelGrid::merge: grids differ in geometry");
    }
    covered_ = 0;
    for (std::size_t w = 0; w < occupancy_.size(); ++w) {
        occupancy_[w] |= other.occupancy_[w];
        covered_ += std::popcount(occupancy_[w] & ~exclusion_[w]);
    }
}

double VoxelGrid::coverage() const noexcept {
    return eligible_ == 0 ? 0.0 : static_cast<double>(covered_) / static_cast<double>(eligible_);
}

void CoverageTracker::consume(const Point3& p, double cap_hit_fraction) {
    grid_.mark(p);
    ++consumed_;
    if (consumed_ == next_checkpoint_) {
        series_.push_back({consumed_, grid_.coverage(), cap_hit_fraction});
        next_checkpoint_ *= 10;
    }
}

void CoverageTracker::finish(double cap_hit_fraction) {
    if (series_.empty() || series_.back().points_consumed != consumed_) {
        series_.push_back({consumed_, grid_.coverage(), cap_hit_fraction});
    }
}

CoverageRun trace_coverage(const LineSpec& line, VoxelGrid& grid, TraceOptions options) {
    if (options.h_max <= 0.0) options.h_max = 0.5 * grid.voxel_size();
    options.R = grid.half_extent();
    CoverageTracker tracker(grid);
    CoverageRun run;
    run.stats = adaptive_trace(line, options, [&](const TracePoint& p, const TraceStats& st) {
        tracker.consume(p.value, st.cap_hit_fraction());
        return true;
    });
    tracker.finish(run.stats.cap_hit_fraction());
    run.series = tracker.series();
    run.final_coverage = grid.coverage();
    return run;
}

// ---- balls ----

HitResult hits_ball(const LineSpec& line, const BallSpec& ball, std::int64_t budget, const TraceOptions& base) {
    if (!ball_valid(ball)) throw DomainError("hits_ball: need 0 < delta < |q| and |q| != 1");
    const BallTarget target{ball.center, ball.radius, norm(ball.center)};
    TraceOptions opt = base;
    opt.budget = budget;
    opt.R = target.qnorm + target.delta;
    opt.h_max = std::min(base.h_max, 0.5 * target.delta);
    const TraceSink sink = [](const TracePoint&, const TraceStats&) { return true; };
    Tracer t(line, opt, &target, sink);
    const TraceStats st = t.run();
    HitResult r;
    r.hit = t.witness_.has_value();
    r.witness_param = t.witness_;
    r.min_distance = t.ball_dmin_;
    r.evaluations = st.evaluations;
    return r;
}

std::vector<DensityRecord> epsilon_density(const Point3& P, const PatchSpec& patch, const BallSpec& ball,
                                           int grid_n, std::int64_t budget_per_line, int rungs,
                                           const TraceOptions& base, unsigned threads) {
    if (grid_n < 16) throw DomainError("epsilon_density: grid_n must be at least 16");
    if (rungs < 1) throw DomainError("epsilon_density: need at least one rung");
    if (!(patch.delta > 0.0)) throw DomainError("epsilon_density: patch delta must be positive");
    if (!y_point_valid(patch.center)) throw DomainError("epsilon_density: patch center is not a valid point of Y");
    std::vector<DensityRecord> out;
    double delta = patch.delta;
    for (int rung = 0; rung < rungs; ++rung, delta *= 0.5) {
        const std::size_t cells = static_cast<std::size_t>(grid_n) * grid_n;
        std::vector<int> result(cells, -1);  // -1 invalid, 0 miss, 1 hit
        parallel_for(cells, threads, [&](std::size_t c) {
            const int a = static_cast<int>(c / grid_n);
            const int b = static_cast<int>(c % grid_n);
            YPoint y = patch.center;
            y.u2 += delta * (-1.0 + (2.0 * a + 1.0) / grid_n);
            y.u3 += delta * (-1.0 + (2.0 * b + 1.0) / grid_n);
            if (!y_point_valid(y)) return;
            result[c] = hits_ball(LineSpec::through(P, y), ball, budget_per_line, base).hit ? 1 : 0;
        });
        DensityRecord rec;
        rec.delta = delta;
        rec.grid_n = grid_n;
        for (int v : result) {
            if (v < 0) ++rec.skipped;
            else {
                ++rec.valid_points;
                rec.hits += v;
            }
        }
        if (static_cast<double>(rec.skipped) > 0.05 * static_cast<double>(cells)) {
            std::ostringstream os;
            os << "epsilon_density: " << rec.skipped << " of " << cells
               << " grid points are excluded lines; the patch is degenerate";
            throw DegenerateError(os.str());
        }
        rec.fraction = rec.valid_points == 0 ? 0.0 : static_cast<double>(rec.hits) / rec.valid_points;
        out.push_back(rec);
    }
    return out;
}

// ---- excluded families ----

namespace {

bool multiple_of(double v, double period) {
    const double k = std::round(v / period);
    return std::fabs(v - k * period) <= 1e-12 * std::max(1.0, std::fabs(v));
}

}  // namespace

ConfinementReport check_confinement(const LineSpec& line, const TraceOptions& options) {
    ConfinementReport r;
    r.kind = classify(line);
    const Point3& p = line.base;
    const Point3& d = line.direction;
    std::function<double(const Point3&)> violation;
    switch (r.kind) {
        case LineClass::horizontal: {
            const double bound = std::exp(std::exp(p.x3)) * (1.0 + 1e-12);
            violation = [bound](const Point3& f) { return std::max(0.0, norm(f) - bound); };
            r.applicable = true;
            break;
        }
        case LineClass::coordinate_plane:
            if (d.x1 == 0.0 && multiple_of(p.x1, kPi)) {
                violation = [](const Point3& f) { return std::fabs(f.x1) / std::max(1.0, norm(f)); };
                r.applicable = true;
            } else if (d.x2 == 0.0 && multiple_of(p.x2, kPi)) {
                violation = [](const Point3& f) { return std::fabs(f.x2) / std::max(1.0, norm(f)); };
                r.applicable = true;
            }
            break;
        case LineClass::diagonal_plane: {
            const double sign = (d.x1 == d.x2) ? 1.0 : -1.0;
            if (multiple_of(p.x2 - sign * p.x1, kTwoPi)) {
                violation = [sign](const Point3& f) {
                    return std::fabs(f.x2 - sign * f.x1) / std::max(1.0, norm(f));
                };
                r.applicable = true;
            }
            break;
        }
        default:
            break;
    }
    if (!r.applicable) return r;
    adaptive_trace(line, options, [&](const TracePoint& tp, const TraceStats&) {
        ++r.points;
        const double v = violation(tp.value);
        r.worst = std::max(r.worst, v);
        if (v > 1e-9) ++r.violations;
        return true;
    });
    return r;
}

}  // namespace zorichlab
