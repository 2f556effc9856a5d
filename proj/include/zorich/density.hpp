#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "zorich/geometry.hpp"
#include "zorich/lines.hpp"

namespace zorichlab {

struct BallSpec {
    Point3 center;
    double radius = 0.5;
};

// 0 < radius < |center| and |center| != 1.
bool ball_valid(const BallSpec& ball) noexcept;

// Countable base of R^3 minus (S^2 and 0). Stage k >= 1 runs over the dyadic points
// 2^-k Z^3 inside [-2^k, 2^k]^3 in lexicographic order, keeping q with |q| >= 2 delta_k
// and ||q| - 1| >= 2 delta_k, and pairs each with delta_k = 2^-k. The radii are
// nonincreasing along the sequence.
class BaseSequence {
public:
    BallSpec next();
    std::int64_t index() const noexcept { return index_; }  // balls returned so far
    int stage() const noexcept { return stage_; }

private:
    void start_stage(int k);

    int stage_ = 0;
    std::int64_t half_ = 0;  // 4^k: coordinates are 2^-k (i - half_), 0 <= i <= 2 half_
    std::int64_t i_ = 0, j_ = 0, l_ = 0;
    std::int64_t index_ = 0;
};

// The n-th ball (n >= 1). Linear in n.
BallSpec base_sequence(std::int64_t n);

struct TraceOptions {
    double R = 10.0;                 // box [-R, R]^3
    std::int64_t budget = 1000000;   // evaluations of f
    double h_max = 0.1;              // largest gap between consecutive in-box images
    int max_depth = 48;
    // parameter window: x3 in [x3_lo, x3_hi]; horizontal lines use |s| <= s_extent
    double x3_lo = -4.0;
    double x3_hi = 24.0;
    double s_extent = 200.0;
    // trace only chunk `part` of `parts` equal runs of the initial intervals
    int part = 0;
    int parts = 1;
};

struct TraceStats {
    std::int64_t evaluations = 0;
    std::int64_t emitted = 0;
    std::int64_t overflow_dropped = 0;
    std::int64_t skipped_intervals = 0;
    std::int64_t leaves_in_box = 0;    // accepted intervals with an endpoint in the box
    std::int64_t cap_hits = 0;         // of those, the ones cut at max_depth with a gap > h_max
    std::int64_t initial_intervals = 0;
    int deepest = 0;
    bool budget_exhausted = false;

    double cap_hit_fraction() const noexcept {
        return leaves_in_box == 0 ? 0.0 : static_cast<double>(cap_hits) / static_cast<double>(leaves_in_box);
    }
};

struct TracePoint {
    double s = 0.0;  // line parameter, point = base + s direction
    Point3 value;    // f(base + s direction)
};

// Return false to stop the trace.
using TraceSink = std::function<bool(const TracePoint&, const TraceStats&)>;

// Samples f = Z o Z along the line, bisecting parameter intervals whose image endpoints
// are more than h_max apart while the image can meet the box. Intervals inside one
// beam are skipped when their image provably misses the circumscribed ball of the box.
// Points are emitted in parameter order. Deterministic.
TraceStats adaptive_trace(const LineSpec& line, const TraceOptions& options, const TraceSink& sink);

// f along the line at parameter s, with the line evaluated in extended precision
// and reduced mod 2 pi before the double evaluation. Non-finite on overflow.
Point3 line_image(const LineSpec& line, long double s) noexcept;

class VoxelGrid {
public:
    // r_excl, shell_w < 0 select one voxel diagonal.
    VoxelGrid(double half_extent, int resolution, double r_excl = -1.0, double shell_w = -1.0);

    double half_extent() const noexcept { return R_; }
    int resolution() const noexcept { return N_; }
    double voxel_size() const noexcept { return 2.0 * R_ / N_; }
    double r_excl() const noexcept { return r_excl_; }
    double shell_w() const noexcept { return shell_w_; }

    std::optional<std::int64_t> index_of(const Point3& p) const noexcept;
    Point3 center(std::int64_t index) const noexcept;
    bool excluded(std::int64_t index) const noexcept;
    bool occupied(std::int64_t index) const noexcept;

    // Returns true when the point fell in a voxel that was empty.
    bool mark(const Point3& p) noexcept;
    void merge(const VoxelGrid& other);

    std::int64_t cells() const noexcept { return static_cast<std::int64_t>(N_) * N_ * N_; }
    std::int64_t eligible() const noexcept { return eligible_; }
    std::int64_t covered() const noexcept { return covered_; }
    double coverage() const noexcept;

    bool same_occupancy(const VoxelGrid& other) const noexcept { return occupancy_ == other.occupancy_; }

private:
    bool test(const std::vector<std::uint64_t>& bits, std::int64_t i) const noexcept {
        return (bits[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1u;
    }

    double R_;
    int N_;
    double r_excl_;
    double shell_w_;
    std::vector<std::uint64_t> occupancy_;
    std::vector<std::uint64_t> exclusion_;
    std::int64_t eligible_ = 0;
    std::int64_t covered_ = 0;
};

struct CoverageSample {
    std::int64_t points_consumed = 0;
    double coverage = 0.0;
    double cap_hit_fraction = 0.0;
};

// Marks every in-box point of the stream; records a sample at 10^3, 10^4, ... points
// and at the end of the stream.
class CoverageTracker {
public:
    explicit CoverageTracker(VoxelGrid& grid) : grid_(grid) {}

    void consume(const Point3& p, double cap_hit_fraction = 0.0);
    void finish(double cap_hit_fraction = 0.0);

    const std::vector<CoverageSample>& series() const noexcept { return series_; }
    std::int64_t consumed() const noexcept { return consumed_; }

private:
    VoxelGrid& grid_;
    std::vector<CoverageSample> series_;
    std::int64_t consumed_ = 0;
    std::int64_t next_checkpoint_ = 1000;
};

struct CoverageRun {
    std::vector<CoverageSample> series;
    TraceStats stats;
    double final_coverage = 0.0;
};

// adaptive_trace of one line into `grid` (h_max defaults to half a voxel when <= 0).
CoverageRun trace_coverage(const LineSpec& line, VoxelGrid& grid, TraceOptions options);

struct HitResult {
    bool hit = false;
    std::optional<double> witness_param;
    double min_distance = 0.0;
    std::int64_t evaluations = 0;
};

// Adaptive trace aimed at the ball: box R = |q| + delta, extra refinement while a
// chord could reach the ball, stops at the first traced point inside it.
HitResult hits_ball(const LineSpec& line, const BallSpec& ball, std::int64_t budget,
                    const TraceOptions& base = {});

struct PatchSpec {
    YPoint center;
    double delta = 0.01;
};

struct DensityRecord {
    double delta = 0.0;
    int grid_n = 0;
    std::int64_t valid_points = 0;
    std::int64_t skipped = 0;
    std::int64_t hits = 0;
    double fraction = 0.0;
};

// hits_ball over the cell centers of a grid_n x grid_n grid of E_delta for the
// ladder delta, delta/2, ..., one record per rung. Throws DegenerateError when
// more than 5% of a rung's grid points are invalid.
std::vector<DensityRecord> epsilon_density(const Point3& P, const PatchSpec& patch, const BallSpec& ball,
                                           int grid_n, std::int64_t budget_per_line, int rungs = 4,
                                           const TraceOptions& base = {}, unsigned threads = 1);

// Confinement predicates for the excluded families, checked on every traced point.
struct ConfinementReport {
    LineClass kind = LineClass::oblique;
    std::int64_t points = 0;
    std::int64_t violations = 0;
    double worst = 0.0;  // largest violation of the predicate
    bool applicable = false;
};

// horizontal: |f| <= exp(exp(p3)); plane x1 = p1 (p1 in pi Z): f1 = 0; plane x2 = p2
// (p2 in pi Z): f2 = 0; diagonal plane through a point with p1 = +-p2 in pi Z: f2 = +-f1.
ConfinementReport check_confinement(const LineSpec& line, const TraceOptions& options);

}  // namespace zorichlab
