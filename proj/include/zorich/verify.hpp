#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "zorich/density.hpp"

namespace zorichlab {

enum class VerifyLevel { quick, full };

struct CheckRecord {
    std::string name;
    std::string anchor;  // the statement being checked, in words
    double value = 0.0;
    double bound = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double seconds = 0.0;
    std::string note;
};

struct VerificationReport {
    VerifyLevel level = VerifyLevel::quick;
    std::vector<CheckRecord> checks;

    bool pass() const noexcept;
    const CheckRecord* find(const std::string& name) const noexcept;
};

// Sample counts of the full level; quick divides by 10 (and runs fewer density lines).
struct CheckSizes {
    std::int64_t norm_samples = 100000;
    std::int64_t automorphy_samples = 10000;
    std::int64_t inverse_samples = 10000;  // per parity
    std::int64_t cone_samples = 10000;
    std::int64_t boundary_samples = 10000;
    std::int64_t constant_a_samples = 1000;
    std::int64_t area_ratio_samples = 200;
    std::int64_t projection_samples = 10000;
    int slabs = 50;
    int face_configs = 10;
    std::int64_t strip_rays = 1000;
    int transport_configs = 20;
    int coverage_lines = 5;
    std::int64_t coverage_budget = 10000000;
    std::int64_t excluded_budget = 10000000;
    int base_sequence_scan = 1000000;

    static CheckSizes for_level(VerifyLevel level);
};

struct VerifyOptions {
    VerifyLevel level = VerifyLevel::quick;
    unsigned threads = 0;  // 0: hardware concurrency
    // multiplies the slab bound; anything but 1 is a deliberate mutation
    double slab_bound_scale = 1.0;
    std::function<void(const CheckRecord&)> progress;
};

// Experiment thresholds, fixed from pilot runs.
inline constexpr double kCoverageThreshold = 0.95;
inline constexpr double kDensityFractionFloor = 0.01;

// Lines through the origin crossing the face x1 = +1 of Y at fixed-seed
// u2 in (0.05, 0.95), u3 in [1.2e-4, 2e-4].
std::vector<LineSpec> coverage_lines(int count, std::uint64_t seed = 2024);
TraceOptions coverage_trace_options(std::int64_t budget);

// The epsilon-density configuration.
struct DensityExperiment {
    std::int64_t ball_index = 2000;
    PatchSpec patch{{YFace::x1_pos, 0.3137, 0.1}, 0.02};
    int grid_n = 16;
    std::int64_t budget_per_line = 100000;
    int rungs = 4;
};

// Every check; each returns one or more records. sizes come from CheckSizes.
std::vector<CheckRecord> check_norm_law(const CheckSizes& sizes);
std::vector<CheckRecord> check_automorphy(const CheckSizes& sizes);
std::vector<CheckRecord> check_inverse_branches(const CheckSizes& sizes);
std::vector<CheckRecord> check_cones(const CheckSizes& sizes);
std::vector<CheckRecord> check_boundary_distance(const CheckSizes& sizes);
std::vector<CheckRecord> check_constant_a(const CheckSizes& sizes);
std::vector<CheckRecord> check_preimage_disks(const CheckSizes& sizes);
std::vector<CheckRecord> check_area_ratio(const CheckSizes& sizes);
std::vector<CheckRecord> check_projection(const CheckSizes& sizes);
std::vector<CheckRecord> check_slabs(const CheckSizes& sizes, unsigned threads, double bound_scale = 1.0);
std::vector<CheckRecord> check_face_distortion(const CheckSizes& sizes);
std::vector<CheckRecord> check_strip_intersection(const CheckSizes& sizes);
std::vector<CheckRecord> check_area_transport(const CheckSizes& sizes, unsigned threads);
std::vector<CheckRecord> check_parametrization(const CheckSizes& sizes);
std::vector<CheckRecord> check_coverage(const CheckSizes& sizes, unsigned threads);
std::vector<CheckRecord> check_epsilon_density(const DensityExperiment& experiment, unsigned threads);

VerificationReport run_verification(const VerifyOptions& options);

// One record per line: key=value fields, strings quoted.
void write_report(std::ostream& out, const VerificationReport& report);

}  // namespace zorichlab
