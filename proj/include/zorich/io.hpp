#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "zorich/density.hpp"
#include "zorich/preimage_geometry.hpp"

namespace zorichlab {

inline constexpr const char* kToolVersion = "0.1.0";

// Every file starts with a "# ..." line describing the columns and units; CSV files
// then carry the column row.
void write_coverage_csv(const std::filesystem::path& path, const std::vector<CoverageSample>& series);
void write_density_csv(const std::filesystem::path& path, const std::vector<DensityRecord>& records);

// "x y z" per line.
class PointCloudWriter {
public:
    explicit PointCloudWriter(const std::filesystem::path& path);
    void add(const Point3& p);
    std::int64_t count() const noexcept { return count_; }

private:
    std::ofstream out_;
    std::int64_t count_ = 0;
};

void write_point_cloud(const std::filesystem::path& path, const std::vector<Point3>& points);

using Triangle = std::array<Point3, 3>;

// Triangulated piece of the cone below height x3_max, n x n cells over the
// horizontal square it occupies.
std::vector<Triangle> cone_mesh(const ConeSurface& cone, double x3_max, int n);

// Nine reals per line: the three corners of one triangle.
void write_triangle_soup(const std::filesystem::path& path, const std::vector<Triangle>& tris);

// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

struct RunManifest {
    std::string command;
    nlohmann::json parameters = nlohmann::json::object();
    std::string timestamp;  // filled by write_manifest when empty
    std::vector<std::filesystem::path> inputs;
    std::vector<std::filesystem::path> outputs;

    nlohmann::json to_json() const;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

// Throws DomainError when the file cannot be opened.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace zorichlab
