#include "zorich/io.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "zorich/errors.hpp"

namespace zorichlab {

namespace {

std::string hex(const unsigned char* data, unsigned len) {
    std::ostringstream s;
    s << std::hex << std::setfill('0');
    for (unsigned i = 0; i < len; ++i) s << std::setw(2) << static_cast<int>(data[i]);
    return s.str();
}

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw NumericError("sha256 init failed");
    }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(const char* p, std::size_t n) { EVP_DigestUpdate(ctx_, p, n); }
    std::string final() {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned len = 0;
        EVP_DigestFinal_ex(ctx_, md, &len);
        return hex(md, len);
    }

private:
    EVP_MD_CTX* ctx_;
};

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

}  // namespace

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open " + path.string() + " for writing");
    out << std::setprecision(17);
    return out;
}

void write_coverage_csv(const std::filesystem::path& path, const std::vector<CoverageSample>& series) {
    auto out = open_output(path);
    out << "# points_consumed: traced points in the box (count); coverage: occupied/eligible voxels; "
           "cap_hit_fraction: depth-capped leaves/in-box leaves\n";
    out << "points_consumed,coverage,cap_hit_fraction\n";
    for (const auto& s : series) out << s.points_consumed << ',' << s.coverage << ',' << s.cap_hit_fraction << '\n';
}

void write_density_csv(const std::filesystem::path& path, const std::vector<DensityRecord>& records) {
    auto out = open_output(path);
    out << "# delta: patch half-width (Y coordinates); grid_n: samples per axis; valid_points, hits: counts; "
           "fraction: hits/valid_points\n";
    out << "delta,grid_n,valid_points,hits,fraction\n";
    for (const auto& r : records)
        out << r.delta << ',' << r.grid_n << ',' << r.valid_points << ',' << r.hits << ',' << r.fraction << '\n';
}

PointCloudWriter::PointCloudWriter(const std::filesystem::path& path) : out_(open_output(path)) {
    out_ << "# x y z (one point of f along the line per row)\n";
}

void PointCloudWriter::add(const Point3& p) {
    out_ << p.x1 << ' ' << p.x2 << ' ' << p.x3 << '\n';
    ++count_;
}

void write_point_cloud(const std::filesystem::path& path, const std::vector<Point3>& points) {
    PointCloudWriter w(path);
    for (const auto& p : points) w.add(p);
}

std::vector<Triangle> cone_mesh(const ConeSurface& cone, double x3_max, int n) {
    if (n < 1) throw DomainError("cone_mesh: n must be >= 1");
    const double t = std::fabs(cone.level);
    if (!(x3_max > std::log(t))) throw DomainError("cone_mesh: x3_max must lie above the vertex");
    // the square max(|p1|,|p2|) <= m is the part below x3_max
    const double m = std::acos(t * std::exp(-x3_max));
    const double step = 2 * m / n;
    std::vector<Triangle> tris;
    tris.reserve(static_cast<std::size_t>(2 * n * n));
    auto at = [&](int a, int b) { return cone_point(cone, {-m + a * step, -m + b * step}); };
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const Point3 p00 = at(a, b), p10 = at(a + 1, b), p01 = at(a, b + 1), p11 = at(a + 1, b + 1);
            tris.push_back({p00, p10, p11});
            tris.push_back({p00, p11, p01});
        }
    }
    return tris;
}

void write_triangle_soup(const std::filesystem::path& path, const std::vector<Triangle>& tris) {
    auto out = open_output(path);
    out << "# ax ay az bx by bz cx cy cz (one triangle per row)\n";
    for (const auto& t : tris) {
        for (int k = 0; k < 3; ++k) {
            out << t[k].x1 << ' ' << t[k].x2 << ' ' << t[k].x3 << (k == 2 ? '\n' : ' ');
        }
    }
}

std::string sha256_hex(const std::string& bytes) {
    Sha256 h;
    h.update(bytes.data(), bytes.size());
    return h.final();
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot read " + path.string());
    Sha256 h;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        h.update(buf, static_cast<std::size_t>(in.gcount()));
    }
    return h.final();
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["parameters"] = parameters;
    j["tool_version"] = kToolVersion;
    j["timestamp"] = timestamp.empty() ? utc_now() : timestamp;
    auto digests = [](const std::vector<std::filesystem::path>& files) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& f : files) a.push_back({{"path", f.filename().string()}, {"sha256", sha256_file(f)}});
        return a;
    };
    j["inputs"] = digests(inputs);
    j["outputs"] = digests(outputs);
    return j;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
    auto out = open_output(path);
    out << manifest.to_json().dump(2) << '\n';
}

}  // namespace zorichlab
