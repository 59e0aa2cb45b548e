#include "output.hpp"

#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace maxshape::cli {

namespace {

FILE* open_or_throw(const std::string& path)
{
    FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw ConfigError("cannot write " + path);
    return f;
}

}  // namespace

std::string output_file(const std::string& dir, const std::string& name)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
    return (std::filesystem::path(dir) / name).string();
}

void write_direction_table(const std::string& path, const MatX& directions, const CMatX& values)
{
    FILE* f = open_or_throw(path);
    std::fprintf(f, "theta,phi,re_x,im_x,re_y,im_y,re_z,im_z\n");
    for (int r = 0; r < directions.rows(); ++r) {
        const Vec3 x = directions.row(r).transpose().normalized();
        const double theta = std::acos(std::clamp(x.z(), -1.0, 1.0));
        double phi = std::atan2(x.y(), x.x());
        if (phi < 0.0) phi += 2 * pi;
        std::fprintf(f, "%.17g,%.17g", theta, phi);
        for (int a = 0; a < 3; ++a) std::fprintf(f, ",%.17g,%.17g", values(r, a).real(), values(r, a).imag());
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

void write_probe_table(const std::string& path, const MatX& probes, const std::vector<bool>& inside,
                       const CMatX& values)
{
    FILE* f = open_or_throw(path);
    std::fprintf(f, "x,y,z,region,re_x,im_x,re_y,im_y,re_z,im_z\n");
    for (int r = 0; r < probes.rows(); ++r) {
        std::fprintf(f, "%.17g,%.17g,%.17g,%s", probes(r, 0), probes(r, 1), probes(r, 2),
                     inside[r] ? "interior" : "exterior");
        for (int a = 0; a < 3; ++a) std::fprintf(f, ",%.17g,%.17g", values(r, a).real(), values(r, a).imag());
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

void write_json(const std::string& path, const nlohmann::json& j)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace maxshape::cli
