#pragma once

#include "maxshape/shapederiv.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace maxshape::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // surface: a sphere of given radius or radial SH coefficients
    bool sphere = true;
    double radius = 1.0;
    int rho_degree = 0;
    VecX rho;

    Material material;
    Vec3 direction = Vec3::UnitZ();
    CVec3 polarization = CVec3(1.0, 0.0, 0.0);

    int L = 12;
    int nquad = 26;
    int n_mie = 0;

    // deformation: "radial", "translation" or SH coefficients per component
    std::string xi_kind = "none";
    Vec3 translation = Vec3::Zero();
    int xi_degree = 0;
    std::array<VecX, 3> xi_coeffs;
    double xi_scale = 1.0;

    double h = 1e-3;
    int direction_degree = 8;
    MatX probes = MatX(0, 3);
    std::string output = "maxshape_out";

    nlohmann::json source;

    Surface surface() const;
    PlaneWave wave() const;
    std::optional<DeformationField> deformation(const Surface& S) const;
    // Gauss-Legendre direction grid of the configured degree
    GridPtr direction_grid() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

}  // namespace maxshape::cli
