#pragma once

#include "maxshape/types.hpp"

#include <json.hpp>

#include <string>

namespace maxshape::cli {

// theta, phi, Re/Im of the three Cartesian components, one row per direction
void write_direction_table(const std::string& path, const MatX& directions, const CMatX& values);
// x, y, z, region, Re/Im of the three components
void write_probe_table(const std::string& path, const MatX& probes, const std::vector<bool>& inside,
                       const CMatX& values);
void write_json(const std::string& path, const nlohmann::json& j);
std::string output_file(const std::string& dir, const std::string& name);

}  // namespace maxshape::cli
