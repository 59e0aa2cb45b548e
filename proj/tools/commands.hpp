#pragma once

#include "config.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace maxshape::cli {

// Each command writes its files below cfg.output and returns the summary,
// which is also written as summary.json.
nlohmann::json run_solve(const RunConfig& cfg);
nlohmann::json run_dsolve(const RunConfig& cfg, const std::vector<char>& routes);
nlohmann::json run_mie(const RunConfig& cfg);
// "passed" is false if any property fails
nlohmann::json run_validate(const RunConfig& cfg, const std::string& suite);

// relative L2 difference over a Gauss-Legendre direction grid
double rel_l2(const ReferenceGrid& dirs, const CMatX& a, const CMatX& b);

}  // namespace maxshape::cli
