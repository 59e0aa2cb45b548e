#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace maxshape::cli {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::string& where, std::set<std::string> allowed)
{
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

double number(const json& j, const std::string& where)
{
    if (!j.is_number()) throw ConfigError(where + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(where + " must be finite");
    return v;
}

double positive(const json& j, const std::string& where)
{
    const double v = number(j, where);
    if (!(v > 0.0)) throw ConfigError(where + " must be positive");
    return v;
}

int integer(const json& j, const std::string& where, int lo)
{
    if (!j.is_number_integer()) throw ConfigError(where + " must be an integer");
    const int v = j.get<int>();
    if (v < lo) throw ConfigError(where + " must be at least " + std::to_string(lo));
    return v;
}

Vec3 vec3(const json& j, const std::string& where)
{
    if (!j.is_array() || j.size() != 3) throw ConfigError(where + " must be an array of three numbers");
    return Vec3(number(j[0], where), number(j[1], where), number(j[2], where));
}

// complex components may be given as numbers or [re, im] pairs
CVec3 cvec3(const json& j, const std::string& where)
{
    if (!j.is_array() || j.size() != 3) throw ConfigError(where + " must be an array of three entries");
    CVec3 v;
    for (int a = 0; a < 3; ++a) {
        if (j[a].is_array()) {
            if (j[a].size() != 2) throw ConfigError(where + ": complex entries are [re, im]");
            v[a] = cplx(number(j[a][0], where), number(j[a][1], where));
        } else {
            v[a] = number(j[a], where);
        }
    }
    return v;
}

// map "n,m" -> value; returns the coefficient vector up to the largest degree
VecX sh_map(const json& j, const std::string& where, int& degree)
{
    if (!j.is_object()) throw ConfigError(where + " must map \"n,m\" to numbers");
    std::vector<std::tuple<int, int, double>> entries;
    degree = 0;
    for (const auto& [k, v] : j.items()) {
        int n = 0, m = 0;
        char comma = 0;
        std::istringstream is(k);
        if (!(is >> n >> comma >> m) || comma != ',' || !is.eof() || n < 0 || std::abs(m) > n)
            throw ConfigError(where + ": bad key '" + k + "', expected \"n,m\" with |m| <= n");
        entries.emplace_back(n, m, number(v, where + "[" + k + "]"));
        degree = std::max(degree, n);
    }
    VecX c = VecX::Zero(sh_count(degree));
    for (const auto& [n, m, v] : entries) c[sh_index(n, m)] = v;
    return c;
}

}  // namespace

RunConfig parse_config(const json& j)
{
    RunConfig c;
    c.source = j;
    only_keys(j, "config", {"surface", "material", "wave", "discretization", "deformation", "h", "directions",
                            "probes", "output"});

    if (j.contains("surface")) {
        const json& s = j["surface"];
        only_keys(s, "surface", {"type", "radius", "coefficients"});
        const std::string type = s.value("type", "sphere");
        if (type == "sphere") {
            c.sphere = true;
            if (s.contains("coefficients")) throw ConfigError("surface: a sphere takes a radius, not coefficients");
            if (s.contains("radius")) c.radius = positive(s["radius"], "surface.radius");
        } else if (type == "radial") {
            c.sphere = false;
            if (!s.contains("coefficients")) throw ConfigError("surface.coefficients is required for type radial");
            c.rho = sh_map(s["coefficients"], "surface.coefficients", c.rho_degree);
        } else {
            throw ConfigError("surface.type must be \"sphere\" or \"radial\"");
        }
    }

    if (j.contains("material")) {
        const json& m = j["material"];
        only_keys(m, "material", {"eps_i", "eps_e", "mu_i", "mu_e", "omega", "eta"});
        Material& t = c.material;
        if (m.contains("eps_i")) t.eps_i = positive(m["eps_i"], "material.eps_i");
        if (m.contains("eps_e")) t.eps_e = positive(m["eps_e"], "material.eps_e");
        if (m.contains("mu_i")) t.mu_i = positive(m["mu_i"], "material.mu_i");
        if (m.contains("mu_e")) t.mu_e = positive(m["mu_e"], "material.mu_e");
        if (m.contains("omega")) t.omega = positive(m["omega"], "material.omega");
        if (m.contains("eta")) t.eta = positive(m["eta"], "material.eta");
    }

    if (j.contains("wave")) {
        const json& w = j["wave"];
        only_keys(w, "wave", {"direction", "polarization"});
        if (w.contains("direction")) c.direction = vec3(w["direction"], "wave.direction");
        if (w.contains("polarization")) c.polarization = cvec3(w["polarization"], "wave.polarization");
    }
    if (std::abs(c.direction.norm() - 1.0) > 1e-12) throw ConfigError("wave.direction must be a unit vector");
    if (std::abs(dotu(c.polarization, c.direction)) > 1e-12)
        throw ConfigError("wave.polarization must be orthogonal to the direction");
    if (c.polarization.norm() == 0.0) throw ConfigError("wave.polarization must be nonzero");

    if (j.contains("discretization")) {
        const json& d = j["discretization"];
        only_keys(d, "discretization", {"L", "nquad", "N_mie"});
        if (d.contains("L")) c.L = integer(d["L"], "discretization.L", 1);
        c.nquad = d.contains("nquad") ? integer(d["nquad"], "discretization.nquad", 1) : 2 * c.L + 2;
        if (d.contains("N_mie")) c.n_mie = integer(d["N_mie"], "discretization.N_mie", 1);
    }
    if (c.nquad < 2 * c.L + 2) throw ConfigError("discretization.nquad must be at least 2L+2");

    if (j.contains("deformation")) {
        const json& x = j["deformation"];
        if (x.is_string()) {
            const std::string s = x.get<std::string>();
            if (s == "radial") {
                c.xi_kind = "radial";
            } else if (s.rfind("translation:", 0) == 0) {
                c.xi_kind = "translation";
                std::istringstream is(s.substr(12));
                char c1 = 0, c2 = 0;
                if (!(is >> c.translation[0] >> c1 >> c.translation[1] >> c2 >> c.translation[2]) || c1 != ',' ||
                    c2 != ',' || !is.eof())
                    throw ConfigError("deformation: expected \"translation:dx,dy,dz\"");
            } else {
                throw ConfigError("deformation must be \"radial\", \"translation:dx,dy,dz\" or a coefficient object");
            }
        } else {
            only_keys(x, "deformation", {"x", "y", "z", "scale"});
            c.xi_kind = "coefficients";
            int deg[3] = {0, 0, 0};
            const char* names[3] = {"x", "y", "z"};
            for (int a = 0; a < 3; ++a)
                c.xi_coeffs[a] = x.contains(names[a])
                                     ? sh_map(x[names[a]], std::string("deformation.") + names[a], deg[a])
                                     : VecX::Zero(1);
            c.xi_degree = std::max({deg[0], deg[1], deg[2]});
            for (auto& v : c.xi_coeffs) {
                VecX p = VecX::Zero(sh_count(c.xi_degree));
                p.head(v.size()) = v;
                v = p;
            }
        }
        if (x.is_object() && x.contains("scale")) c.xi_scale = number(x["scale"], "deformation.scale");
    }

    if (j.contains("h")) c.h = positive(j["h"], "h");
    if (j.contains("directions")) c.direction_degree = integer(j["directions"], "directions", 1);
    if (j.contains("probes")) {
        const json& p = j["probes"];
        if (!p.is_array()) throw ConfigError("probes must be an array of points");
        c.probes.resize(p.size(), 3);
        for (size_t k = 0; k < p.size(); ++k) c.probes.row(k) = vec3(p[k], "probes").transpose();
    }
    if (j.contains("output")) {
        if (!j["output"].is_string() || j["output"].get<std::string>().empty())
            throw ConfigError("output must be a non-empty path");
        c.output = j["output"].get<std::string>();
    }
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

Surface RunConfig::surface() const
{
    auto g = make_grid(L, nquad);
    if (sphere) return build_sphere(g, radius);
    return build_surface(g, rho_degree, rho);
}

PlaneWave RunConfig::wave() const { return PlaneWave::make(direction, polarization, material.kappa_e()); }

std::optional<DeformationField> RunConfig::deformation(const Surface& S) const
{
    if (xi_kind == "radial") return DeformationField::position(S.shape) * xi_scale;
    if (xi_kind == "translation") return DeformationField::constant(translation) * xi_scale;
    if (xi_kind == "coefficients") return DeformationField::coefficients(xi_degree, xi_coeffs) * xi_scale;
    return std::nullopt;
}

GridPtr RunConfig::direction_grid() const { return make_grid(direction_degree, 2 * direction_degree + 2); }

}  // namespace maxshape::cli
