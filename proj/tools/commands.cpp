#include "commands.hpp"

#include "output.hpp"

#include "maxshape/oracle.hpp"

#include <cmath>

namespace maxshape::cli {

using nlohmann::json;

double rel_l2(const ReferenceGrid& dirs, const CMatX& a, const CMatX& b)
{
    const VecX& w = dirs.weights;
    const double num = (w.array() * (a - b).rowwise().squaredNorm().array()).sum();
    const double den = (w.array() * b.rowwise().squaredNorm().array()).sum();
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

namespace {

double l2(const ReferenceGrid& dirs, const CMatX& a)
{
    return std::sqrt((dirs.weights.array() * a.rowwise().squaredNorm().array()).sum());
}

json config_echo(const RunConfig& cfg)
{
    json j;
    j["L"] = cfg.L;
    j["nquad"] = cfg.nquad;
    j["kappa_i"] = cfg.material.kappa_i();
    j["kappa_e"] = cfg.material.kappa_e();
    j["eta"] = cfg.material.eta;
    j["directions"] = cfg.direction_degree;
    return j;
}

std::vector<bool> classify(const Surface& S, const MatX& probes)
{
    std::vector<bool> in(probes.rows());
    for (int r = 0; r < probes.rows(); ++r) in[r] = inside_surface(S, probes.row(r).transpose());
    return in;
}

CMatX near_field(const ScatteringSolution& sol, const MatX& probes, const std::vector<bool>& in)
{
    CMatX out(probes.rows(), 3);
    for (int r = 0; r < probes.rows(); ++r) {
        const MatX p = probes.row(r);
        out.row(r) = in[r] ? interior_field(sol, p).row(0) : scattered_field(sol, p).row(0);
    }
    return out;
}

}  // namespace

json run_solve(const RunConfig& cfg)
{
    const Surface S = cfg.surface();
    const PlaneWave w = cfg.wave();
    const ScatteringSolution sol = solve(S, cfg.material, w);
    const GridPtr dirs = cfg.direction_grid();
    const CMatX F = far_field(sol, dirs->nodes);
    write_direction_table(output_file(cfg.output, "far_field.csv"), dirs->nodes, F);

    json s;
    s["command"] = "solve";
    s["config"] = config_echo(cfg);
    s["unknowns"] = sol.j.stacked().size();
    s["residual"] = sol.residual;
    s["condition"] = sol.condition;
    s["far_field_l2"] = l2(*dirs, F);
    if (cfg.sphere) {
        const CMatX ref = mie_far_field(cfg.radius, cfg.material, w, dirs->nodes, cfg.n_mie);
        s["mie_error"] = rel_l2(*dirs, F, ref);
    }
    if (cfg.probes.rows() > 0) {
        const std::vector<bool> in = classify(S, cfg.probes);
        write_probe_table(output_file(cfg.output, "near_field.csv"), cfg.probes, in, near_field(sol, cfg.probes, in));
    }
    write_json(output_file(cfg.output, "summary_" + s["command"].get<std::string>() + ".json"), s);
    return s;
}

json run_dsolve(const RunConfig& cfg, const std::vector<char>& routes)
{
    if (routes.empty()) throw ConfigError("no routes requested");
    const Surface S = cfg.surface();
    const auto xi = cfg.deformation(S);
    if (!xi) throw ConfigError("dsolve needs a deformation");
    const PlaneWave w = cfg.wave();
    const GridPtr dirs = cfg.direction_grid();
    const ScatteringSolution sol = solve(S, cfg.material, w);

    json s;
    s["command"] = "dsolve";
    s["config"] = config_echo(cfg);
    s["h"] = cfg.h;
    std::map<char, CMatX> far;
    std::vector<bool> in;
    if (cfg.probes.rows() > 0) in = classify(S, cfg.probes);
    for (char r : routes) {
        DerivativeResult d;
        if (r == 'A') d = d_solution_routeA(sol, *xi, dirs->nodes, cfg.probes);
        else if (r == 'B') d = d_solution_routeB(sol, *xi, dirs->nodes, cfg.probes);
        else d = d_solution_routeC(S, cfg.material, w, *xi, cfg.h, dirs->nodes, cfg.probes);
        far[r] = d.dfar;
        const std::string tag(1, r);
        write_direction_table(output_file(cfg.output, "dfar_" + tag + ".csv"), dirs->nodes, d.dfar);
        if (cfg.probes.rows() > 0)
            write_probe_table(output_file(cfg.output, "dnear_" + tag + ".csv"), cfg.probes, in, d.dnear);
        json diag;
        for (const auto& [k, v] : d.diagnostics)
            if (k != "seconds") diag[k] = v;   // timings would break reproducible output
        diag["dfar_l2"] = l2(*dirs, d.dfar);
        s["routes"][tag] = diag;
    }
    for (auto a = far.begin(); a != far.end(); ++a)
        for (auto b = std::next(a); b != far.end(); ++b)
            s["differences"][std::string(1, a->first) + "-" + std::string(1, b->first)] =
                rel_l2(*dirs, a->second, b->second);
    if (cfg.sphere && cfg.xi_kind == "radial") {
        // xi = scale x moves the radius at rate scale * a
        const CMatX ref =
            cfg.xi_scale * cfg.radius * mie_radius_derivative(cfg.radius, cfg.material, w, dirs->nodes, 1e-3 * cfg.radius, cfg.n_mie);
        for (const auto& [r, F] : far) s["mie_error"][std::string(1, r)] = rel_l2(*dirs, F, ref);
    }
    write_json(output_file(cfg.output, "summary_" + s["command"].get<std::string>() + ".json"), s);
    return s;
}

json run_mie(const RunConfig& cfg)
{
    if (!cfg.sphere) throw ConfigError("mie needs a spherical surface");
    const PlaneWave w = cfg.wave();
    const GridPtr dirs = cfg.direction_grid();
    const MieCoefficients c = mie_coefficients(cfg.radius, cfg.material, cfg.n_mie);
    const CMatX F = mie_far_field(cfg.radius, cfg.material, w, dirs->nodes, cfg.n_mie);
    const CMatX dF = mie_radius_derivative(cfg.radius, cfg.material, w, dirs->nodes, 1e-3 * cfg.radius, cfg.n_mie);
    write_direction_table(output_file(cfg.output, "mie_far_field.csv"), dirs->nodes, F);
    write_direction_table(output_file(cfg.output, "mie_radius_derivative.csv"), dirs->nodes, dF);
    json s;
    s["command"] = "mie";
    s["config"] = config_echo(cfg);
    s["terms"] = c.a.size();
    s["far_field_l2"] = l2(*dirs, F);
    // the scattering cross section is the far field energy over (4 pi)^2
    s["scattering_cross_section"] = l2(*dirs, F) * l2(*dirs, F) / (16 * pi * pi) / w.p.squaredNorm();
    s["radius_derivative_l2"] = l2(*dirs, dF);
    write_json(output_file(cfg.output, "summary_" + s["command"].get<std::string>() + ".json"), s);
    return s;
}

}  // namespace maxshape::cli
