#pragma once

#include "maxshape/bio.hpp"

namespace maxshape {

// E_inc(x) = p exp(i kappa d.x)
struct PlaneWave {
    Vec3 d = Vec3::UnitZ();
    CVec3 p = CVec3(1.0, 0.0, 0.0);
    double kappa = 1.0;

    static PlaneWave make(const Vec3& d, const CVec3& p, double kappa);
    void validate() const;
    CVec3 E(const Vec3& x) const;
    CVec3 curlE(const Vec3& x) const;
};

// gamma_D = n x E and gamma_N = n x curl E / kappa in Helmholtz coordinates
struct IncidentTraces {
    HelmholtzDensity dirichlet, neumann;
};
IncidentTraces incident_traces(const Surface& S, const PlaneWave& wave);

// L_e, N_e and the system operator built from assembled blocks
struct SystemOperators {
    CMatX Le, Ne, S;
};
SystemOperators combine_operators(const BoundaryOperators& B, const Material& mat);
OperatorBlock assemble_S(const Surface& S, const Material& mat);

struct ScatteringSolution {
    Surface surface;
    Material material;
    PlaneWave wave;
    BoundaryOperators ops;
    SystemOperators sys;
    Eigen::PartialPivLU<CMatX> lu;
    IncidentTraces inc;
    HelmholtzDensity j;
    HelmholtzDensity uD, uN;   // exterior total traces gamma_D E, gamma_N E
    double residual = 0.0;
    double condition = 0.0;

    // dense solve with the factored system, residual checked
    CVecX solve_system(const CVecX& rhs) const;
};

ScatteringSolution solve(const Surface& S, const Material& mat, const PlaneWave& wave);

// far field on the given directions, one row per direction
CMatX far_field(const ScatteringSolution& sol, const MatX& directions);
CMatX scattered_field(const ScatteringSolution& sol, const MatX& targets);
CMatX interior_field(const ScatteringSolution& sol, const MatX& targets);
// far field of the layer ansatz for an arbitrary density on the solution's surface
CMatX far_field_of_density(const ScatteringSolution& sol, const HelmholtzDensity& j, const MatX& directions);

}  // namespace maxshape
