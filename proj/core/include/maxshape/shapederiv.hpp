#pragma once

#include "maxshape/solver.hpp"

#include <map>
#include <string>

namespace maxshape {

// On-surface integrals together with their derivatives along xi.
struct IntegralPair {
    SurfaceIntegrals base, d;
};
IntegralPair d_on_surface_integrals(const Surface& S, const DeformationField& xi,
                                    const std::vector<IntegralRequest>& req);

enum class DOp { C, M, PsiE, PsiM, FarE, FarM, C0star };

// Derivative of the matrix of an operator block along xi (C, M, C0star).
OperatorBlock d_operator(DOp which, const Surface& S, double kappa, const DeformationField& xi);
BoundaryOperators d_boundary_operators(const Surface& S, const Material& mat, const DeformationField& xi);

// Derivatives of the potentials and far field operators applied to a fixed
// density in Helmholtz coordinates.
CMatX d_electric_potential(const Surface& S, double kappa, const DeformationField& xi,
                           const HelmholtzDensity& j, const MatX& targets);
CMatX d_magnetic_potential(const Surface& S, double kappa, const DeformationField& xi,
                           const HelmholtzDensity& j, const MatX& targets);
FarFieldPair d_far_field_operators(const Surface& S, double kappa, const DeformationField& xi,
                                   const HelmholtzDensity& j, const MatX& directions);

// Derivative of the incident traces in Helmholtz coordinates.
IncidentTraces d_incident_traces(const Surface& S, const PlaneWave& wave, const DeformationField& xi);

struct TransmissionData {
    HelmholtzDensity gD, gN;
    VectorField gD_nodes, gN_nodes;
    double tangency_defect = 0.0;
};
TransmissionData transmission_rhs(const ScatteringSolution& sol, const DeformationField& xi);

struct DerivativeResult {
    char route = 'A';
    MatX directions;
    CMatX dfar;          // one row per direction
    MatX probes;
    CMatX dnear;         // one row per probe, dE^s outside and dE^i inside
    std::map<std::string, double> diagnostics;
};

DerivativeResult d_solution_routeA(const ScatteringSolution& sol, const DeformationField& xi,
                                   const MatX& directions, const MatX& probes = MatX());
DerivativeResult d_solution_routeB(const ScatteringSolution& sol, const DeformationField& xi,
                                   const MatX& directions, const MatX& probes = MatX());
DerivativeResult d_solution_routeC(const Surface& S, const Material& mat, const PlaneWave& wave,
                                   const DeformationField& xi, double h, const MatX& directions,
                                   const MatX& probes = MatX());

// Convenience forms that solve the scattering problem first.
DerivativeResult d_solution_routeA(const Surface& S, const Material& mat, const PlaneWave& wave,
                                   const DeformationField& xi, const MatX& directions,
                                   const MatX& probes = MatX());
DerivativeResult d_solution_routeB(const Surface& S, const Material& mat, const PlaneWave& wave,
                                   const DeformationField& xi, const MatX& directions,
                                   const MatX& probes = MatX());

// true if x lies inside the closed surface
bool inside_surface(const Surface& S, const Vec3& x);

}  // namespace maxshape
