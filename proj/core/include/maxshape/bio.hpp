#pragma once

#include "maxshape/quadrature.hpp"
#include "maxshape/surfcalc.hpp"

#include <string>
#include <vector>

namespace maxshape {

// Linear map between Helmholtz densities: rows [P; Q] of the image, columns
// [p; q] of the argument, each of size (L+1)^2 - 1.
struct OperatorBlock {
    std::string name;
    int L = 0;
    double kappa = 0.0;
    CMatX mat;

    int n() const { return static_cast<int>(mat.rows() / 2); }
    CMatX block(int row, int col) const { return mat.block(row * n(), col * n(), n(), n()); }
    HelmholtzDensity apply(const HelmholtzDensity& j) const;
};

// Node values of the single-layer type integrals of every basis density,
// computed with the rotated singular rule.
struct IntegralRequest {
    double kappa = 0.0;
    bool vector = true;      // V j for j = grad Y_c, curl Y_c
    bool magnetic = false;   // n x sum(j x grad G) and the normal derivative of V
};

struct SurfaceIntegrals {
    std::vector<IntegralRequest> req;
    std::vector<CMatX> VJ;   // 3N x 2(nsh-1), row a*N + i
    std::vector<CMatX> MJ;   // 3N x 2(nsh-1)
    std::vector<CMatX> VS;   // N x nsh, V Y_c
    std::vector<CMatX> KS;   // N x nsh, (d/dn_x) V Y_c
};

SurfaceIntegrals on_surface_integrals(const Surface& S, const std::vector<IntegralRequest>& req);

// Operators built from precomputed integrals; Lam = laplace_matrix(S).
OperatorBlock block_C(const Surface& S, double kappa, const CMatX& VJ, const CMatX& VS, const MatX& Lam);
OperatorBlock block_M(const Surface& S, double kappa, const CMatX& VJ, const CMatX& MJ,
                      const CMatX& KS, const MatX& Lam);
OperatorBlock block_C0star(const Surface& S, const CMatX& VJ, const CMatX& VS, const MatX& Lam);

OperatorBlock assemble_C(const Surface& S, double kappa);
OperatorBlock assemble_M(const Surface& S, double kappa);
OperatorBlock assemble_C0star(const Surface& S);

struct BoundaryOperators {
    OperatorBlock Ci, Mi, Ce, Me, C0s;
};
BoundaryOperators assemble_operators(const Surface& S, const Material& mat);

// Coefficient-space helpers.
CMatX solve_stiffness(const Surface& S, const CMatX& B);
CMatX normal_dot(const Surface& S, const CMatX& W);         // N x m from 3N x m
CMatX cross_normal(const Surface& S, const CMatX& W);       // n x W, 3N x m

// V_kappa applied to a scalar density given by full SH coefficients.
CVecX single_layer_on_surface(const Surface& S, double kappa, const CVecX& coeffs);

// Surface resampled on a finer grid for smooth off-surface quadrature.
struct SurfaceSample {
    MatX X, N;
    MatX u;
    VecX wJ;
    MatX G[3], R[3];
    MatX Y;
    std::vector<Mat3> M;
    int size() const { return static_cast<int>(wJ.size()); }
};
SurfaceSample sample_surface(const Surface& S, int nquad);
// sample at given S^2 points with quadrature weights on S^2
SurfaceSample sample_surface_points(const Surface& S, const MatX& u, const VecX& w);
// graded polar rule centred at the surface point closest to x
SurfaceSample sample_near(const Surface& S, const Vec3& x);
// parameter of the closest surface point and its distance
Vec3 closest_parameter(const Surface& S, const Vec3& x, double& dist);
int default_oversampling(const Surface& S);

// Densities on a sample: tangential field (rows) and surface divergence.
VectorField sample_density(const SurfaceSample& s, const HelmholtzDensity& j);
CVecX sample_divergence(const Surface& S, const SurfaceSample& s, const HelmholtzDensity& j);

// Throws TargetOnSurface when a target is closer than tol to the surface.
// true if the smooth rule of s is not accurate at x
bool near_surface(const SurfaceSample& s, const Vec3& x);

void check_targets(const Surface& S, const MatX& targets, double tol = 1e-10);

// Off-surface potentials at the rows of targets (nt x 3).
CVecX single_layer(const Surface& S, double kappa, const CVecX& coeffs, const MatX& targets);
CMatX electric_potential(const Surface& S, double kappa, const HelmholtzDensity& j, const MatX& targets);
CMatX magnetic_potential(const Surface& S, double kappa, const HelmholtzDensity& j, const MatX& targets);
CMatX electric_potential(const Surface& S, const SurfaceSample& s, double kappa,
                         const HelmholtzDensity& j, const MatX& targets);
CMatX magnetic_potential(const Surface& S, const SurfaceSample& s, double kappa,
                         const HelmholtzDensity& j, const MatX& targets);

// Far-field patterns of the potentials at unit directions (rows).
struct FarFieldPair {
    CMatX E, M;
};
FarFieldPair far_field_operators(const Surface& S, double kappa, const HelmholtzDensity& j,
                                 const MatX& directions);

}  // namespace maxshape
