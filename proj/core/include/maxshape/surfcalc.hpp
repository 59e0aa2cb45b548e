#pragma once

#include "maxshape/geometry.hpp"

#include <variant>

namespace maxshape {

// Tangential density j = grad_G p + curl_G q stored by the SH coefficients of
// p and q for degrees 1..L (entry sh_index(n, m) - 1).
struct HelmholtzDensity {
    int L = 0;
    CVecX p, q;

    static HelmholtzDensity zero(int L);
    int size() const { return static_cast<int>(p.size()); }
    CVecX stacked() const;
    static HelmholtzDensity from_stacked(int L, const CVecX& v);
};

// Coefficient helpers: full vectors carry the degree 0 entry in front.
CVecX pad_mean(const CVecX& c);
CVecX drop_mean(const CVecX& c);

VectorField grad_from_coeffs(const Surface& S, const CVecX& c);
VectorField curl_from_coeffs(const Surface& S, const CVecX& c);
VectorField density_field(const Surface& S, const HelmholtzDensity& j);

// weak forms against every Y_c
CVecX weak_div(const Surface& S, const VectorField& w);    // <J div(pi w), Y_c>
CVecX weak_curl(const Surface& S, const VectorField& w);   // <J curl w, Y_c>
CVecX weak_mass(const Surface& S, const ScalarField& g);   // <J g, Y_c>

// Solve A x = b on degrees >= 1; the degree 0 entry of x is zero.
CVecX solve_stiffness(const Surface& S, const CVecX& b);
// SH coefficients of Delta_G p, p given as a full coefficient vector.
CVecX laplace_coeffs(const Surface& S, const CVecX& p);
MatX laplace_matrix(const Surface& S);

VectorField surface_gradient(const Surface& S, const ScalarField& u);
ScalarField surface_divergence(const Surface& S, const VectorField& w);
ScalarField surface_scalar_curl(const Surface& S, const VectorField& w);
VectorField tangential_vector_curl(const Surface& S, const ScalarField& u);
ScalarField laplace_beltrami(const Surface& S, const ScalarField& u);
ScalarField laplace_beltrami_inverse(const Surface& S, const ScalarField& f);
HelmholtzDensity helmholtz_decompose(const Surface& S, const VectorField& j);

// Density transport between Gamma_r and Gamma in Helmholtz coordinates.
HelmholtzDensity helmholtz_pullback(const Surface& surface_r, const VectorField& j_r);
VectorField helmholtz_pullback_inverse(const Surface& surface_r, const HelmholtzDensity& j);

enum class SurfaceOp { gradient, divergence, vector_curl, scalar_curl };
using AnyField = std::variant<ScalarField, VectorField>;

// Pointwise operators at the nodes; scalar inputs are read through their SH
// expansion, vector inputs component by component.
AnyField surface_operator(const Surface& S, SurfaceOp which, const AnyField& u);

// First derivatives with respect to the deformation xi at r = 0.
RealVectorField d_normal(const Surface& S, const DeformationField& xi);
VecX d_jacobian(const Surface& S, const DeformationField& xi);
AnyField d_surface_operator(const Surface& S, const DeformationField& xi, SurfaceOp which,
                            const AnyField& u);

// R* and D* in weak form: coefficients of the images against Y_c.
CVecX rstar_apply(const Surface& S, const VectorField& w);
CVecX d_rstar(const Surface& S, const DeformationField& xi, const VectorField& w);
CVecX dstar_apply(const Surface& S, const VectorField& w);
CVecX d_dstar(const Surface& S, const DeformationField& xi, const VectorField& w);

// Same, with the deformation already tabulated.
CVecX d_rstar(const Surface& S, const DeformationNodes& d, const VectorField& w);
CVecX d_dstar(const Surface& S, const DeformationNodes& d, const VectorField& w);

// Derivative of the stiffness matrix A.
MatX d_stiffness(const Surface& S, const DeformationNodes& d);

// (L*)^{-1} f and its derivative, L* = J Delta_G; f must have zero mean on S^2.
// Results are full coefficient vectors.
CVecX lstar_inverse(const Surface& S, const ScalarField& f);
CVecX d_laplace_inverse(const Surface& S, const DeformationField& xi, const ScalarField& f);

// Pointwise derivative formulas: derivative of a surface gradient gu, and of a
// surface vector curl ru, at a point with surface gradient Gxi of xi.
CVec3 d_grad_point(const Mat3& Gxi, const Vec3& N, const CVec3& gu);
CVec3 d_curl_point(const Mat3& Gxi, double div, const CVec3& ru);

// Same formulas with tabulated deformation, applied to coefficient fields.
VectorField d_gradient_coeffs(const Surface& S, const DeformationNodes& d, const CVecX& c);
VectorField d_curl_coeffs(const Surface& S, const DeformationNodes& d, const CVecX& c);
VectorField d_density_field(const Surface& S, const DeformationNodes& d, const HelmholtzDensity& j);

}  // namespace maxshape
