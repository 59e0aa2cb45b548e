#pragma once

#include "maxshape/types.hpp"

#include <vector>

namespace maxshape {

// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Real orthonormal spherical harmonics (no Condon-Shortley phase) at the unit
// vector u, degrees 0..L, flat index sh_index(n, m).  Y_n^m for m > 0 carries
// cos(m phi), for m < 0 sin(|m| phi).  If grad is non-null it receives the
// Cartesian S^2 gradient, grad[3*c + a].
void sh_eval(int L, const Vec3& u, double* Y, double* grad);

// Same, with a caller supplied scratch buffer for the Legendre table.
struct ShWorkspace {
    std::vector<double> P, dP, mP;
    void resize(int L);
};
void sh_eval(int L, const Vec3& u, double* Y, double* grad, ShWorkspace& ws);

// Orthonormal tangent frame (e1, e2) at u with e1 x e2 = u.
void tangent_frame(const Vec3& u, Vec3& e1, Vec3& e2);

}  // namespace maxshape
