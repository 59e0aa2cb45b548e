#pragma once

#include "maxshape/geometry.hpp"

#include <vector>

namespace maxshape {

// Product rule on S^2 in coordinates whose north pole is the target.  w_sing
// integrates f / |e3 - z| and already carries the factor |e3 - z|, so both
// weight sets are applied to the kernel itself: odd (1/r type) kernel parts use
// w_sing, smooth parts use w_reg.
struct RotatedRule {
    int ntheta = 0;
    int nphi = 0;
    std::vector<Vec3> z;
    std::vector<double> w_sing;
    std::vector<double> w_reg;
    int size() const { return static_cast<int>(z.size()); }
};

RotatedRule make_rotated_rule(int ntheta, int nphi);

// Radial factors of the Helmholtz kernel and its derivatives,
//   G = e^{ikr}/(4 pi r),  grad_x G = g1 (x - y),  Hess_x G = g1 I + g2 (x-y)(x-y)^T,
// split into the part that is even in r divided by an odd power of r (real,
// "odd") and the part that is smooth in r^2 (imaginary for real k, "even").
struct KernelSplit {
    double G_odd, G_even;
    double g1_odd, g1_even;
    double g2_odd, g2_even;
};

KernelSplit helmholtz_split(double kappa, double r);

// Full kernel values for well separated points.
// g_{k+1} = g_k'(r) / r, so grad G = g1 (x - y) and Hess G = g1 I + g2 d d^T.
struct KernelFull {
    cplx G, g1, g2, g3;
};
KernelFull helmholtz_full(double kappa, double r);

// Points of the rotated rule around target u with surface geometry and the
// SH basis (values and S^2 gradients) up to degree L attached.
struct TargetPatch {
    int n = 0;
    std::vector<Vec3> u;
    std::vector<GeomPoint> geo;
    std::vector<double> ws, wr;     // weights times the area element
    MatX Y;                         // nsh x n
    MatX dY;                        // 3*nsh x n
};

void build_patch(const Surface& S, const RotatedRule& rule, const Vec3& target, int L,
                 TargetPatch& patch, ShWorkspace& ws);

// Density bases at the patch points: column k holds for every basis function
// c = 1..nsh-1 the surface gradient (first block) and surface curl (second
// block), three components each, entry 3*col + a.
void patch_vector_basis(const TargetPatch& patch, MatX& BT);

}  // namespace maxshape
