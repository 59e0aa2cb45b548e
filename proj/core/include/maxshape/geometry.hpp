#pragma once

#include "maxshape/sh.hpp"
#include "maxshape/types.hpp"

#include <array>
#include <memory>
#include <utility>
#include <vector>

namespace maxshape {

using ScalarField = CVecX;                                      // node values
using VectorField = Eigen::Matrix<cplx, Eigen::Dynamic, 3>;     // node values, one row per node
using RealVectorField = Eigen::Matrix<double, Eigen::Dynamic, 3>;

// Gauss-Legendre in cos(theta) times trapezoid in phi, with the real SH basis
// up to degree L and its S^2 gradient tabulated at the nodes.
struct ReferenceGrid {
    int L = 0;
    int ntheta = 0;
    int nphi = 0;
    MatX nodes;     // N x 3 unit vectors
    VecX weights;   // N
    MatX Y;         // N x nsh
    MatX dY[3];     // N x nsh, Cartesian components of the S^2 gradient

    int size() const { return static_cast<int>(weights.size()); }
    int nsh() const { return sh_count(L); }
    Vec3 node(int i) const { return nodes.row(i).transpose(); }

    CVecX analysis(const CVecX& f) const;
    VecX analysis(const VecX& f) const;
    CVecX synthesis(const CVecX& c) const;
};

using GridPtr = std::shared_ptr<const ReferenceGrid>;

// nquad points in each angular direction; needs nquad >= 2L + 2.
GridPtr make_grid(int L, int nquad);

struct Material {
    double eps_i = 1.0;
    double eps_e = 1.0;
    double mu_i = 1.0;
    double mu_e = 1.0;
    double omega = 1.0;
    double eta = 1.0;

    double kappa_i() const;
    double kappa_e() const;
    double rho() const;     // kappa_i mu_e / (kappa_e mu_i)
};

class Shape;

// Vector field xi on the reference sphere.  It is the sum of a band-limited
// part (SH coefficients per Cartesian component), a constant and a multiple of
// the position map of some shape.
class DeformationField {
public:
    static DeformationField coefficients(int L, std::array<VecX, 3> c);
    static DeformationField constant(const Vec3& d);
    static DeformationField position(std::shared_ptr<const Shape> s, double scale = 1.0);

    // value and rows D(a, :) = S^2 gradient of component a
    void eval(const Vec3& u, Vec3& v, Mat3& D, ShWorkspace& ws) const;
    Vec3 value(const Vec3& u) const;

    DeformationField operator+(const DeformationField& o) const;
    DeformationField operator*(double s) const;

private:
    int L_ = -1;
    std::array<VecX, 3> c_;
    Vec3 const_ = Vec3::Zero();
    std::vector<std::pair<double, std::shared_ptr<const Shape>>> pos_;
};

// Parametrisation X(u) = rho(u) u + sum_k t_k xi_k(u) of a closed surface over S^2.
class Shape {
public:
    Shape(int L, VecX rho) : L_(L), rho_(std::move(rho)) {}

    void eval(const Vec3& u, Vec3& X, Mat3& D, ShWorkspace& ws) const;
    double radial(const Vec3& u) const;
    Shape deformed(double t, std::shared_ptr<const DeformationField> xi) const;

    int rho_degree() const { return L_; }
    const VecX& rho_coefficients() const { return rho_; }
    bool star_shaped() const { return terms_.empty(); }

private:
    int L_;
    VecX rho_;
    std::vector<std::pair<double, std::shared_ptr<const DeformationField>>> terms_;
};

// Geometry at one point of the surface.  M maps an S^2 gradient to the
// corresponding surface gradient.
struct GeomPoint {
    Vec3 X, N;
    double J = 0.0;
    Mat3 M;
};

GeomPoint geometry_from_map(const Vec3& u, const Vec3& X, const Mat3& D);

struct Surface {
    GridPtr grid;
    std::shared_ptr<const Shape> shape;

    MatX X;         // N x 3
    MatX Nrm;       // N x 3 unit outward normal
    VecX J;         // area element relative to S^2
    std::vector<Mat3> M;

    // surface gradient and vector curl of every basis function at the nodes
    MatX G[3];      // N x nsh
    MatX R[3];

    // weak forms, rows indexed by the test function
    MatX A;         // -sum w J grad Y_c . grad Y_c'
    MatX Dv;        // nsh x 3N   -sum w J v . grad Y_c, column a*N + i
    MatX Rv;        // nsh x 3N    sum w J v . curl Y_c
    MatX Gal;       // nsh x N     sum w J g Y_c
    Eigen::LLT<MatX> Aneg;   // factor of -A restricted to degrees >= 1

    int L() const { return grid->L; }
    int size() const { return grid->size(); }
    int nsh() const { return grid->nsh(); }
    double area() const;
    GeomPoint at(const Vec3& u, ShWorkspace& ws) const;
};

// rho given by SH coefficients up to degree Lrho (length (Lrho+1)^2).
Surface build_surface(GridPtr grid, int Lrho, const VecX& rho);
Surface build_sphere(GridPtr grid, double radius);
Surface build_from_shape(GridPtr grid, std::shared_ptr<const Shape> shape);

// Gamma_r with r = t xi; checks admissibility against the base surface.
Surface deform(const Surface& base, const DeformationField& xi, double t);

// Transport between Gamma_r and the reference: node values are shared.
ScalarField pullback_tau(const Surface& surface_r, const ScalarField& u_r);
ScalarField pushforward_tau_inv(const Surface& surface_r, const ScalarField& u);
VectorField pullback_tau(const Surface& surface_r, const VectorField& u_r);
VectorField pushforward_tau_inv(const Surface& surface_r, const VectorField& u);

// pi(r): tangential to Gamma_r -> tangential to Gamma; inverse maps back along n.
VectorField projector_pi(const Surface& base, const Surface& surface_r, const VectorField& u_r);
VectorField projector_pi_inv(const Surface& base, const Surface& surface_r, const VectorField& u);

// xi and its surface gradient matrix at the nodes of a surface;
// Gxi[i].col(a) is the surface gradient of xi_a.
struct DeformationNodes {
    RealVectorField value;
    std::vector<Mat3> Gxi;
    VecX div;
};
DeformationNodes deformation_at_nodes(const Surface& S, const DeformationField& xi);

}  // namespace maxshape
