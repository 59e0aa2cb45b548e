#include "maxshape/surfcalc.hpp"

#include "maxshape/errors.hpp"

#include <cmath>

namespace maxshape {

HelmholtzDensity HelmholtzDensity::zero(int L)
{
    HelmholtzDensity j;
    j.L = L;
    j.p = CVecX::Zero(sh_count(L) - 1);
    j.q = CVecX::Zero(sh_count(L) - 1);
    return j;
}

CVecX HelmholtzDensity::stacked() const
{
    CVecX v(2 * p.size());
    v << p, q;
    return v;
}

HelmholtzDensity HelmholtzDensity::from_stacked(int L, const CVecX& v)
{
    HelmholtzDensity j;
    j.L = L;
    const auto n = v.size() / 2;
    j.p = v.head(n);
    j.q = v.tail(n);
    return j;
}

CVecX pad_mean(const CVecX& c)
{
    CVecX f(c.size() + 1);
    f[0] = 0.0;
    f.tail(c.size()) = c;
    return f;
}

CVecX drop_mean(const CVecX& c) { return c.tail(c.size() - 1); }

static CVecX flat(const VectorField& w)
{
    return Eigen::Map<const CVecX>(w.data(), w.size());
}

static VectorField node_field(const MatX (&B)[3], const CVecX& c)
{
    VectorField w(B[0].rows(), 3);
    for (int a = 0; a < 3; ++a) w.col(a) = rmul(B[a], c);
    return w;
}

VectorField grad_from_coeffs(const Surface& S, const CVecX& c) { return node_field(S.G, c); }
VectorField curl_from_coeffs(const Surface& S, const CVecX& c) { return node_field(S.R, c); }

VectorField density_field(const Surface& S, const HelmholtzDensity& j)
{
    return grad_from_coeffs(S, pad_mean(j.p)) + curl_from_coeffs(S, pad_mean(j.q));
}

CVecX weak_div(const Surface& S, const VectorField& w) { return rmul(S.Dv, flat(w)); }
CVecX weak_curl(const Surface& S, const VectorField& w) { return rmul(S.Rv, flat(w)); }
CVecX weak_mass(const Surface& S, const ScalarField& g) { return rmul(S.Gal, g); }

CVecX solve_stiffness(const Surface& S, const CVecX& b)
{
    const int n = S.nsh() - 1;
    CVecX x(n + 1);
    x[0] = 0.0;
    VecX re = b.tail(n).real(), im = b.tail(n).imag();
    x.tail(n).real() = -S.Aneg.solve(re);
    x.tail(n).imag() = -S.Aneg.solve(im);
    return x;
}

CVecX laplace_coeffs(const Surface& S, const CVecX& p)
{
    CVecX g = S.grid->synthesis(rmul(S.A, p));
    g.array() /= S.J.array();
    return S.grid->analysis(g);
}

MatX laplace_matrix(const Surface& S)
{
    const auto& grid = *S.grid;
    return grid.Y.transpose() * grid.weights.cwiseQuotient(S.J).asDiagonal() * grid.Y * S.A;
}

VectorField surface_gradient(const Surface& S, const ScalarField& u)
{
    if (u.size() != S.size()) throw GridMismatch("scalar field size");
    return grad_from_coeffs(S, S.grid->analysis(u));
}

ScalarField surface_divergence(const Surface& S, const VectorField& w)
{
    if (w.rows() != S.size()) throw GridMismatch("vector field size");
    CVecX g = S.grid->synthesis(weak_div(S, w));
    return g.array() / S.J.array();
}

ScalarField surface_scalar_curl(const Surface& S, const VectorField& w)
{
    if (w.rows() != S.size()) throw GridMismatch("vector field size");
    CVecX g = S.grid->synthesis(weak_curl(S, w));
    return g.array() / S.J.array();
}

VectorField tangential_vector_curl(const Surface& S, const ScalarField& u)
{
    if (u.size() != S.size()) throw GridMismatch("scalar field size");
    return curl_from_coeffs(S, S.grid->analysis(u));
}

ScalarField laplace_beltrami(const Surface& S, const ScalarField& u)
{
    if (u.size() != S.size()) throw GridMismatch("scalar field size");
    CVecX g = S.grid->synthesis(rmul(S.A, S.grid->analysis(u)));
    return g.array() / S.J.array();
}

static void check_mean(double mean, double scale, const char* what)
{
    if (std::abs(mean) > 1e-10 * scale + 1e-14)
        throw NonZeroMean(std::string(what) + " has mean " + std::to_string(mean));
}

ScalarField laplace_beltrami_inverse(const Surface& S, const ScalarField& f)
{
    if (f.size() != S.size()) throw GridMismatch("scalar field size");
    const VecX wJ = S.grid->weights.cwiseProduct(S.J);
    const cplx m = (wJ.cast<cplx>().array() * f.array()).sum();
    check_mean(std::abs(m), (wJ.array() * f.array().abs()).sum(), "right-hand side");
    CVecX u = S.grid->synthesis(solve_stiffness(S, weak_mass(S, f)));
    const cplx mu = (wJ.cast<cplx>().array() * u.array()).sum() / wJ.sum();
    return u.array() - mu;
}

HelmholtzDensity helmholtz_decompose(const Surface& S, const VectorField& j)
{
    if (j.rows() != S.size()) throw GridMismatch("vector field size");
    HelmholtzDensity h;
    h.L = S.L();
    h.p = drop_mean(solve_stiffness(S, weak_div(S, j)));
    h.q = drop_mean(solve_stiffness(S, -weak_curl(S, j)));
    return h;
}

HelmholtzDensity helmholtz_pullback(const Surface& surface_r, const VectorField& j_r)
{
    return helmholtz_decompose(surface_r, j_r);
}

VectorField helmholtz_pullback_inverse(const Surface& surface_r, const HelmholtzDensity& j)
{
    if (j.L != surface_r.L()) throw GridMismatch("density degree does not match the grid");
    return density_field(surface_r, j);
}

static const ScalarField& as_scalar(const AnyField& u, SurfaceOp which)
{
    if (!std::holds_alternative<ScalarField>(u))
        throw KindMismatch(which == SurfaceOp::gradient ? "gradient needs a scalar field"
                                                        : "vector curl needs a scalar field");
    return std::get<ScalarField>(u);
}

static const VectorField& as_vector(const AnyField& u, SurfaceOp which)
{
    if (!std::holds_alternative<VectorField>(u))
        throw KindMismatch(which == SurfaceOp::divergence ? "divergence needs a vector field"
                                                          : "scalar curl needs a vector field");
    return std::get<VectorField>(u);
}

AnyField surface_operator(const Surface& S, SurfaceOp which, const AnyField& u)
{
    const int N = S.size();
    switch (which) {
    case SurfaceOp::gradient:
        return grad_from_coeffs(S, S.grid->analysis(as_scalar(u, which)));
    case SurfaceOp::vector_curl:
        return curl_from_coeffs(S, S.grid->analysis(as_scalar(u, which)));
    case SurfaceOp::divergence: {
        const VectorField& v = as_vector(u, which);
        ScalarField out = ScalarField::Zero(N);
        for (int a = 0; a < 3; ++a)
            out += grad_from_coeffs(S, S.grid->analysis(CVecX(v.col(a)))).col(a);
        return out;
    }
    case SurfaceOp::scalar_curl: {
        const VectorField& v = as_vector(u, which);
        ScalarField out = ScalarField::Zero(N);
        for (int a = 0; a < 3; ++a)
            out -= curl_from_coeffs(S, S.grid->analysis(CVecX(v.col(a)))).col(a);
        return out;
    }
    }
    return ScalarField();
}

RealVectorField d_normal(const Surface& S, const DeformationField& xi)
{
    const DeformationNodes d = deformation_at_nodes(S, xi);
    RealVectorField out(S.size(), 3);
    for (int i = 0; i < S.size(); ++i)
        out.row(i) = -(d.Gxi[i] * S.Nrm.row(i).transpose()).transpose();
    return out;
}

VecX d_jacobian(const Surface& S, const DeformationField& xi)
{
    const DeformationNodes d = deformation_at_nodes(S, xi);
    return S.J.cwiseProduct(d.div);
}

// dG u = -[G xi] G u + (G u . [G xi] N) N
CVec3 d_grad_point(const Mat3& Gxi, const Vec3& N, const CVec3& gu)
{
    const Vec3 GN = Gxi * N;
    return -Gxi.cast<cplx>() * gu + dotu(gu, GN) * N.cast<cplx>();
}

// dR u = [G xi]^T R u - div(xi) R u
CVec3 d_curl_point(const Mat3& Gxi, double div, const CVec3& ru)
{
    return Gxi.transpose().cast<cplx>() * ru - div * ru;
}

VectorField d_gradient_coeffs(const Surface& S, const DeformationNodes& d, const CVecX& c)
{
    VectorField g = grad_from_coeffs(S, c);
    for (int i = 0; i < S.size(); ++i)
        g.row(i) = d_grad_point(d.Gxi[i], S.Nrm.row(i).transpose(), g.row(i).transpose()).transpose();
    return g;
}

VectorField d_curl_coeffs(const Surface& S, const DeformationNodes& d, const CVecX& c)
{
    VectorField r = curl_from_coeffs(S, c);
    for (int i = 0; i < S.size(); ++i)
        r.row(i) = d_curl_point(d.Gxi[i], d.div[i], r.row(i).transpose()).transpose();
    return r;
}

VectorField d_density_field(const Surface& S, const DeformationNodes& d, const HelmholtzDensity& j)
{
    return d_gradient_coeffs(S, d, pad_mean(j.p)) + d_curl_coeffs(S, d, pad_mean(j.q));
}

AnyField d_surface_operator(const Surface& S, const DeformationField& xi, SurfaceOp which,
                            const AnyField& u)
{
    const int N = S.size();
    switch (which) {
    case SurfaceOp::gradient: {
        const ScalarField& f = as_scalar(u, which);
        return d_gradient_coeffs(S, deformation_at_nodes(S, xi), S.grid->analysis(f));
    }
    case SurfaceOp::vector_curl: {
        const ScalarField& f = as_scalar(u, which);
        return d_curl_coeffs(S, deformation_at_nodes(S, xi), S.grid->analysis(f));
    }
    case SurfaceOp::divergence: {
        const VectorField& v = as_vector(u, which);
        const DeformationNodes d = deformation_at_nodes(S, xi);
        VectorField Gu[3];
        for (int c = 0; c < 3; ++c) Gu[c] = grad_from_coeffs(S, S.grid->analysis(CVecX(v.col(c))));
        ScalarField out(N);
        for (int i = 0; i < N; ++i) {
            // [G u] has columns grad u_c
            Eigen::Matrix3cd Gm;
            for (int c = 0; c < 3; ++c) Gm.col(c) = Gu[c].row(i).transpose();
            const Vec3 n = S.Nrm.row(i).transpose();
            const Eigen::Matrix3cd Gx = d.Gxi[i].cast<cplx>();
            out[i] = -(Gx * Gm).trace() + dotu(CVec3(Gm * n.cast<cplx>()), CVec3(Gx * n.cast<cplx>()));
        }
        return out;
    }
    case SurfaceOp::scalar_curl: {
        const VectorField& v = as_vector(u, which);
        const DeformationNodes d = deformation_at_nodes(S, xi);
        VectorField Ru[3];
        for (int c = 0; c < 3; ++c) Ru[c] = curl_from_coeffs(S, S.grid->analysis(CVecX(v.col(c))));
        ScalarField out(N);
        for (int i = 0; i < N; ++i) {
            cplx s = 0.0, curl = 0.0;
            for (int c = 0; c < 3; ++c) {
                const CVec3 r = Ru[c].row(i).transpose();
                s += dotu(r, Vec3(d.Gxi[i].col(c)));
                curl -= r[c];
            }
            out[i] = -s - d.div[i] * curl;
        }
        return out;
    }
    }
    return ScalarField();
}

CVecX rstar_apply(const Surface& S, const VectorField& w) { return weak_curl(S, w); }
CVecX dstar_apply(const Surface& S, const VectorField& w) { return weak_div(S, w); }

CVecX d_rstar(const Surface& S, const DeformationNodes& d, const VectorField& w)
{
    VectorField t(S.size(), 3);
    for (int i = 0; i < S.size(); ++i)
        t.row(i) = (d.Gxi[i].cast<cplx>() * w.row(i).transpose()).transpose();
    return weak_curl(S, t);
}

CVecX d_dstar(const Surface& S, const DeformationNodes& d, const VectorField& w)
{
    VectorField t(S.size(), 3);
    for (int i = 0; i < S.size(); ++i) {
        const CVec3 wi = w.row(i).transpose();
        const Vec3 n = S.Nrm.row(i).transpose();
        const Mat3& Gx = d.Gxi[i];
        cplx wn = 0.0;
        for (int a = 0; a < 3; ++a) wn += wi[a] * n[a];
        const CVec3 v = d.div[i] * wi - Gx.transpose().cast<cplx>() * wi +
                        wn * (Gx * n).cast<cplx>();
        t.row(i) = v.transpose();
    }
    return weak_div(S, t);
}

CVecX d_rstar(const Surface& S, const DeformationField& xi, const VectorField& w)
{
    if (w.rows() != S.size()) throw GridMismatch("vector field size");
    return d_rstar(S, deformation_at_nodes(S, xi), w);
}

CVecX d_dstar(const Surface& S, const DeformationField& xi, const VectorField& w)
{
    if (w.rows() != S.size()) throw GridMismatch("vector field size");
    return d_dstar(S, deformation_at_nodes(S, xi), w);
}

MatX d_stiffness(const Surface& S, const DeformationNodes& d)
{
    const int N = S.size();
    const int n = S.nsh();
    const VecX wJ = S.grid->weights.cwiseProduct(S.J);
    MatX dA = MatX::Zero(n, n);
    VecX s(N);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            for (int i = 0; i < N; ++i) {
                const Mat3& G = d.Gxi[i];
                const double B = (a == b ? d.div[i] : 0.0) - G(a, b) - G(b, a);
                s[i] = wJ[i] * B;
            }
            dA.noalias() -= S.G[a].transpose() * s.asDiagonal() * S.G[b];
        }
    return dA;
}

CVecX lstar_inverse(const Surface& S, const ScalarField& f)
{
    if (f.size() != S.size()) throw GridMismatch("scalar field size");
    const VecX& w = S.grid->weights;
    const cplx m = (w.cast<cplx>().array() * f.array()).sum();
    check_mean(std::abs(m), (w.array() * f.array().abs()).sum(), "right-hand side");
    return solve_stiffness(S, S.grid->analysis(f));
}

CVecX d_laplace_inverse(const Surface& S, const DeformationField& xi, const ScalarField& f)
{
    const CVecX x = lstar_inverse(S, f);
    const MatX dA = d_stiffness(S, deformation_at_nodes(S, xi));
    return -solve_stiffness(S, rmul(dA, x));
}

}  // namespace maxshape
