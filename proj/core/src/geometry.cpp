#include "maxshape/geometry.hpp"

#include "maxshape/errors.hpp"

#include <cmath>
#include <string>

namespace maxshape {

CVecX ReferenceGrid::analysis(const CVecX& f) const
{
    CVecX wf = weights.cwiseProduct(f);
    CVecX c(nsh());
    c.real() = Y.transpose() * wf.real();
    c.imag() = Y.transpose() * wf.imag();
    return c;
}

VecX ReferenceGrid::analysis(const VecX& f) const
{
    return Y.transpose() * weights.cwiseProduct(f);
}

CVecX ReferenceGrid::synthesis(const CVecX& c) const
{
    return rmul(Y, c);
}

GridPtr make_grid(int L, int nquad)
{
    if (L < 1) throw ResolutionTooLow("degree must be at least 1");
    if (nquad < 2 * L + 2)
        throw ResolutionTooLow("nquad = " + std::to_string(nquad) + " < 2L+2 = " +
                               std::to_string(2 * L + 2));
    auto g = std::make_shared<ReferenceGrid>();
    g->L = L;
    g->ntheta = nquad;
    g->nphi = nquad;
    std::vector<double> x, w;
    gauss_legendre(nquad, x, w);
    const int N = nquad * nquad;
    const int nsh = sh_count(L);
    g->nodes.resize(N, 3);
    g->weights.resize(N);
    g->Y.resize(N, nsh);
    for (auto& d : g->dY) d.resize(N, nsh);
    std::vector<double> Y(nsh), dY(3 * nsh);
    ShWorkspace ws;
    for (int it = 0; it < nquad; ++it) {
        const double ct = x[it], st = std::sqrt(1.0 - ct * ct);
        for (int ip = 0; ip < nquad; ++ip) {
            const int i = it * nquad + ip;
            const double ph = 2.0 * pi * ip / nquad;
            Vec3 u(st * std::cos(ph), st * std::sin(ph), ct);
            g->nodes.row(i) = u.transpose();
            g->weights[i] = w[it] * 2.0 * pi / nquad;
            sh_eval(L, u, Y.data(), dY.data(), ws);
            for (int c = 0; c < nsh; ++c) {
                g->Y(i, c) = Y[c];
                for (int a = 0; a < 3; ++a) g->dY[a](i, c) = dY[3 * c + a];
            }
        }
    }
    return g;
}

double Material::kappa_i() const { return omega * std::sqrt(eps_i * mu_i); }
double Material::kappa_e() const { return omega * std::sqrt(eps_e * mu_e); }
double Material::rho() const { return kappa_i() * mu_e / (kappa_e() * mu_i); }

DeformationField DeformationField::coefficients(int L, std::array<VecX, 3> c)
{
    DeformationField f;
    f.L_ = L;
    for (int a = 0; a < 3; ++a) {
        f.c_[a] = VecX::Zero(sh_count(L));
        const int n = std::min<int>(c[a].size(), sh_count(L));
        f.c_[a].head(n) = c[a].head(n);
    }
    return f;
}

DeformationField DeformationField::constant(const Vec3& d)
{
    DeformationField f;
    f.const_ = d;
    return f;
}

DeformationField DeformationField::position(std::shared_ptr<const Shape> s, double scale)
{
    DeformationField f;
    f.pos_.emplace_back(scale, std::move(s));
    return f;
}

DeformationField DeformationField::operator+(const DeformationField& o) const
{
    DeformationField f = *this;
    f.const_ += o.const_;
    if (o.L_ >= 0) {
        const int L = std::max(L_, o.L_);
        for (int a = 0; a < 3; ++a) {
            VecX c = VecX::Zero(sh_count(L));
            if (L_ >= 0) c.head(c_[a].size()) += c_[a];
            c.head(o.c_[a].size()) += o.c_[a];
            f.c_[a] = c;
        }
        f.L_ = L;
    }
    for (const auto& p : o.pos_) f.pos_.push_back(p);
    return f;
}

DeformationField DeformationField::operator*(double s) const
{
    DeformationField f = *this;
    f.const_ *= s;
    for (auto& c : f.c_) c *= s;
    for (auto& p : f.pos_) p.first *= s;
    return f;
}

void DeformationField::eval(const Vec3& u, Vec3& v, Mat3& D, ShWorkspace& ws) const
{
    v = const_;
    D.setZero();
    if (L_ >= 0) {
        const int n = sh_count(L_);
        thread_local std::vector<double> Y, dY;
        Y.resize(n);
        dY.resize(3 * n);
        sh_eval(L_, u, Y.data(), dY.data(), ws);
        for (int a = 0; a < 3; ++a) {
            const VecX& c = c_[a];
            for (int k = 0; k < n; ++k) {
                if (c[k] == 0.0) continue;
                v[a] += c[k] * Y[k];
                for (int b = 0; b < 3; ++b) D(a, b) += c[k] * dY[3 * k + b];
            }
        }
    }
    for (const auto& [s, shape] : pos_) {
        Vec3 X;
        Mat3 DX;
        shape->eval(u, X, DX, ws);
        v += s * X;
        D += s * DX;
    }
}

Vec3 DeformationField::value(const Vec3& u) const
{
    ShWorkspace ws;
    Vec3 v;
    Mat3 D;
    eval(u, v, D, ws);
    return v;
}

void Shape::eval(const Vec3& u, Vec3& X, Mat3& D, ShWorkspace& ws) const
{
    const int n = sh_count(L_);
    thread_local std::vector<double> Y, dY;
    Y.resize(n);
    dY.resize(3 * n);
    sh_eval(L_, u, Y.data(), dY.data(), ws);
    double r = 0.0;
    Vec3 a = Vec3::Zero();
    for (int k = 0; k < n; ++k) {
        if (rho_[k] == 0.0) continue;
        r += rho_[k] * Y[k];
        a += rho_[k] * Vec3(dY[3 * k], dY[3 * k + 1], dY[3 * k + 2]);
    }
    X = r * u;
    // S^2 gradient of r u_a is u_a grad r + r (e_a - u_a u)
    for (int k = 0; k < 3; ++k) {
        Vec3 ek = Vec3::Unit(k);
        D.row(k) = (u[k] * a + r * (ek - u[k] * u)).transpose();
    }
    for (const auto& [t, xi] : terms_) {
        Vec3 v;
        Mat3 Dv;
        xi->eval(u, v, Dv, ws);
        X += t * v;
        D += t * Dv;
    }
}

double Shape::radial(const Vec3& u) const
{
    const int n = sh_count(L_);
    std::vector<double> Y(n);
    sh_eval(L_, u, Y.data(), nullptr);
    double r = 0.0;
    for (int k = 0; k < n; ++k) r += rho_[k] * Y[k];
    return r;
}

Shape Shape::deformed(double t, std::shared_ptr<const DeformationField> xi) const
{
    Shape s = *this;
    s.terms_.emplace_back(t, std::move(xi));
    return s;
}

GeomPoint geometry_from_map(const Vec3& u, const Vec3& X, const Mat3& D)
{
    Vec3 e1, e2;
    tangent_frame(u, e1, e2);
    const Vec3 T1 = D * e1, T2 = D * e2;
    const Vec3 c = T1.cross(T2);
    GeomPoint g;
    g.X = X;
    g.J = c.norm();
    g.N = c / g.J;
    const Vec3 d1 = T2.cross(g.N) / g.J;
    const Vec3 d2 = g.N.cross(T1) / g.J;
    g.M = d1 * e1.transpose() + d2 * e2.transpose();
    return g;
}

double Surface::area() const { return grid->weights.dot(J); }

GeomPoint Surface::at(const Vec3& u, ShWorkspace& ws) const
{
    Vec3 X;
    Mat3 D;
    shape->eval(u, X, D, ws);
    return geometry_from_map(u, X, D);
}

Surface build_from_shape(GridPtr grid, std::shared_ptr<const Shape> shape)
{
    Surface S;
    S.grid = grid;
    S.shape = std::move(shape);
    const int N = grid->size();
    const int nsh = grid->nsh();
    S.X.resize(N, 3);
    S.Nrm.resize(N, 3);
    S.J.resize(N);
    S.M.resize(N);
    for (int a = 0; a < 3; ++a) {
        S.G[a].resize(N, nsh);
        S.R[a].resize(N, nsh);
    }
    ShWorkspace ws;
    for (int i = 0; i < N; ++i) {
        const GeomPoint g = S.at(grid->node(i), ws);
        if (!(g.J > 0.0) || !std::isfinite(g.J))
            throw InadmissibleDeformation("degenerate area element at node " + std::to_string(i));
        S.X.row(i) = g.X.transpose();
        S.Nrm.row(i) = g.N.transpose();
        S.J[i] = g.J;
        S.M[i] = g.M;
        for (int c = 0; c < nsh; ++c) {
            const Vec3 b(grid->dY[0](i, c), grid->dY[1](i, c), grid->dY[2](i, c));
            const Vec3 gr = g.M * b;
            const Vec3 cu = gr.cross(g.N);
            for (int a = 0; a < 3; ++a) {
                S.G[a](i, c) = gr[a];
                S.R[a](i, c) = cu[a];
            }
        }
    }
    const VecX wJ = grid->weights.cwiseProduct(S.J);
    S.A = MatX::Zero(nsh, nsh);
    for (int a = 0; a < 3; ++a) S.A.noalias() -= S.G[a].transpose() * wJ.asDiagonal() * S.G[a];
    S.Dv.resize(nsh, 3 * N);
    S.Rv.resize(nsh, 3 * N);
    for (int i = 0; i < N; ++i)
        for (int a = 0; a < 3; ++a) {
            S.Dv.col(a * N + i) = -wJ[i] * S.G[a].row(i).transpose();
            S.Rv.col(a * N + i) = wJ[i] * S.R[a].row(i).transpose();
        }
    S.Gal = grid->Y.transpose() * wJ.asDiagonal();
    S.Aneg.compute(-S.A.bottomRightCorner(nsh - 1, nsh - 1));
    if (S.Aneg.info() != Eigen::Success)
        throw InadmissibleDeformation("Laplace-Beltrami stiffness matrix is not definite");
    return S;
}

Surface build_surface(GridPtr grid, int Lrho, const VecX& rho)
{
    if (rho.size() != sh_count(Lrho))
        throw InputError("radial coefficient vector has wrong length");
    auto shape = std::make_shared<Shape>(Lrho, rho);
    // sample on a grid finer than the quadrature grid as well
    const int nchk = std::max(2 * grid->ntheta, 4 * Lrho + 8);
    for (int it = 0; it <= nchk; ++it) {
        const double th = pi * (it + 0.5) / (nchk + 1);
        for (int ip = 0; ip < 2 * nchk; ++ip) {
            const double ph = pi * ip / nchk;
            Vec3 u(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
            const double r = shape->radial(u);
            if (!(r > 0.0))
                throw NonPositiveRadial("rho = " + std::to_string(r) + " at theta = " +
                                        std::to_string(th) + ", phi = " + std::to_string(ph));
        }
    }
    return build_from_shape(std::move(grid), shape);
}

Surface build_sphere(GridPtr grid, double radius)
{
    VecX rho = VecX::Zero(1);
    rho[0] = radius * std::sqrt(4.0 * pi);
    return build_surface(std::move(grid), 0, rho);
}

Surface deform(const Surface& base, const DeformationField& xi, double t)
{
    auto field = std::make_shared<const DeformationField>(xi);
    auto shape = std::make_shared<const Shape>(base.shape->deformed(t, field));
    Surface S = build_from_shape(base.grid, shape);
    for (int i = 0; i < S.size(); ++i) {
        const double c = S.Nrm.row(i).dot(base.Nrm.row(i));
        if (c <= 0.0)
            throw InadmissibleDeformation("orientation flips at node " + std::to_string(i));
        if (c < 0.1)
            throw NearTangentNormals("n_r . n = " + std::to_string(c) + " at node " +
                                     std::to_string(i));
    }
    return S;
}

static void check_grid(const Surface& S, Eigen::Index rows)
{
    if (rows != S.size())
        throw GridMismatch("field has " + std::to_string(rows) + " nodes, surface has " +
                           std::to_string(S.size()));
}

ScalarField pullback_tau(const Surface& surface_r, const ScalarField& u_r)
{
    check_grid(surface_r, u_r.size());
    return u_r;
}

ScalarField pushforward_tau_inv(const Surface& surface_r, const ScalarField& u)
{
    check_grid(surface_r, u.size());
    return u;
}

VectorField pullback_tau(const Surface& surface_r, const VectorField& u_r)
{
    check_grid(surface_r, u_r.rows());
    return u_r;
}

VectorField pushforward_tau_inv(const Surface& surface_r, const VectorField& u)
{
    check_grid(surface_r, u.rows());
    return u;
}

VectorField projector_pi(const Surface& base, const Surface& surface_r, const VectorField& u_r)
{
    check_grid(surface_r, u_r.rows());
    if (base.grid != surface_r.grid && base.size() != surface_r.size())
        throw GridMismatch("surfaces live on different grids");
    VectorField out(u_r.rows(), 3);
    for (int i = 0; i < u_r.rows(); ++i) {
        const Vec3 n = base.Nrm.row(i).transpose();
        cplx un = 0.0;
        for (int a = 0; a < 3; ++a) un += u_r(i, a) * n[a];
        for (int a = 0; a < 3; ++a) out(i, a) = u_r(i, a) - un * n[a];
    }
    return out;
}

VectorField projector_pi_inv(const Surface& base, const Surface& surface_r, const VectorField& u)
{
    check_grid(surface_r, u.rows());
    if (base.grid != surface_r.grid && base.size() != surface_r.size())
        throw GridMismatch("surfaces live on different grids");
    VectorField out(u.rows(), 3);
    for (int i = 0; i < u.rows(); ++i) {
        const Vec3 n = base.Nrm.row(i).transpose();
        const Vec3 nr = surface_r.Nrm.row(i).transpose();
        const double c = nr.dot(n);
        if (std::abs(c) < 0.1)
            throw NearTangentNormals("n_r . n = " + std::to_string(c));
        cplx s = 0.0;
        for (int a = 0; a < 3; ++a) s += nr[a] * u(i, a);
        for (int a = 0; a < 3; ++a) out(i, a) = u(i, a) - n[a] * s / c;
    }
    return out;
}

DeformationNodes deformation_at_nodes(const Surface& S, const DeformationField& xi)
{
    const int N = S.size();
    DeformationNodes d;
    d.value.resize(N, 3);
    d.Gxi.resize(N);
    d.div.resize(N);
    ShWorkspace ws;
    for (int i = 0; i < N; ++i) {
        Vec3 v;
        Mat3 D;
        xi.eval(S.grid->node(i), v, D, ws);
        d.value.row(i) = v.transpose();
        d.Gxi[i] = S.M[i] * D.transpose();
        d.div[i] = d.Gxi[i].trace();
    }
    return d;
}

}  // namespace maxshape
