#include "maxshape/bio.hpp"

#include "maxshape/errors.hpp"
#include "maxshape/parallel.hpp"

#include <cmath>

namespace maxshape {

HelmholtzDensity OperatorBlock::apply(const HelmholtzDensity& j) const
{
    return HelmholtzDensity::from_stacked(L, mat * j.stacked());
}

CMatX solve_stiffness(const Surface& S, const CMatX& B)
{
    const int n = S.nsh() - 1;
    CMatX X(n + 1, B.cols());
    X.row(0).setZero();
    MatX re = B.bottomRows(n).real(), im = B.bottomRows(n).imag();
    X.bottomRows(n).real() = -S.Aneg.solve(re);
    X.bottomRows(n).imag() = -S.Aneg.solve(im);
    return X;
}

CMatX normal_dot(const Surface& S, const CMatX& W)
{
    const int N = S.size();
    CMatX out = CMatX::Zero(N, W.cols());
    for (int a = 0; a < 3; ++a) out += S.Nrm.col(a).asDiagonal() * W.middleRows(a * N, N);
    return out;
}

CMatX cross_normal(const Surface& S, const CMatX& W)
{
    const int N = S.size();
    CMatX out(3 * N, W.cols());
    const auto n0 = S.Nrm.col(0).asDiagonal(), n1 = S.Nrm.col(1).asDiagonal(),
               n2 = S.Nrm.col(2).asDiagonal();
    const auto w0 = W.middleRows(0, N), w1 = W.middleRows(N, N), w2 = W.middleRows(2 * N, N);
    out.middleRows(0, N) = n1 * w2 - n2 * w1;
    out.middleRows(N, N) = n2 * w0 - n0 * w2;
    out.middleRows(2 * N, N) = n0 * w1 - n1 * w0;
    return out;
}

SurfaceIntegrals on_surface_integrals(const Surface& S, const std::vector<IntegralRequest>& req)
{
    const int N = S.size();
    const int L = S.L();
    const int nsh = sh_count(L);
    const int nc = nsh - 1;
    const int nv = 2 * nc;
    const int R = static_cast<int>(req.size());
    const RotatedRule rule = make_rotated_rule(S.grid->ntheta, S.grid->nphi + S.grid->nphi % 2);

    bool any_vector = false;
    std::vector<int> mag_slot(R, -1);
    int Rm = 0;
    for (int q = 0; q < R; ++q) {
        any_vector |= req[q].vector || req[q].magnetic;
        if (req[q].magnetic) mag_slot[q] = Rm++;
    }

    SurfaceIntegrals out;
    out.req = req;
    out.VJ.resize(R);
    out.MJ.resize(R);
    out.VS.resize(R);
    out.KS.resize(R);
    for (int q = 0; q < R; ++q) {
        out.VS[q].resize(N, nsh);
        if (req[q].vector || req[q].magnetic) out.VJ[q].resize(3 * N, nv);
        if (req[q].magnetic) {
            out.MJ[q].resize(3 * N, nv);
            out.KS[q].resize(N, nsh);
        }
    }

    parallel_for(N, [&](int begin, int end) {
        TargetPatch patch;
        ShWorkspace ws;
        MatX BT, BxT, K, KN, PV, PX, PS;
        for (int i = begin; i < end; ++i) {
            build_patch(S, rule, S.grid->node(i), L, patch, ws);
            const int n = patch.n;
            const Vec3 Xi = S.X.row(i).transpose();
            const Vec3 Ni = S.Nrm.row(i).transpose();
            // columns: [G_q re, im] for every request, then [g1_m re, im]
            K.resize(n, 2 * R + 2 * Rm);
            KN.resize(n, 2 * Rm);
            for (int k = 0; k < n; ++k) {
                const Vec3 d = Xi - patch.geo[k].X;
                const double r = d.norm();
                const double dn = d.dot(Ni);
                for (int q = 0; q < R; ++q) {
                    const KernelSplit s = helmholtz_split(req[q].kappa, r);
                    K(k, 2 * q) = patch.ws[k] * s.G_odd;
                    K(k, 2 * q + 1) = patch.wr[k] * s.G_even;
                    const int m = mag_slot[q];
                    if (m >= 0) {
                        const double a = patch.ws[k] * s.g1_odd, b = patch.wr[k] * s.g1_even;
                        K(k, 2 * R + 2 * m) = a;
                        K(k, 2 * R + 2 * m + 1) = b;
                        KN(k, 2 * m) = a * dn;
                        KN(k, 2 * m + 1) = b * dn;
                    }
                }
            }
            PS.noalias() = patch.Y * K.leftCols(2 * R);
            for (int q = 0; q < R; ++q)
                for (int c = 0; c < nsh; ++c)
                    out.VS[q](i, c) = cplx(PS(c, 2 * q), PS(c, 2 * q + 1));
            if (Rm > 0) {
                PS.noalias() = patch.Y * KN;
                for (int q = 0; q < R; ++q) {
                    const int m = mag_slot[q];
                    if (m < 0) continue;
                    for (int c = 0; c < nsh; ++c)
                        out.KS[q](i, c) = cplx(PS(c, 2 * m), PS(c, 2 * m + 1));
                }
            }
            if (!any_vector) continue;
            patch_vector_basis(patch, BT);
            PV.noalias() = BT * K;
            for (int q = 0; q < R; ++q) {
                if (!(req[q].vector || req[q].magnetic)) continue;
                CMatX& VJ = out.VJ[q];
                for (int col = 0; col < nv; ++col)
                    for (int a = 0; a < 3; ++a)
                        VJ(a * N + i, col) = cplx(PV(3 * col + a, 2 * q), PV(3 * col + a, 2 * q + 1));
            }
            if (Rm == 0) continue;
            // sum g1 j x (Xi - Xk) = (sum g1 j) x Xi - sum g1 (j x Xk)
            BxT.resize(BT.rows(), n);
            for (int k = 0; k < n; ++k) {
                const Vec3& X = patch.geo[k].X;
                const double* b = BT.col(k).data();
                double* o = BxT.col(k).data();
                for (int col = 0; col < nv; ++col) {
                    const double* j = b + 3 * col;
                    o[3 * col] = j[1] * X[2] - j[2] * X[1];
                    o[3 * col + 1] = j[2] * X[0] - j[0] * X[2];
                    o[3 * col + 2] = j[0] * X[1] - j[1] * X[0];
                }
            }
            PX.noalias() = BxT * K.rightCols(2 * Rm);
            for (int q = 0; q < R; ++q) {
                const int m = mag_slot[q];
                if (m < 0) continue;
                CMatX& MJ = out.MJ[q];
                for (int col = 0; col < nv; ++col) {
                    CVec3 s, x;
                    for (int a = 0; a < 3; ++a) {
                        s[a] = cplx(PV(3 * col + a, 2 * R + 2 * m), PV(3 * col + a, 2 * R + 2 * m + 1));
                        x[a] = cplx(PX(3 * col + a, 2 * m), PX(3 * col + a, 2 * m + 1));
                    }
                    const CVec3 t = crossu(s, Xi) - x;
                    const CVec3 v = crossu(Ni, t);
                    for (int a = 0; a < 3; ++a) MJ(a * N + i, col) = v[a];
                }
            }
        }
    });
    return out;
}

// rows 1.. of the full coefficient matrix, as the P or Q part
static CMatX tail_rows(const CMatX& M) { return M.bottomRows(M.rows() - 1); }

static OperatorBlock make_block(const char* name, const Surface& S, double kappa, const CMatX& P,
                                const CMatX& Q)
{
    OperatorBlock B;
    B.name = name;
    B.L = S.L();
    B.kappa = kappa;
    const int nc = S.nsh() - 1;
    B.mat.resize(2 * nc, 2 * nc);
    B.mat.topRows(nc) = tail_rows(P);
    B.mat.bottomRows(nc) = tail_rows(Q);
    return B;
}

// coefficients of V(div j) for every p-column: An[VS Lam], columns 1..
static CMatX div_term(const Surface& S, const CMatX& VS, const MatX& Lam)
{
    const int nc = S.nsh() - 1;
    const CMatX nodes = rmul(MatX(Lam.transpose()), CMatX(VS.transpose())).transpose();
    const MatX Wy = S.grid->Y.transpose() * S.grid->weights.asDiagonal();
    CMatX full = rmul(Wy, nodes);
    return full.rightCols(nc);
}

OperatorBlock block_C(const Surface& S, double kappa, const CMatX& VJ, const CMatX& VS, const MatX& Lam)
{
    const int nc = S.nsh() - 1;
    CMatX P = kappa * solve_stiffness(S, rmul(S.Rv, VJ));
    CMatX Q = kappa * solve_stiffness(S, rmul(S.Dv, VJ));
    Q.leftCols(nc) += div_term(S, VS, Lam) / kappa;
    return make_block("C", S, kappa, P, Q);
}

OperatorBlock block_M(const Surface& S, double kappa, const CMatX& VJ, const CMatX& MJ,
                      const CMatX& KS, const MatX& Lam)
{
    const int nc = S.nsh() - 1;
    CMatX g = rmul(S.Gal, CMatX(kappa * kappa * normal_dot(S, VJ)));
    g.leftCols(nc) += rmul(S.Gal, CMatX(KS * Lam.rightCols(nc)));
    CMatX P = solve_stiffness(S, g);
    CMatX Q = -solve_stiffness(S, rmul(S.Rv, MJ));
    return make_block("M", S, kappa, P, Q);
}

OperatorBlock block_C0star(const Surface& S, const CMatX& VJ, const CMatX& VS, const MatX& Lam)
{
    const int nc = S.nsh() - 1;
    CMatX P = solve_stiffness(S, rmul(S.Rv, VJ));
    CMatX Q = solve_stiffness(S, rmul(S.Dv, VJ));
    Q.leftCols(nc) -= div_term(S, VS, Lam);
    return make_block("C0*", S, 0.0, P, Q);
}

OperatorBlock assemble_C(const Surface& S, double kappa)
{
    if (!(kappa > 0.0)) throw AssemblyFailure("C needs a positive wave number");
    const auto I = on_surface_integrals(S, {{kappa, true, false}});
    return block_C(S, kappa, I.VJ[0], I.VS[0], laplace_matrix(S));
}

OperatorBlock assemble_M(const Surface& S, double kappa)
{
    const auto I = on_surface_integrals(S, {{kappa, true, true}});
    return block_M(S, kappa, I.VJ[0], I.MJ[0], I.KS[0], laplace_matrix(S));
}

OperatorBlock assemble_C0star(const Surface& S)
{
    const auto I = on_surface_integrals(S, {{0.0, true, false}});
    return block_C0star(S, I.VJ[0], I.VS[0], laplace_matrix(S));
}

static void check_finite(const OperatorBlock& B)
{
    if (!B.mat.allFinite()) throw AssemblyFailure(B.name + " has non-finite entries");
}

BoundaryOperators assemble_operators(const Surface& S, const Material& mat)
{
    const double ki = mat.kappa_i(), ke = mat.kappa_e();
    if (!(ki > 0.0) || !(ke > 0.0)) throw AssemblyFailure("wave numbers must be positive");
    const auto I = on_surface_integrals(S, {{ki, true, true}, {ke, true, true}, {0.0, true, false}});
    const MatX Lam = laplace_matrix(S);
    BoundaryOperators B;
    B.Ci = block_C(S, ki, I.VJ[0], I.VS[0], Lam);
    B.Mi = block_M(S, ki, I.VJ[0], I.MJ[0], I.KS[0], Lam);
    B.Ce = block_C(S, ke, I.VJ[1], I.VS[1], Lam);
    B.Me = block_M(S, ke, I.VJ[1], I.MJ[1], I.KS[1], Lam);
    B.C0s = block_C0star(S, I.VJ[2], I.VS[2], Lam);
    for (const auto* b : {&B.Ci, &B.Mi, &B.Ce, &B.Me, &B.C0s}) check_finite(*b);
    return B;
}

CVecX single_layer_on_surface(const Surface& S, double kappa, const CVecX& coeffs)
{
    const auto I = on_surface_integrals(S, {{kappa, false, false}});
    return I.VS[0] * coeffs;
}

int default_oversampling(const Surface& S) { return 2 * S.grid->ntheta; }

SurfaceSample sample_surface_points(const Surface& S, const MatX& u, const VecX& w)
{
    const int N = static_cast<int>(u.rows());
    const int L = S.L();
    const int nsh = S.nsh();
    SurfaceSample s;
    s.X.resize(N, 3);
    s.N.resize(N, 3);
    s.u = u;
    s.wJ.resize(N);
    s.Y.resize(N, nsh);
    s.M.resize(N);
    for (int a = 0; a < 3; ++a) {
        s.G[a].resize(N, nsh);
        s.R[a].resize(N, nsh);
    }
    ShWorkspace ws;
    std::vector<double> Y(nsh), dY(3 * nsh);
    for (int i = 0; i < N; ++i) {
        const Vec3 ui = u.row(i).transpose();
        const GeomPoint p = S.at(ui, ws);
        sh_eval(L, ui, Y.data(), dY.data(), ws);
        s.X.row(i) = p.X.transpose();
        s.N.row(i) = p.N.transpose();
        s.wJ[i] = w[i] * p.J;
        s.M[i] = p.M;
        for (int c = 0; c < nsh; ++c) {
            s.Y(i, c) = Y[c];
            const Vec3 gr = p.M * Vec3(dY[3 * c], dY[3 * c + 1], dY[3 * c + 2]);
            const Vec3 cu = gr.cross(p.N);
            for (int a = 0; a < 3; ++a) {
                s.G[a](i, c) = gr[a];
                s.R[a](i, c) = cu[a];
            }
        }
    }
    return s;
}

SurfaceSample sample_surface(const Surface& S, int nquad)
{
    const GridPtr g = make_grid(S.L(), std::max(nquad, 2 * S.L() + 2));
    return sample_surface_points(S, g->nodes, g->weights);
}

Vec3 closest_parameter(const Surface& S, const Vec3& x, double& dist)
{
    ShWorkspace ws;
    Vec3 u = x.norm() > 0.0 ? Vec3(x.normalized()) : Vec3::UnitZ();
    for (int it = 0; it < 30; ++it) {
        Vec3 X;
        Mat3 D;
        S.shape->eval(u, X, D, ws);
        Vec3 e1, e2;
        tangent_frame(u, e1, e2);
        Eigen::Matrix<double, 3, 2> T;
        T.col(0) = D * e1;
        T.col(1) = D * e2;
        const Eigen::Vector2d step = T.colPivHouseholderQr().solve(x - X);
        double len = step.norm();
        Eigen::Vector2d st = step;
        if (len > 0.2) st *= 0.2 / len;
        u = (u + st[0] * e1 + st[1] * e2).normalized();
        if (len < 1e-13) break;
    }
    Vec3 X;
    Mat3 D;
    S.shape->eval(u, X, D, ws);
    dist = (x - X).norm();
    return u;
}

// Polar rule around the closest point of the surface, graded towards it.
SurfaceSample sample_near(const Surface& S, const Vec3& x)
{
    double dist = 0.0;
    const Vec3 c = closest_parameter(S, x, dist);
    Vec3 e1, e2;
    tangent_frame(c, e1, e2);
    ShWorkspace ws;
    const double scale = S.at(c, ws).X.norm();
    const double a = std::max(dist / scale, 1e-8) / 4.0;
    std::vector<double> edges{0.0};
    for (double t = a; t < pi; t *= 2.0) edges.push_back(t);
    if (pi - edges.back() < 0.5 * (edges.back() - edges[edges.size() - 2])) edges.back() = pi;
    else edges.push_back(pi);

    const int ng = 12;
    const int nphi = std::max(64, 4 * S.L() + 8);
    std::vector<double> gx, gw;
    gauss_legendre(ng, gx, gw);
    const int nt = ng * static_cast<int>(edges.size() - 1);
    MatX u(nt * nphi, 3);
    VecX w(nt * nphi);
    int k = 0;
    for (size_t e = 0; e + 1 < edges.size(); ++e) {
        const double lo = edges[e], hi = edges[e + 1];
        for (int g = 0; g < ng; ++g) {
            const double th = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gx[g];
            const double wt = 0.5 * (hi - lo) * gw[g] * std::sin(th) * 2.0 * pi / nphi;
            for (int b = 0; b < nphi; ++b) {
                const double ph = 2.0 * pi * b / nphi;
                const Vec3 v = std::sin(th) * std::cos(ph) * e1 + std::sin(th) * std::sin(ph) * e2 +
                               std::cos(th) * c;
                u.row(k) = v.normalized().transpose();
                w[k++] = wt;
            }
        }
    }
    return sample_surface_points(S, u, w);
}

VectorField sample_density(const SurfaceSample& s, const HelmholtzDensity& j)
{
    const CVecX p = pad_mean(j.p), q = pad_mean(j.q);
    VectorField out(s.size(), 3);
    for (int a = 0; a < 3; ++a) out.col(a) = rmul(s.G[a], p) + rmul(s.R[a], q);
    return out;
}

CVecX sample_divergence(const Surface& S, const SurfaceSample& s, const HelmholtzDensity& j)
{
    return rmul(s.Y, CVecX(laplace_coeffs(S, pad_mean(j.p))));
}

// smooth rule is used beyond this many sample spacings from the surface
static constexpr double near_spacings = 6.0;

static double sample_spacing(const SurfaceSample& s) { return std::sqrt(s.wJ.sum() / s.size()); }

bool near_surface(const SurfaceSample& s, const Vec3& x)
{
    const double d = (s.X.rowwise() - x.transpose()).rowwise().norm().minCoeff();
    return d < near_spacings * sample_spacing(s);
}

void check_targets(const Surface& S, const MatX& targets, double tol)
{
    for (int t = 0; t < targets.rows(); ++t) {
        const Vec3 x = targets.row(t).transpose();
        const double r = x.norm();
        bool on = false;
        if (S.shape->star_shaped() && r > 0.0) {
            on = std::abs(r - S.shape->radial(x / r)) < tol;
        } else {
            double dist = 0.0;
            closest_parameter(S, x, dist);
            on = dist < tol;
        }
        if (on) throw TargetOnSurface("target " + std::to_string(t) + " lies on the surface");
    }
}

namespace {


CVec3 electric_point(const SurfaceSample& s, double kappa, const VectorField& jv, const Vec3& x)
{
    CVec3 acc = CVec3::Zero();
    for (int k = 0; k < s.size(); ++k) {
        const Vec3 d = x - s.X.row(k).transpose();
        const KernelFull kf = helmholtz_full(kappa, d.norm());
        const CVec3 jk = jv.row(k).transpose();
        const cplx a = s.wJ[k] * (kappa * kf.G + kf.g1 / kappa);
        const cplx c = s.wJ[k] * kf.g2 * dotu(jk, d) / kappa;
        acc += a * jk + c * d.cast<cplx>();
    }
    return acc;
}

CVec3 magnetic_point(const SurfaceSample& s, double kappa, const VectorField& jv, const Vec3& x)
{
    CVec3 acc = CVec3::Zero();
    for (int k = 0; k < s.size(); ++k) {
        const Vec3 d = x - s.X.row(k).transpose();
        const KernelFull kf = helmholtz_full(kappa, d.norm());
        acc += s.wJ[k] * kf.g1 * crossu(d, CVec3(jv.row(k).transpose()));
    }
    return acc;
}

}  // namespace

CVecX single_layer(const Surface& S, double kappa, const CVecX& coeffs, const MatX& targets)
{
    check_targets(S, targets);
    const SurfaceSample s = sample_surface(S, default_oversampling(S));
    CVecX out(targets.rows());
    for (int t = 0; t < targets.rows(); ++t) {
        const Vec3 x = targets.row(t).transpose();
        const SurfaceSample ns = near_surface(s, x) ? sample_near(S, x) : SurfaceSample{};
        const SurfaceSample& q = ns.size() > 0 ? ns : s;
        const CVecX u = rmul(q.Y, coeffs);
        cplx acc = 0.0;
        for (int k = 0; k < q.size(); ++k) {
            const double r = (x - q.X.row(k).transpose()).norm();
            acc += q.wJ[k] * helmholtz_full(kappa, r).G * u[k];
        }
        out[t] = acc;
    }
    return out;
}

// grad of V[div j] is written as the integral of Hess G j, which holds for
// tangential j on a closed surface and avoids projecting div j onto degree L.
CMatX electric_potential(const Surface& S, const SurfaceSample& s, double kappa,
                         const HelmholtzDensity& j, const MatX& targets)
{
    const VectorField jv = sample_density(s, j);
    CMatX out(targets.rows(), 3);
    parallel_for(static_cast<int>(targets.rows()), [&](int b, int e) {
        for (int t = b; t < e; ++t) {
            const Vec3 x = targets.row(t).transpose();
            if (near_surface(s, x)) {
                const SurfaceSample ns = sample_near(S, x);
                out.row(t) = electric_point(ns, kappa, sample_density(ns, j), x).transpose();
            } else {
                out.row(t) = electric_point(s, kappa, jv, x).transpose();
            }
        }
    });
    return out;
}

CMatX magnetic_potential(const Surface& S, const SurfaceSample& s, double kappa,
                         const HelmholtzDensity& j, const MatX& targets)
{
    const VectorField jv = sample_density(s, j);
    CMatX out(targets.rows(), 3);
    parallel_for(static_cast<int>(targets.rows()), [&](int b, int e) {
        for (int t = b; t < e; ++t) {
            const Vec3 x = targets.row(t).transpose();
            if (near_surface(s, x)) {
                const SurfaceSample ns = sample_near(S, x);
                out.row(t) = magnetic_point(ns, kappa, sample_density(ns, j), x).transpose();
            } else {
                out.row(t) = magnetic_point(s, kappa, jv, x).transpose();
            }
        }
    });
    return out;
}

CMatX electric_potential(const Surface& S, double kappa, const HelmholtzDensity& j, const MatX& targets)
{
    check_targets(S, targets);
    return electric_potential(S, sample_surface(S, default_oversampling(S)), kappa, j, targets);
}

CMatX magnetic_potential(const Surface& S, double kappa, const HelmholtzDensity& j, const MatX& targets)
{
    check_targets(S, targets);
    return magnetic_potential(S, sample_surface(S, default_oversampling(S)), kappa, j, targets);
}

FarFieldPair far_field_operators(const Surface& S, double kappa, const HelmholtzDensity& j,
                                 const MatX& directions)
{
    const SurfaceSample s = sample_surface(S, default_oversampling(S));
    const VectorField jv = sample_density(s, j);
    FarFieldPair f;
    f.E.resize(directions.rows(), 3);
    f.M.resize(directions.rows(), 3);
    for (int t = 0; t < directions.rows(); ++t) {
        const Vec3 x = directions.row(t).transpose().normalized();
        CVec3 acc = CVec3::Zero();
        for (int k = 0; k < s.size(); ++k) {
            const cplx e = s.wJ[k] * std::exp(-I * (kappa * x.dot(s.X.row(k).transpose())));
            acc += e * jv.row(k).transpose();
        }
        const CVec3 xc = x.cast<cplx>();
        f.E.row(t) = (kappa * (acc - xc * dotu(acc, x))).transpose();
        f.M.row(t) = (I * kappa * crossu(x, acc)).transpose();
    }
    return f;
}

}  // namespace maxshape
