#include "maxshape/shapederiv.hpp"

#include "maxshape/errors.hpp"
#include "maxshape/parallel.hpp"
#include "maxshape/quadrature.hpp"

#include <chrono>
#include <cmath>

namespace maxshape {

namespace {

// real versions of the pointwise derivative formulas, used on basis functions
inline Vec3 dgrad_real(const Mat3& G, const Vec3& N, const Vec3& g)
{
    return -G * g + g.dot(G * N) * N;
}

inline Vec3 dcurl_real(const Mat3& G, double div, const Vec3& r) { return G.transpose() * r - div * r; }

// out(3 col + a, k) = (B(3 col .., k) x X_k)_a
void cross_columns(const MatX& B, const std::vector<Vec3>& X, MatX& out)
{
    const int nv = static_cast<int>(B.rows() / 3);
    const int n = static_cast<int>(B.cols());
    out.resize(B.rows(), n);
    for (int k = 0; k < n; ++k) {
        const Vec3& x = X[k];
        const double* b = B.col(k).data();
        double* o = out.col(k).data();
        for (int col = 0; col < nv; ++col) {
            const double* j = b + 3 * col;
            o[3 * col] = j[1] * x[2] - j[2] * x[1];
            o[3 * col + 1] = j[2] * x[0] - j[0] * x[2];
            o[3 * col + 2] = j[0] * x[1] - j[1] * x[0];
        }
    }
}

inline CVec3 packed(const MatX& P, int col, int c)
{
    return CVec3(cplx(P(3 * col, c), P(3 * col, c + 1)), cplx(P(3 * col + 1, c), P(3 * col + 1, c + 1)),
                 cplx(P(3 * col + 2, c), P(3 * col + 2, c + 1)));
}

}  // namespace

IntegralPair d_on_surface_integrals(const Surface& S, const DeformationField& xi,
                                    const std::vector<IntegralRequest>& req)
{
    const int N = S.size();
    const int L = S.L();
    const int nsh = sh_count(L);
    const int nc = nsh - 1;
    const int nv = 2 * nc;
    const int R = static_cast<int>(req.size());
    const RotatedRule rule = make_rotated_rule(S.grid->ntheta, S.grid->nphi + S.grid->nphi % 2);
    const DeformationNodes dn = deformation_at_nodes(S, xi);

    bool any_vector = false;
    std::vector<int> mag_slot(R, -1);
    int Rm = 0;
    for (int q = 0; q < R; ++q) {
        any_vector |= req[q].vector || req[q].magnetic;
        if (req[q].magnetic) mag_slot[q] = Rm++;
    }

    IntegralPair out;
    for (SurfaceIntegrals* I : {&out.base, &out.d}) {
        I->req = req;
        I->VJ.resize(R);
        I->MJ.resize(R);
        I->VS.resize(R);
        I->KS.resize(R);
        for (int q = 0; q < R; ++q) {
            I->VS[q].resize(N, nsh);
            if (req[q].vector || req[q].magnetic) I->VJ[q].resize(3 * N, nv);
            if (req[q].magnetic) {
                I->MJ[q].resize(3 * N, nv);
                I->KS[q].resize(N, nsh);
            }
        }
    }

    parallel_for(N, [&](int begin, int end) {
        TargetPatch patch;
        ShWorkspace ws, wsx;
        MatX BT, dBT, BxT, dBxT, BqT;
        MatX KG, KA, K1, K2, KN, KB, Kv, Kd, Kx, PS, PB, PD, PX, PDX, PQ;
        std::vector<Vec3> Xk, xik;
        std::vector<Mat3> Gk;
        std::vector<double> divk;
        for (int i = begin; i < end; ++i) {
            build_patch(S, rule, S.grid->node(i), L, patch, ws);
            const int n = patch.n;
            const Vec3 Xi = S.X.row(i).transpose();
            const Vec3 Ni = S.Nrm.row(i).transpose();
            const Vec3 xii = dn.value.row(i).transpose();
            const Vec3 dNi = -dn.Gxi[i] * Ni;
            Xk.resize(n);
            xik.resize(n);
            Gk.resize(n);
            divk.resize(n);
            for (int k = 0; k < n; ++k) {
                Mat3 D;
                xi.eval(patch.u[k], xik[k], D, wsx);
                Gk[k] = patch.geo[k].M * D.transpose();
                divk[k] = Gk[k].trace();
                Xk[k] = patch.geo[k].X;
            }

            KG.resize(n, 2 * R);
            KA.resize(n, 2 * R);
            K1.resize(n, 2 * Rm);
            K2.resize(n, 2 * Rm);
            KN.resize(n, 2 * Rm);
            KB.resize(n, 2 * Rm);
            for (int k = 0; k < n; ++k) {
                const Vec3 d = Xi - Xk[k];
                const Vec3 dl = xii - xik[k];
                const double r = d.norm();
                const double s = d.dot(dl);
                const double dn_ = d.dot(Ni);
                const double e = dl.dot(Ni) + d.dot(dNi);
                const double wts[2] = {patch.ws[k], patch.wr[k]};
                for (int q = 0; q < R; ++q) {
                    const KernelSplit ks = helmholtz_split(req[q].kappa, r);
                    const double G[2] = {ks.G_odd, ks.G_even};
                    const double g1[2] = {ks.g1_odd, ks.g1_even};
                    const double g2[2] = {ks.g2_odd, ks.g2_even};
                    const int m = mag_slot[q];
                    for (int h = 0; h < 2; ++h) {
                        const double w = wts[h];
                        KG(k, 2 * q + h) = w * G[h];
                        KA(k, 2 * q + h) = w * (g1[h] * s + G[h] * divk[k]);
                        if (m >= 0) {
                            K1(k, 2 * m + h) = w * g1[h];
                            K2(k, 2 * m + h) = w * (g2[h] * s + g1[h] * divk[k]);
                            KN(k, 2 * m + h) = w * g1[h] * dn_;
                            KB(k, 2 * m + h) = w * (g2[h] * s * dn_ + g1[h] * e + g1[h] * dn_ * divk[k]);
                        }
                    }
                }
            }

            // scalar integrals
            Kv.resize(n, 4 * R + 4 * Rm);
            Kv << KG, KA, KN, KB;
            PS.noalias() = patch.Y * Kv;
            for (int q = 0; q < R; ++q) {
                for (int c = 0; c < nsh; ++c) {
                    out.base.VS[q](i, c) = cplx(PS(c, 2 * q), PS(c, 2 * q + 1));
                    out.d.VS[q](i, c) = cplx(PS(c, 2 * R + 2 * q), PS(c, 2 * R + 2 * q + 1));
                }
                const int m = mag_slot[q];
                if (m < 0) continue;
                for (int c = 0; c < nsh; ++c) {
                    const int o = 4 * R + 2 * m, o2 = 4 * R + 2 * Rm + 2 * m;
                    out.base.KS[q](i, c) = cplx(PS(c, o), PS(c, o + 1));
                    out.d.KS[q](i, c) = cplx(PS(c, o2), PS(c, o2 + 1));
                }
            }
            if (!any_vector) continue;

            patch_vector_basis(patch, BT);
            dBT.resize(BT.rows(), n);
            for (int k = 0; k < n; ++k) {
                const Vec3 Nk = patch.geo[k].N;
                for (int col = 0; col < nv; ++col) {
                    const Vec3 j(BT(3 * col, k), BT(3 * col + 1, k), BT(3 * col + 2, k));
                    const Vec3 dj = col < nc ? dgrad_real(Gk[k], Nk, j) : dcurl_real(Gk[k], divk[k], j);
                    dBT.block<3, 1>(3 * col, k) = dj;
                }
            }
            // columns: G, alpha, g1, K2
            Kv.resize(n, 4 * R + 4 * Rm);
            Kv << KG, KA, K1, K2;
            PB.noalias() = BT * Kv;
            Kd.resize(n, 2 * R + 2 * Rm);
            Kd << KG, K1;
            PD.noalias() = dBT * Kd;
            for (int q = 0; q < R; ++q) {
                if (!(req[q].vector || req[q].magnetic)) continue;
                for (int col = 0; col < nv; ++col) {
                    const CVec3 v = packed(PB, col, 2 * q);
                    const CVec3 dv = packed(PB, col, 2 * R + 2 * q) + packed(PD, col, 2 * q);
                    for (int a = 0; a < 3; ++a) {
                        out.base.VJ[q](a * N + i, col) = v[a];
                        out.d.VJ[q](a * N + i, col) = dv[a];
                    }
                }
            }
            if (Rm == 0) continue;
            cross_columns(BT, Xk, BxT);
            cross_columns(dBT, Xk, dBxT);
            cross_columns(BT, xik, BqT);
            Kx.resize(n, 4 * Rm);
            Kx << K1, K2;
            PX.noalias() = BxT * Kx;
            PDX.noalias() = dBxT * K1;
            PQ.noalias() = BqT * K1;
            for (int q = 0; q < R; ++q) {
                const int m = mag_slot[q];
                if (m < 0) continue;
                const int c1 = 4 * R + 2 * m, c2 = 4 * R + 2 * Rm + 2 * m;
                for (int col = 0; col < nv; ++col) {
                    const CVec3 s1 = packed(PB, col, c1);
                    const CVec3 T0 = crossu(s1, Xi) - packed(PX, col, 2 * m);
                    const CVec3 T1 = crossu(packed(PB, col, c2), Xi) - packed(PX, col, 2 * Rm + 2 * m);
                    const CVec3 T2 = crossu(packed(PD, col, 2 * R + 2 * m), Xi) - packed(PDX, col, 2 * m);
                    const CVec3 T3 = crossu(s1, xii) - packed(PQ, col, 2 * m);
                    const CVec3 v = crossu(Ni, T0);
                    const CVec3 dv = crossu(dNi, T0) + crossu(Ni, CVec3(T1 + T2 + T3));
                    for (int a = 0; a < 3; ++a) {
                        out.base.MJ[q](a * N + i, col) = v[a];
                        out.d.MJ[q](a * N + i, col) = dv[a];
                    }
                }
            }
        }
    });
    return out;
}

namespace {

struct DContext {
    const Surface& S;
    DeformationNodes dn;
    MatX Lam, dLam, dA, An;
    int nc;

    DContext(const Surface& s, const DeformationField& xi) : S(s), dn(deformation_at_nodes(s, xi))
    {
        const auto& g = *S.grid;
        nc = S.nsh() - 1;
        Lam = laplace_matrix(S);
        dA = d_stiffness(S, dn);
        const MatX YW = g.Y.transpose() * g.weights.cwiseQuotient(S.J).asDiagonal();
        dLam = YW * g.Y * dA - YW * dn.div.asDiagonal() * g.Y * S.A;
        An = g.Y.transpose() * g.weights.asDiagonal();
    }

    // d(A^{-1} B) for B and its derivative dB
    CMatX dsolve(const CMatX& B, const CMatX& dB) const
    {
        return solve_stiffness(S, CMatX(dB - rmul(dA, solve_stiffness(S, B))));
    }

    // [G xi] w node-wise on 3N x m
    CMatX apply_G(const CMatX& W) const
    {
        const int N = S.size();
        CMatX out = CMatX::Zero(W.rows(), W.cols());
        for (int i = 0; i < N; ++i)
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) out.row(a * N + i) += dn.Gxi[i](a, b) * W.row(b * N + i);
        return out;
    }

    // div xi w - [G xi]^T w + (w . n) [G xi] n
    CMatX apply_D(const CMatX& W) const
    {
        const int N = S.size();
        CMatX out = CMatX::Zero(W.rows(), W.cols());
        for (int i = 0; i < N; ++i) {
            const Mat3& G = dn.Gxi[i];
            const Vec3 n = S.Nrm.row(i).transpose();
            const Vec3 Gn = G * n;
            Eigen::RowVectorXcd wn = Eigen::RowVectorXcd::Zero(W.cols());
            for (int b = 0; b < 3; ++b) wn += n[b] * W.row(b * N + i);
            for (int a = 0; a < 3; ++a) {
                out.row(a * N + i) += dn.div[i] * W.row(a * N + i) + Gn[a] * wn;
                for (int b = 0; b < 3; ++b) out.row(a * N + i) -= G(b, a) * W.row(b * N + i);
            }
        }
        return out;
    }

    CMatX normal_dot_dN(const CMatX& W) const
    {
        const int N = S.size();
        CMatX out = CMatX::Zero(N, W.cols());
        for (int i = 0; i < N; ++i) {
            const Vec3 dN = -dn.Gxi[i] * S.Nrm.row(i).transpose();
            for (int a = 0; a < 3; ++a) out.row(i) += dN[a] * W.row(a * N + i);
        }
        return out;
    }

    CMatX dGal(const CMatX& X) const
    {
        const auto& g = *S.grid;
        const VecX w = g.weights.cwiseProduct(S.J).cwiseProduct(dn.div);
        return rmul(MatX(g.Y.transpose() * w.asDiagonal()), X);
    }
};

OperatorBlock tail_block(const char* name, const Surface& S, double kappa, const CMatX& P, const CMatX& Q)
{
    const int nc = S.nsh() - 1;
    OperatorBlock B;
    B.name = name;
    B.L = S.L();
    B.kappa = kappa;
    B.mat.resize(2 * nc, 2 * nc);
    B.mat.topRows(nc) = P.bottomRows(nc);
    B.mat.bottomRows(nc) = Q.bottomRows(nc);
    return B;
}

// C-type block: P = a A^{-1} Rv VJ, Q = a A^{-1} Dv VJ + b An(VS Lam) on p columns
OperatorBlock d_block_C(const DContext& c, const char* name, double kappa, double a, double b,
                        const CMatX& VJ, const CMatX& dVJ, const CMatX& VS, const CMatX& dVS)
{
    const Surface& S = c.S;
    const CMatX B1 = rmul(S.Rv, VJ);
    const CMatX dB1 = rmul(S.Rv, CMatX(c.apply_G(VJ) + dVJ));
    const CMatX B2 = rmul(S.Dv, VJ);
    const CMatX dB2 = rmul(S.Dv, CMatX(c.apply_D(VJ) + dVJ));
    const CMatX dP = a * c.dsolve(B1, dB1);
    CMatX dQ = a * c.dsolve(B2, dB2);
    const CMatX t = rmul(c.An, CMatX(rmul(c.Lam.transpose(), CMatX(dVS.transpose())).transpose() +
                                     rmul(c.dLam.transpose(), CMatX(VS.transpose())).transpose()));
    dQ.leftCols(c.nc) += b * t.rightCols(c.nc);
    return tail_block(name, S, kappa, dP, dQ);
}

OperatorBlock d_block_M(const DContext& c, double kappa, const CMatX& VJ, const CMatX& dVJ, const CMatX& MJ,
                        const CMatX& dMJ, const CMatX& KS, const CMatX& dKS)
{
    const Surface& S = c.S;
    const int nc = c.nc;
    const double k2 = kappa * kappa;
    const CMatX nVJ = normal_dot(S, VJ);
    const CMatX dnVJ = c.normal_dot_dN(VJ) + normal_dot(S, dVJ);
    const CMatX KL = rmul(c.Lam.transpose(), CMatX(KS.transpose())).transpose();
    const CMatX dKL = rmul(c.Lam.transpose(), CMatX(dKS.transpose())).transpose() +
                      rmul(c.dLam.transpose(), CMatX(KS.transpose())).transpose();
    CMatX g = rmul(S.Gal, CMatX(k2 * nVJ));
    g.leftCols(nc) += rmul(S.Gal, CMatX(KL.rightCols(nc)));
    CMatX dg = c.dGal(k2 * nVJ) + rmul(S.Gal, CMatX(k2 * dnVJ));
    dg.leftCols(nc) += c.dGal(KL.rightCols(nc)) + rmul(S.Gal, CMatX(dKL.rightCols(nc)));
    const CMatX dP = c.dsolve(g, dg);
    const CMatX B = rmul(S.Rv, MJ);
    const CMatX dB = rmul(S.Rv, CMatX(c.apply_G(MJ) + dMJ));
    const CMatX dQ = -c.dsolve(B, dB);
    return tail_block("dM", S, kappa, dP, dQ);
}

}  // namespace

OperatorBlock d_operator(DOp which, const Surface& S, double kappa, const DeformationField& xi)
{
    const DContext c(S, xi);
    switch (which) {
    case DOp::C: {
        if (!(kappa > 0.0)) throw AssemblyFailure("C needs a positive wave number");
        const IntegralPair I = d_on_surface_integrals(S, xi, {{kappa, true, false}});
        return d_block_C(c, "dC", kappa, kappa, 1.0 / kappa, I.base.VJ[0], I.d.VJ[0], I.base.VS[0], I.d.VS[0]);
    }
    case DOp::M: {
        const IntegralPair I = d_on_surface_integrals(S, xi, {{kappa, true, true}});
        return d_block_M(c, kappa, I.base.VJ[0], I.d.VJ[0], I.base.MJ[0], I.d.MJ[0], I.base.KS[0], I.d.KS[0]);
    }
    case DOp::C0star: {
        const IntegralPair I = d_on_surface_integrals(S, xi, {{0.0, true, false}});
        return d_block_C(c, "dC0*", 0.0, 1.0, -1.0, I.base.VJ[0], I.d.VJ[0], I.base.VS[0], I.d.VS[0]);
    }
    default:
        throw InputError("potential and far field derivatives act on densities; use the dedicated functions");
    }
}

BoundaryOperators d_boundary_operators(const Surface& S, const Material& mat, const DeformationField& xi)
{
    const double ki = mat.kappa_i(), ke = mat.kappa_e();
    const IntegralPair I = d_on_surface_integrals(S, xi, {{ki, true, true}, {ke, true, true}, {0.0, true, false}});
    const DContext c(S, xi);
    const auto& b = I.base;
    const auto& d = I.d;
    BoundaryOperators B;
    B.Ci = d_block_C(c, "dC", ki, ki, 1.0 / ki, b.VJ[0], d.VJ[0], b.VS[0], d.VS[0]);
    B.Mi = d_block_M(c, ki, b.VJ[0], d.VJ[0], b.MJ[0], d.MJ[0], b.KS[0], d.KS[0]);
    B.Ce = d_block_C(c, "dC", ke, ke, 1.0 / ke, b.VJ[1], d.VJ[1], b.VS[1], d.VS[1]);
    B.Me = d_block_M(c, ke, b.VJ[1], d.VJ[1], b.MJ[1], d.MJ[1], b.KS[1], d.KS[1]);
    B.C0s = d_block_C(c, "dC0*", 0.0, 1.0, -1.0, b.VJ[2], d.VJ[2], b.VS[2], d.VS[2]);
    for (const auto* o : {&B.Ci, &B.Mi, &B.Ce, &B.Me, &B.C0s})
        if (!o->mat.allFinite()) throw AssemblyFailure(o->name + " has non-finite entries");
    return B;
}

namespace {

struct SampleDeformation {
    std::vector<Vec3> v;
    std::vector<Mat3> G;
    VecX div;
};

SampleDeformation sample_deformation(const SurfaceSample& s, const DeformationField& xi)
{
    SampleDeformation d;
    const int n = s.size();
    d.v.resize(n);
    d.G.resize(n);
    d.div.resize(n);
    ShWorkspace ws;
    for (int k = 0; k < n; ++k) {
        Mat3 D;
        xi.eval(s.u.row(k).transpose(), d.v[k], D, ws);
        d.G[k] = s.M[k] * D.transpose();
        d.div[k] = d.G[k].trace();
    }
    return d;
}

void sample_density_pair(const SurfaceSample& s, const SampleDeformation& sd, const HelmholtzDensity& j,
                         VectorField& jv, VectorField& djv)
{
    const CVecX p = pad_mean(j.p), q = pad_mean(j.q);
    VectorField jg(s.size(), 3), jr(s.size(), 3);
    for (int a = 0; a < 3; ++a) {
        jg.col(a) = rmul(s.G[a], p);
        jr.col(a) = rmul(s.R[a], q);
    }
    jv = jg + jr;
    djv.resize(s.size(), 3);
    for (int k = 0; k < s.size(); ++k) {
        const Vec3 n = s.N.row(k).transpose();
        djv.row(k) = (d_grad_point(sd.G[k], n, jg.row(k).transpose()) +
                      d_curl_point(sd.G[k], sd.div[k], jr.row(k).transpose()))
                         .transpose();
    }
}

CVec3 d_electric_point(const SurfaceSample& s, const SampleDeformation& sd, double kappa,
                       const VectorField& jv, const VectorField& djv, const Vec3& x)
{
    CVec3 acc = CVec3::Zero();
    for (int k = 0; k < s.size(); ++k) {
        const Vec3 d = x - s.X.row(k).transpose();
        const Vec3& xi = sd.v[k];
        const KernelFull kf = helmholtz_full(kappa, d.norm());
        const double sk = -d.dot(xi);
        const CVec3 j = jv.row(k).transpose(), dj = djv.row(k).transpose();
        const cplx dj_ = dotu(j, d);
        const CVec3 dc = d.cast<cplx>(), xc = xi.cast<cplx>();
        const CVec3 base = (kappa * kf.G + kf.g1 / kappa) * j + (kf.g2 / kappa) * dj_ * dc;
        const CVec3 der = (kappa * kf.g1 + kf.g2 / kappa) * sk * j + (kappa * kf.G + kf.g1 / kappa) * dj +
                          (kf.g3 / kappa) * sk * dj_ * dc +
                          (kf.g2 / kappa) * ((dotu(dj, d) - dotu(j, xi)) * dc - dj_ * xc);
        acc += s.wJ[k] * (der + sd.div[k] * base);
    }
    return acc;
}

CVec3 d_magnetic_point(const SurfaceSample& s, const SampleDeformation& sd, double kappa,
                       const VectorField& jv, const VectorField& djv, const Vec3& x)
{
    CVec3 acc = CVec3::Zero();
    for (int k = 0; k < s.size(); ++k) {
        const Vec3 d = x - s.X.row(k).transpose();
        const Vec3& xi = sd.v[k];
        const KernelFull kf = helmholtz_full(kappa, d.norm());
        const double sk = -d.dot(xi);
        const CVec3 j = jv.row(k).transpose(), dj = djv.row(k).transpose();
        const CVec3 dxj = crossu(d, j);
        acc += s.wJ[k] * (kf.g2 * sk * dxj + kf.g1 * (crossu(d, dj) - crossu(xi, j)) + sd.div[k] * kf.g1 * dxj);
    }
    return acc;
}

template <class F>
CMatX d_potential(const Surface& S, double kappa, const DeformationField& xi, const HelmholtzDensity& j,
                  const MatX& targets, F point)
{
    check_targets(S, targets);
    const SurfaceSample s = sample_surface(S, default_oversampling(S));
    const SampleDeformation sd = sample_deformation(s, xi);
    VectorField jv, djv;
    sample_density_pair(s, sd, j, jv, djv);
    CMatX out(targets.rows(), 3);
    parallel_for(static_cast<int>(targets.rows()), [&](int b, int e) {
        for (int t = b; t < e; ++t) {
            const Vec3 x = targets.row(t).transpose();
            if (near_surface(s, x)) {
                const SurfaceSample ns = sample_near(S, x);
                const SampleDeformation nd = sample_deformation(ns, xi);
                VectorField nj, ndj;
                sample_density_pair(ns, nd, j, nj, ndj);
                out.row(t) = point(ns, nd, kappa, nj, ndj, x).transpose();
            } else {
                out.row(t) = point(s, sd, kappa, jv, djv, x).transpose();
            }
        }
    });
    return out;
}

}  // namespace

CMatX d_electric_potential(const Surface& S, double kappa, const DeformationField& xi,
                           const HelmholtzDensity& j, const MatX& targets)
{
    return d_potential(S, kappa, xi, j, targets, d_electric_point);
}

CMatX d_magnetic_potential(const Surface& S, double kappa, const DeformationField& xi,
                           const HelmholtzDensity& j, const MatX& targets)
{
    return d_potential(S, kappa, xi, j, targets, d_magnetic_point);
}

FarFieldPair d_far_field_operators(const Surface& S, double kappa, const DeformationField& xi,
                                   const HelmholtzDensity& j, const MatX& directions)
{
    const SurfaceSample s = sample_surface(S, default_oversampling(S));
    const SampleDeformation sd = sample_deformation(s, xi);
    VectorField jv, djv;
    sample_density_pair(s, sd, j, jv, djv);
    FarFieldPair f;
    f.E.resize(directions.rows(), 3);
    f.M.resize(directions.rows(), 3);
    for (int t = 0; t < directions.rows(); ++t) {
        const Vec3 x = directions.row(t).transpose().normalized();
        CVec3 acc = CVec3::Zero();
        for (int k = 0; k < s.size(); ++k) {
            const cplx e = s.wJ[k] * std::exp(-I * (kappa * x.dot(s.X.row(k).transpose())));
            const cplx wt = sd.div[k] - I * kappa * x.dot(sd.v[k]);
            acc += e * (wt * CVec3(jv.row(k).transpose()) + CVec3(djv.row(k).transpose()));
        }
        const CVec3 xc = x.cast<cplx>();
        f.E.row(t) = (kappa * (acc - xc * dotu(acc, x))).transpose();
        f.M.row(t) = (I * kappa * crossu(x, acc)).transpose();
    }
    return f;
}

IncidentTraces d_incident_traces(const Surface& S, const PlaneWave& wave, const DeformationField& xi)
{
    wave.validate();
    const int N = S.size();
    const DeformationNodes dn = deformation_at_nodes(S, xi);
    const MatX dA = d_stiffness(S, dn);
    VectorField gd(N, 3), gn(N, 3), dgd(N, 3), dgn(N, 3);
    for (int i = 0; i < N; ++i) {
        const Vec3 x = S.X.row(i).transpose();
        const Vec3 n = S.Nrm.row(i).transpose();
        const Vec3 dN = -dn.Gxi[i] * n;
        const Vec3 xv = dn.value.row(i).transpose();
        const CVec3 E = wave.E(x), C = wave.curlE(x) / wave.kappa;
        const cplx ph = I * wave.kappa * wave.d.dot(xv);
        gd.row(i) = crossu(n, E).transpose();
        gn.row(i) = crossu(n, C).transpose();
        dgd.row(i) = (crossu(dN, E) + ph * crossu(n, E)).transpose();
        dgn.row(i) = (crossu(dN, C) + ph * crossu(n, C)).transpose();
    }
    auto decompose = [&](const VectorField& w, const VectorField& dw) {
        const CVecX p = solve_stiffness(S, weak_div(S, w));
        const CVecX q = solve_stiffness(S, CVecX(-weak_curl(S, w)));
        const CVecX dp = solve_stiffness(S, CVecX(d_dstar(S, dn, w) + weak_div(S, dw) - rmul(dA, p)));
        const CVecX dq = solve_stiffness(S, CVecX(-d_rstar(S, dn, w) - weak_curl(S, dw) - rmul(dA, q)));
        return HelmholtzDensity{S.L(), drop_mean(dp), drop_mean(dq)};
    };
    return {decompose(gd, dgd), decompose(gn, dgn)};
}

TransmissionData transmission_rhs(const ScatteringSolution& sol, const DeformationField& xi)
{
    const Surface& S = sol.surface;
    const Material& m = sol.material;
    const int N = S.size();
    const double ki = m.kappa_i(), ke = m.kappa_e();
    const DeformationNodes dn = deformation_at_nodes(S, xi);
    VecX xn(N);
    for (int i = 0; i < N; ++i) xn[i] = dn.value.row(i).dot(S.Nrm.row(i));

    const VectorField uD = density_field(S, sol.uD), uN = density_field(S, sol.uN);
    const ScalarField lapD = laplace_beltrami(S, S.grid->synthesis(pad_mean(sol.uD.p)));
    const ScalarField lapN = laplace_beltrami(S, S.grid->synthesis(pad_mean(sol.uN.p)));
    if (!uD.allFinite() || !uN.allFinite() || !lapD.allFinite() || !lapN.allFinite())
        throw TraceEvaluationFailure("non-finite boundary traces");

    // jumps of n x curl E x n, n . E, n x E x n and curl_G E across the surface
    const double cD = ke * (m.mu_i / m.mu_e - 1.0);
    const double sD = -(ke * m.mu_i / (ki * ki * m.mu_e) - 1.0 / ke);
    const double cN = ki * ki / m.mu_i - ke * ke / m.mu_e;
    const double sN = -(1.0 / m.mu_i - 1.0 / m.mu_e);

    auto build = [&](const VectorField& u, double c, const ScalarField& lap, double sc) {
        VectorField t(N, 3);
        for (int i = 0; i < N; ++i)
            t.row(i) = (-xn[i] * c * crossu(CVec3(u.row(i).transpose()), Vec3(S.Nrm.row(i).transpose())))
                           .transpose();
        HelmholtzDensity h = helmholtz_decompose(S, t);
        const ScalarField f = (xn.cast<cplx>().array() * lap.array()).matrix() * sc;
        h.q += drop_mean(S.grid->analysis(f));
        return h;
    };
    TransmissionData T;
    T.gD = build(uN, cD, lapN, sD);
    T.gN = build(uD, cN, lapD, sN);
    T.gD_nodes = density_field(S, T.gD);
    T.gN_nodes = density_field(S, T.gN);
    double defect = 0.0, scale = 0.0;
    for (const VectorField* g : {&T.gD_nodes, &T.gN_nodes})
        for (int i = 0; i < N; ++i) {
            defect = std::max(defect, std::abs(dotu(CVec3(g->row(i).transpose()), Vec3(S.Nrm.row(i).transpose()))));
            scale = std::max(scale, g->row(i).norm());
        }
    T.tangency_defect = scale > 0.0 ? defect / scale : 0.0;
    return T;
}

bool inside_surface(const Surface& S, const Vec3& x)
{
    const double r = x.norm();
    if (r == 0.0) return true;
    if (S.shape->star_shaped()) return r < S.shape->radial(x / r);
    double dist = 0.0;
    const Vec3 u = closest_parameter(S, x, dist);
    ShWorkspace ws;
    const GeomPoint p = S.at(u, ws);
    return (x - p.X).dot(p.N) < 0.0;
}

namespace {

void split_probes(const Surface& S, const MatX& probes, std::vector<int>& in, std::vector<int>& out)
{
    for (int t = 0; t < probes.rows(); ++t)
        (inside_surface(S, probes.row(t).transpose()) ? in : out).push_back(t);
}

MatX rows_of(const MatX& X, const std::vector<int>& idx)
{
    MatX r(idx.size(), X.cols());
    for (size_t t = 0; t < idx.size(); ++t) r.row(t) = X.row(idx[t]);
    return r;
}

void scatter_rows(CMatX& dst, const CMatX& src, const std::vector<int>& idx)
{
    for (size_t t = 0; t < idx.size(); ++t) dst.row(idx[t]) = src.row(t);
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

DerivativeResult d_solution_routeA(const ScatteringSolution& sol, const DeformationField& xi,
                                   const MatX& directions, const MatX& probes)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Surface& S = sol.surface;
    const Material& mat = sol.material;
    const double ki = mat.kappa_i(), ke = mat.kappa_e(), rho = mat.rho();
    const cplx ieta = I * mat.eta;
    const BoundaryOperators& B = sol.ops;
    const BoundaryOperators dB = d_boundary_operators(S, mat, xi);
    const int n = static_cast<int>(B.Ce.mat.rows());
    const CMatX Id = CMatX::Identity(n, n);
    const CMatX Mih = B.Mi.mat - 0.5 * Id, Meh = B.Me.mat - 0.5 * Id;

    const CMatX dLe = dB.Ce.mat + ieta * (dB.Me.mat * B.C0s.mat + Meh * dB.C0s.mat);
    const CMatX dNe = dB.Me.mat + ieta * (dB.Ce.mat * B.C0s.mat + B.Ce.mat * dB.C0s.mat);
    const CMatX dS = rho * (dB.Mi.mat * sol.sys.Le + Mih * dLe) + dB.Ci.mat * sol.sys.Ne + B.Ci.mat * dNe;

    const IncidentTraces dinc = d_incident_traces(S, sol.wave, xi);
    const CVecX gD = sol.inc.dirichlet.stacked(), gN = sol.inc.neumann.stacked();
    const CVecX dgD = dinc.dirichlet.stacked(), dgN = dinc.neumann.stacked();
    const CVecX drhs = -rho * (dB.Mi.mat * gD + Mih * dgD) - dB.Ci.mat * gN - B.Ci.mat * dgN;

    const CVecX x = sol.j.stacked();
    const CVecX dx = sol.solve_system(drhs - dS * x);
    const int L = S.L();
    const HelmholtzDensity dj = HelmholtzDensity::from_stacked(L, dx);
    const HelmholtzDensity c0 = HelmholtzDensity::from_stacked(L, B.C0s.mat * x);
    const HelmholtzDensity dc0 = HelmholtzDensity::from_stacked(L, dB.C0s.mat * x + B.C0s.mat * dx);

    DerivativeResult r;
    r.route = 'A';
    r.directions = directions;
    const FarFieldPair F1 = d_far_field_operators(S, ke, xi, sol.j, directions);
    const FarFieldPair F2 = far_field_operators(S, ke, dj, directions);
    const FarFieldPair F3 = d_far_field_operators(S, ke, xi, c0, directions);
    const FarFieldPair F4 = far_field_operators(S, ke, dc0, directions);
    r.dfar = -(F1.E + F2.E) - ieta * (F3.M + F4.M);

    r.probes = probes;
    r.dnear = CMatX::Zero(probes.rows(), 3);
    if (probes.rows() > 0) {
        std::vector<int> in, out;
        split_probes(S, probes, in, out);
        if (!out.empty()) {
            const MatX P = rows_of(probes, out);
            const CMatX E = -(d_electric_potential(S, ke, xi, sol.j, P) + electric_potential(S, ke, dj, P)) -
                            ieta * (d_magnetic_potential(S, ke, xi, c0, P) + magnetic_potential(S, ke, dc0, P));
            scatter_rows(r.dnear, E, out);
        }
        if (!in.empty()) {
            const MatX P = rows_of(probes, in);
            const HelmholtzDensity duD = HelmholtzDensity::from_stacked(L, dgD + dLe * x + sol.sys.Le * dx);
            const HelmholtzDensity duN = HelmholtzDensity::from_stacked(L, dgN + dNe * x + sol.sys.Ne * dx);
            const CMatX E =
                -(d_electric_potential(S, ki, xi, sol.uN, P) + electric_potential(S, ki, duN, P)) / rho -
                (d_magnetic_potential(S, ki, xi, sol.uD, P) + magnetic_potential(S, ki, duD, P));
            scatter_rows(r.dnear, E, in);
        }
    }
    r.diagnostics["dS_norm"] = dS.norm();
    r.diagnostics["seconds"] = seconds_since(t0);
    return r;
}

DerivativeResult d_solution_routeB(const ScatteringSolution& sol, const DeformationField& xi,
                                   const MatX& directions, const MatX& probes)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Surface& S = sol.surface;
    const Material& mat = sol.material;
    const double ki = mat.kappa_i(), ke = mat.kappa_e(), rho = mat.rho();
    const cplx ieta = I * mat.eta;
    const int n = static_cast<int>(sol.sys.S.rows());
    const CMatX Mih = sol.ops.Mi.mat - 0.5 * CMatX::Identity(n, n);

    const TransmissionData T = transmission_rhs(sol, xi);
    // the data take the place of (gamma_D E_inc, gamma_N E_inc)
    const CVecX a = T.gD.stacked();
    const CVecX b = (mat.mu_e / ke) * T.gN.stacked();
    const CVecX rhs = -rho * (Mih * a) - sol.ops.Ci.mat * b;
    const CVecX dx = rhs.norm() > 0.0 ? sol.solve_system(rhs) : CVecX(CVecX::Zero(n));
    const int L = S.L();
    const HelmholtzDensity dj = HelmholtzDensity::from_stacked(L, dx);

    DerivativeResult r;
    r.route = 'B';
    r.directions = directions;
    r.dfar = far_field_of_density(sol, dj, directions);
    r.probes = probes;
    r.dnear = CMatX::Zero(probes.rows(), 3);
    if (probes.rows() > 0) {
        std::vector<int> in, out;
        split_probes(S, probes, in, out);
        if (!out.empty()) {
            const MatX P = rows_of(probes, out);
            const HelmholtzDensity c0 = sol.ops.C0s.apply(dj);
            scatter_rows(r.dnear, CMatX(-electric_potential(S, ke, dj, P) - ieta * magnetic_potential(S, ke, c0, P)),
                         out);
        }
        if (!in.empty()) {
            const MatX P = rows_of(probes, in);
            const HelmholtzDensity uD = HelmholtzDensity::from_stacked(L, a + sol.sys.Le * dx);
            const HelmholtzDensity uN = HelmholtzDensity::from_stacked(L, b + sol.sys.Ne * dx);
            scatter_rows(r.dnear,
                         CMatX(-electric_potential(S, ki, uN, P) / rho - magnetic_potential(S, ki, uD, P)), in);
        }
    }
    r.diagnostics["tangency_defect"] = T.tangency_defect;
    r.diagnostics["gD_norm"] = T.gD.stacked().norm();
    r.diagnostics["gN_norm"] = T.gN.stacked().norm();
    r.diagnostics["seconds"] = seconds_since(t0);
    return r;
}

DerivativeResult d_solution_routeC(const Surface& S, const Material& mat, const PlaneWave& wave,
                                   const DeformationField& xi, double h, const MatX& directions,
                                   const MatX& probes)
{
    if (!(h > 0.0)) throw InputError("finite difference step must be positive");
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<int> in, out;
    split_probes(S, probes, in, out);
    CMatX far[2], near[2];
    for (int s = 0; s < 2; ++s) {
        const Surface Sh = deform(S, xi, s == 0 ? h : -h);
        const ScatteringSolution sol = solve(Sh, mat, wave);
        far[s] = far_field(sol, directions);
        near[s] = CMatX::Zero(probes.rows(), 3);
        std::vector<int> in2, out2;
        split_probes(Sh, probes, in2, out2);
        if (in2 != in) throw InputError("a probe point changes sides under the deformation");
        if (!out.empty()) scatter_rows(near[s], scattered_field(sol, rows_of(probes, out)), out);
        if (!in.empty()) scatter_rows(near[s], interior_field(sol, rows_of(probes, in)), in);
    }
    DerivativeResult r;
    r.route = 'C';
    r.directions = directions;
    r.dfar = (far[0] - far[1]) / (2.0 * h);
    r.probes = probes;
    r.dnear = (near[0] - near[1]) / (2.0 * h);
    r.diagnostics["h"] = h;
    r.diagnostics["seconds"] = seconds_since(t0);
    return r;
}

DerivativeResult d_solution_routeA(const Surface& S, const Material& mat, const PlaneWave& wave,
                                   const DeformationField& xi, const MatX& directions, const MatX& probes)
{
    return d_solution_routeA(solve(S, mat, wave), xi, directions, probes);
}

DerivativeResult d_solution_routeB(const Surface& S, const Material& mat, const PlaneWave& wave,
                                   const DeformationField& xi, const MatX& directions, const MatX& probes)
{
    return d_solution_routeB(solve(S, mat, wave), xi, directions, probes);
}

}  // namespace maxshape
