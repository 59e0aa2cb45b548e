#include "maxshape/quadrature.hpp"

#include <cmath>

namespace maxshape {

RotatedRule make_rotated_rule(int ntheta, int nphi)
{
    RotatedRule rule;
    rule.ntheta = ntheta;
    rule.nphi = nphi;
    std::vector<double> t, w;
    gauss_legendre(ntheta, t, w);
    for (int a = 0; a < ntheta; ++a) {
        // sum_{n < ntheta} P_n(t) truncates 1/sqrt(2 - 2t)
        double p0 = 1.0, p1 = t[a], sum = 1.0 + (ntheta > 1 ? t[a] : 0.0);
        for (int n = 2; n < ntheta; ++n) {
            const double p2 = ((2.0 * n - 1.0) * t[a] * p1 - (n - 1.0) * p0) / n;
            p0 = p1;
            p1 = p2;
            sum += p2;
        }
        const double st = std::sqrt(std::max(0.0, 1.0 - t[a] * t[a]));
        const double dist = std::sqrt(2.0 - 2.0 * t[a]);
        for (int b = 0; b < nphi; ++b) {
            const double ph = 2.0 * pi * (b + 0.5) / nphi;
            rule.z.emplace_back(st * std::cos(ph), st * std::sin(ph), t[a]);
            const double wr = w[a] * 2.0 * pi / nphi;
            rule.w_reg.push_back(wr);
            rule.w_sing.push_back(wr * sum * dist);
        }
    }
    return rule;
}

static double sinc_series(double x)
{
    double term = 1.0, s = 1.0;
    for (int k = 1; k < 14; ++k) {
        term *= -x * x / ((2.0 * k) * (2.0 * k + 1.0));
        s += term;
    }
    return s;
}

// (x cos x - sin x) / x^3
static double f1(double x)
{
    if (x > 0.5) return (x * std::cos(x) - std::sin(x)) / (x * x * x);
    // sum_{k>=1} (-1)^k 2k/(2k+1)! x^{2k-2}
    double s = 0.0, fact = 6.0, xp = 1.0;
    for (int k = 1; k < 14; ++k) {
        s += ((k % 2) ? -1.0 : 1.0) * 2.0 * k / fact * xp;
        fact *= (2.0 * k + 2.0) * (2.0 * k + 3.0);
        xp *= x * x;
    }
    return s;
}

// (3 sin x - 3 x cos x - x^2 sin x) / x^5
static double f2(double x)
{
    if (x > 0.5) {
        const double c = std::cos(x), s = std::sin(x);
        return (3.0 * s - 3.0 * x * c - x * x * s) / std::pow(x, 5);
    }
    // sum_{k>=2} (-1)^k 4k(k-1)/(2k+1)! x^{2k-4}
    double s = 0.0, fact = 120.0, xp = 1.0;
    for (int k = 2; k < 15; ++k) {
        s += ((k % 2) ? -1.0 : 1.0) * 4.0 * k * (k - 1.0) / fact * xp;
        fact *= (2.0 * k + 2.0) * (2.0 * k + 3.0);
        xp *= x * x;
    }
    return s;
}

KernelSplit helmholtz_split(double kappa, double r)
{
    const double f = 1.0 / (4.0 * pi);
    const double r2 = r * r, r3 = r2 * r, r5 = r3 * r2;
    KernelSplit k{};
    if (kappa == 0.0) {
        k.G_odd = f / r;
        k.g1_odd = -f / r3;
        k.g2_odd = 3.0 * f / r5;
        return k;
    }
    const double x = kappa * r, c = std::cos(x), s = std::sin(x);
    k.G_odd = f * c / r;
    k.G_even = f * kappa * (x > 0.5 ? s / x : sinc_series(x));
    k.g1_odd = -f * (c + x * s) / r3;
    k.g1_even = f * kappa * kappa * kappa * f1(x);
    k.g2_odd = f * (3.0 * c - x * x * c + 3.0 * x * s) / r5;
    k.g2_even = f * std::pow(kappa, 5) * f2(x);
    return k;
}

KernelFull helmholtz_full(double kappa, double r)
{
    const double f = 1.0 / (4.0 * pi);
    const cplx e = std::exp(I * (kappa * r));
    const double r2 = r * r;
    KernelFull k;
    k.G = f * e / r;
    k.g1 = f * e * (I * kappa * r - 1.0) / (r2 * r);
    k.g2 = f * e * (3.0 - 3.0 * I * kappa * r - kappa * kappa * r2) / (r2 * r2 * r);
    const double kr = kappa * r;
    k.g3 = f * e * (-15.0 + 15.0 * I * kr + 6.0 * kr * kr - I * kr * kr * kr) / (r2 * r2 * r2 * r);
    return k;
}

void build_patch(const Surface& S, const RotatedRule& rule, const Vec3& target, int L,
                 TargetPatch& patch, ShWorkspace& ws)
{
    Vec3 e1, e2;
    tangent_frame(target, e1, e2);
    const int n = rule.size();
    const int nsh = sh_count(L);
    patch.n = n;
    patch.u.resize(n);
    patch.geo.resize(n);
    patch.ws.resize(n);
    patch.wr.resize(n);
    patch.Y.resize(nsh, n);
    patch.dY.resize(3 * nsh, n);
    for (int k = 0; k < n; ++k) {
        const Vec3& z = rule.z[k];
        const Vec3 u = (z[0] * e1 + z[1] * e2 + z[2] * target).normalized();
        patch.u[k] = u;
        patch.geo[k] = S.at(u, ws);
        patch.ws[k] = rule.w_sing[k] * patch.geo[k].J;
        patch.wr[k] = rule.w_reg[k] * patch.geo[k].J;
        sh_eval(L, u, patch.Y.col(k).data(), patch.dY.col(k).data(), ws);
    }
}

void patch_vector_basis(const TargetPatch& patch, MatX& BT)
{
    const int nsh = static_cast<int>(patch.Y.rows());
    const int nc = nsh - 1;
    BT.resize(6 * nc, patch.n);
    for (int k = 0; k < patch.n; ++k) {
        const GeomPoint& g = patch.geo[k];
        const double* dy = patch.dY.col(k).data();
        double* out = BT.col(k).data();
        for (int c = 1; c < nsh; ++c) {
            const Vec3 b(dy[3 * c], dy[3 * c + 1], dy[3 * c + 2]);
            const Vec3 gr = g.M * b;
            const Vec3 cu = gr.cross(g.N);
            double* op = out + 3 * (c - 1);
            double* oq = out + 3 * (nc + c - 1);
            for (int a = 0; a < 3; ++a) {
                op[a] = gr[a];
                oq[a] = cu[a];
            }
        }
    }
}

}  // namespace maxshape
