#include "maxshape/sh.hpp"

#include <cmath>

namespace maxshape {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = 0.0;
        for (int k = 1; k <= n; ++k) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

void ShWorkspace::resize(int L)
{
    const std::size_t s = static_cast<std::size_t>(L + 2) * (L + 2);
    if (P.size() < s) {
        P.assign(s, 0.0);
        dP.assign(s, 0.0);
        mP.assign(s, 0.0);
    }
}

void sh_eval(int L, const Vec3& u, double* Y, double* grad)
{
    ShWorkspace ws;
    sh_eval(L, u, Y, grad, ws);
}

void sh_eval(int L, const Vec3& u, double* Y, double* grad, ShWorkspace& ws)
{
    ws.resize(L);
    const int W = L + 2;
    auto P = [&](int n, int m) -> double& { return ws.P[n * W + m]; };

    const double x = u[2];
    const double s = std::hypot(u[0], u[1]);
    double cphi = 1.0, sphi = 0.0;
    if (s > 0.0) {
        cphi = u[0] / s;
        sphi = u[1] / s;
    }

    P(0, 0) = 1.0 / std::sqrt(4.0 * pi);
    for (int m = 1; m <= L; ++m)
        P(m, m) = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * P(m - 1, m - 1);
    for (int m = 0; m < L; ++m)
        P(m + 1, m) = std::sqrt(2.0 * m + 3.0) * x * P(m, m);
    for (int m = 0; m <= L; ++m) {
        for (int n = m + 2; n <= L; ++n) {
            const double a = std::sqrt((4.0 * n * n - 1.0) / (double(n) * n - double(m) * m));
            const double b = std::sqrt(((n - 1.0) * (n - 1.0) - double(m) * m) /
                                       (4.0 * (n - 1.0) * (n - 1.0) - 1.0));
            P(n, m) = a * (x * P(n - 1, m) - b * P(n - 2, m));
        }
    }

    const double r2 = std::sqrt(2.0);
    // cos(m phi), sin(m phi)
    double cm = 1.0, sm = 0.0;
    for (int m = 0; m <= L; ++m) {
        if (m > 0) {
            const double c = cm * cphi - sm * sphi;
            sm = sm * cphi + cm * sphi;
            cm = c;
        }
        for (int n = m; n <= L; ++n) {
            const double p = P(n, m);
            if (m == 0) {
                Y[sh_index(n, 0)] = p;
            } else {
                Y[sh_index(n, m)] = r2 * p * cm;
                Y[sh_index(n, -m)] = r2 * p * sm;
            }
            if (!grad) continue;
            double dth;
            if (m == 0) {
                dth = n > 0 ? -std::sqrt(double(n) * (n + 1)) * P(n, 1) : 0.0;
            } else {
                const double up = (m + 1 <= n) ? P(n, m + 1) : 0.0;
                dth = 0.5 * (std::sqrt(double(n + m) * (n - m + 1)) * P(n, m - 1) -
                             std::sqrt(double(n - m) * (n + m + 1)) * up);
            }
            // m P / sin(theta); the ratio stays bounded near the poles
            const double mps = (m == 0) ? 0.0 : m * p / std::max(s, 1e-300);
            const Vec3 th(x * cphi, x * sphi, -s);
            const Vec3 ph(-sphi, cphi, 0.0);
            if (m == 0) {
                double* g = grad + 3 * sh_index(n, 0);
                for (int a = 0; a < 3; ++a) g[a] = th[a] * dth;
            } else {
                double* gc = grad + 3 * sh_index(n, m);
                double* gs = grad + 3 * sh_index(n, -m);
                for (int a = 0; a < 3; ++a) {
                    gc[a] = r2 * (th[a] * dth * cm - ph[a] * mps * sm);
                    gs[a] = r2 * (th[a] * dth * sm + ph[a] * mps * cm);
                }
            }
        }
    }
}

void tangent_frame(const Vec3& u, Vec3& e1, Vec3& e2)
{
    Vec3 a = std::abs(u[0]) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    e1 = (a - a.dot(u) * u).normalized();
    e2 = u.cross(e1);
}

}  // namespace maxshape
