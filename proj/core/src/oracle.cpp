#include "maxshape/oracle.hpp"

#include "maxshape/errors.hpp"

#include <cmath>

namespace maxshape {

namespace {

// Riccati-Bessel psi_n(z) = z j_n(z), xi_n(z) = z h_n(z) and derivatives
struct Riccati {
    std::vector<double> psi, dpsi;
    std::vector<cplx> xi, dxi;
};

Riccati riccati(int N, double z)
{
    Riccati r;
    r.psi.resize(N + 1);
    r.dpsi.resize(N + 1);
    r.xi.resize(N + 1);
    r.dxi.resize(N + 1);
    std::vector<double> j(N + 2), y(N + 2);
    for (int n = 0; n <= N + 1; ++n) {
        j[n] = std::sph_bessel(n, z);
        y[n] = std::sph_neumann(n, z);
    }
    for (int n = 1; n <= N; ++n) {
        // (z f_n)' = z f_{n-1} - n f_n
        r.psi[n] = z * j[n];
        r.dpsi[n] = z * j[n - 1] - n * j[n];
        r.xi[n] = z * cplx(j[n], y[n]);
        r.dxi[n] = z * cplx(j[n - 1], y[n - 1]) - double(n) * cplx(j[n], y[n]);
    }
    return r;
}

}  // namespace

MieCoefficients mie_coefficients(double radius, const Material& mat, int nterms)
{
    if (!(radius > 0.0)) throw InputError("sphere radius must be positive");
    const double ke = mat.kappa_e(), ki = mat.kappa_i();
    const double x = ke * radius;
    const double m = ki / ke;
    const int N = nterms > 0 ? nterms : static_cast<int>(std::ceil(x)) + 15;
    const Riccati out = riccati(N, x), in = riccati(N, m * x);
    MieCoefficients c;
    c.a.resize(N);
    c.b.resize(N);
    const double mu = mat.mu_e, mu1 = mat.mu_i;
    for (int n = 1; n <= N; ++n) {
        const double ps = out.psi[n], dps = out.dpsi[n];
        const cplx xs = out.xi[n], dxs = out.dxi[n];
        const double pi_ = in.psi[n], dpi = in.dpsi[n];
        c.a[n - 1] = (mu * m * pi_ * dps - mu1 * ps * dpi) / (mu * m * pi_ * dxs - mu1 * xs * dpi);
        c.b[n - 1] = (mu1 * pi_ * dps - mu * m * ps * dpi) / (mu1 * pi_ * dxs - mu * m * xs * dpi);
        if (!std::isfinite(std::abs(c.a[n - 1])) || !std::isfinite(std::abs(c.b[n - 1])))
            throw SeriesNotConverged("non-finite Mie coefficient at order " + std::to_string(n));
    }
    double cmax = 0.0;
    for (int n = 0; n < N; ++n) cmax = std::max({cmax, std::abs(c.a[n]), std::abs(c.b[n])});
    const double tail = std::max(std::abs(c.a[N - 1]), std::abs(c.b[N - 1]));
    if (cmax > 0.0 && tail >= 1e-14 * cmax)
        throw SeriesNotConverged("Mie tail " + std::to_string(tail / cmax) + " relative to the largest term");
    return c;
}

namespace {

// x polarised wave along e3 of the frame (e1, e2, e3)
CVec3 far_field_x(const MieCoefficients& c, double k, const Vec3& e1, const Vec3& e2, const Vec3& e3,
                  const Vec3& xhat)
{
    const double ct = std::clamp(xhat.dot(e3), -1.0, 1.0);
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    const double px = xhat.dot(e1), py = xhat.dot(e2);
    double cp = 1.0, sp = 0.0;
    if (st > 1e-300) {
        cp = px / st;
        sp = py / st;
    }
    const Vec3 th = ct * cp * e1 + ct * sp * e2 - st * e3;
    const Vec3 ph = -sp * e1 + cp * e2;

    cplx S1 = 0.0, S2 = 0.0;
    double pim1 = 0.0, pin = 1.0;
    for (int n = 1; n <= c.nterms(); ++n) {
        const double tau = n * ct * pin - (n + 1) * pim1;
        const double f = (2.0 * n + 1.0) / (n * (n + 1.0));
        S1 += f * (c.a[n - 1] * pin + c.b[n - 1] * tau);
        S2 += f * (c.a[n - 1] * tau + c.b[n - 1] * pin);
        const double next = ((2.0 * n + 1.0) * ct * pin - (n + 1.0) * pim1) / n;
        pim1 = pin;
        pin = next;
    }
    const cplx pref = 4.0 * pi * I / k;
    return pref * (cp * S2 * th.cast<cplx>() - sp * S1 * ph.cast<cplx>());
}

}  // namespace

CMatX mie_far_field(double radius, const Material& mat, const PlaneWave& wave, const MatX& directions,
                    int nterms)
{
    wave.validate();
    const MieCoefficients c = mie_coefficients(radius, mat, nterms);
    const Vec3 e3 = wave.d;
    Vec3 e1, e2;
    tangent_frame(e3, e1, e2);
    const cplx p1 = dotu(wave.p, e1), p2 = dotu(wave.p, e2);
    const double k = mat.kappa_e();
    CMatX out(directions.rows(), 3);
    for (int t = 0; t < directions.rows(); ++t) {
        const Vec3 x = directions.row(t).transpose().normalized();
        const CVec3 f = p1 * far_field_x(c, k, e1, e2, e3, x) + p2 * far_field_x(c, k, e2, -e1, e3, x);
        out.row(t) = f.transpose();
    }
    return out;
}

CMatX mie_radius_derivative(double radius, const Material& mat, const PlaneWave& wave,
                            const MatX& directions, double h, int nterms)
{
    if (!(h > 0.0) || h >= 0.5 * radius) throw InputError("step must satisfy 0 < h < a/2");
    auto D = [&](double s) {
        return CMatX((mie_far_field(radius + s, mat, wave, directions, nterms) -
                      mie_far_field(radius - s, mat, wave, directions, nterms)) /
                     (2.0 * s));
    };
    return (4.0 * D(0.5 * h) - D(h)) / 3.0;
}

}  // namespace maxshape
