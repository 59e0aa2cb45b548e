#include <doctest.h>

#include "maxshape/bio.hpp"
#include "maxshape/errors.hpp"

#include <cmath>
#include <random>

using namespace maxshape;

namespace {

CVecX random_coeffs(int L, int Lmax, unsigned seed)
{
    std::mt19937 gen(seed);
    std::normal_distribution<double> nd;
    CVecX c = CVecX::Zero(sh_count(L));
    for (int k = 1; k < sh_count(Lmax); ++k) c[k] = cplx(nd(gen), nd(gen));
    return c;
}

Surface bumpy(GridPtr g)
{
    VecX rho = VecX::Zero(sh_count(2));
    rho[0] = std::sqrt(4 * pi);
    rho[sh_index(2, 1)] = 0.12;
    rho[sh_index(1, -1)] = 0.05;
    return build_surface(g, 2, rho);
}

// i k j_n(k) h_n(k), the single layer eigenvalue on the unit sphere
cplx sphere_eigenvalue(int n, double k)
{
    if (k == 0.0) return 1.0 / (2.0 * n + 1.0);
    const double j = std::sph_bessel(n, k), y = std::sph_neumann(n, k);
    return I * k * j * cplx(j, y);
}

}  // namespace

TEST_CASE("single layer eigenvalues on the unit sphere")
{
    const int L = 12;
    auto g = make_grid(L, 2 * L + 2);
    const Surface S = build_sphere(g, 1.0);
    for (double k : {0.0, 1.5}) {
        const auto I = on_surface_integrals(S, {{k, false, false}});
        const CMatX V = rmul(MatX(g->Y.transpose() * g->weights.asDiagonal()), I.VS[0]);
        double worst = 0.0;
        for (int n = 0; n <= L; ++n)
            for (int m = -n; m <= n; ++m) {
                const int c = sh_index(n, m);
                CVecX e = V.col(c);
                e[c] -= sphere_eigenvalue(n, k);
                worst = std::max(worst, e.cwiseAbs().maxCoeff());
            }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("boundary operators are diagonal on the sphere")
{
    const int L = 8;
    auto g = make_grid(L, 2 * L + 2);
    const Surface S = build_sphere(g, 1.0);
    const auto B = assemble_operators(S, Material{2.5, 1.2, 1.0, 1.0, 1.1, 1.0});
    for (const auto* b : {&B.Ci, &B.Mi, &B.Ce, &B.Me, &B.C0s}) {
        CMatX off = b->mat;
        const int n = b->n();
        for (int r = 0; r < 2 * n; ++r)
            for (int s = 0; s < 2; ++s) off(r, (r % n) + s * n) = 0.0;
        INFO(b->name);
        CHECK(off.cwiseAbs().maxCoeff() < 1e-9 * b->mat.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("curl of the magnetic potential is kappa times the electric potential")
{
    const int L = 8;
    auto g = make_grid(L, 2 * L + 2);
    const Surface S = bumpy(g);
    const HelmholtzDensity j{L, drop_mean(random_coeffs(L, 6, 1)), drop_mean(random_coeffs(L, 6, 2))};
    const double k = 1.3;
    const Vec3 x(0.6, 1.4, -0.9);
    const double h = 1e-4;
    MatX pts(6, 3);
    for (int a = 0; a < 3; ++a) {
        pts.row(2 * a) = (x + h * Vec3::Unit(a)).transpose();
        pts.row(2 * a + 1) = (x - h * Vec3::Unit(a)).transpose();
    }
    const CMatX Hm = magnetic_potential(S, k, j, pts);
    auto d = [&](int a, int c) { return (Hm(2 * a, c) - Hm(2 * a + 1, c)) / (2 * h); };
    const CVec3 curl(d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0));
    const CMatX E = electric_potential(S, k, j, x.transpose());
    const CVec3 Ek = k * E.row(0).transpose();
    CHECK((curl - Ek).norm() < 1e-7 * Ek.norm());
}

TEST_CASE("far field operators match the potentials at large distance")
{
    const int L = 6;
    auto g = make_grid(L, 2 * L + 2);
    const Surface S = bumpy(g);
    const HelmholtzDensity j{L, drop_mean(random_coeffs(L, 5, 3)), drop_mean(random_coeffs(L, 5, 4))};
    const double k = 0.9;
    const Vec3 dir = Vec3(0.3, -0.5, 0.8).normalized();
    const auto F = far_field_operators(S, k, j, dir.transpose());
    double prev = 1e300;
    for (double r : {1e3, 1e4}) {
        const CMatX E = electric_potential(S, k, j, (r * dir).transpose());
        const CMatX M = magnetic_potential(S, k, j, (r * dir).transpose());
        const cplx phase = std::exp(I * (k * r)) / (4 * pi * r);
        const double eE = (E / phase - F.E).norm() / F.E.norm();
        const double eM = (M / phase - F.M).norm() / F.M.norm();
        CHECK(eE < 10.0 / r);
        CHECK(eM < 10.0 / r);
        CHECK(eE < prev);
        prev = eE;
    }
}

TEST_CASE("targets on the surface are rejected")
{
    auto g = make_grid(4, 10);
    const Surface S = build_sphere(g, 1.0);
    const HelmholtzDensity j = HelmholtzDensity::zero(4);
    CHECK_THROWS_AS(electric_potential(S, 1.0, j, Vec3(0, 0.6, 0.8).transpose()), TargetOnSurface);
}
