#include <doctest.h>

#include "maxshape/errors.hpp"
#include "maxshape/surfcalc.hpp"

#include <cmath>
#include <random>

using namespace maxshape;

namespace {

Surface bumpy(GridPtr g)
{
    VecX rho = VecX::Zero(sh_count(3));
    rho[0] = std::sqrt(4 * pi);
    rho[sh_index(2, 0)] = 0.15;
    rho[sh_index(3, -2)] = 0.1;
    rho[sh_index(1, 1)] = 0.05;
    return build_surface(g, 3, rho);
}

CVecX random_coeffs(int L, int Lmax, unsigned seed)
{
    std::mt19937 gen(seed);
    std::normal_distribution<double> nd;
    CVecX c = CVecX::Zero(sh_count(L));
    for (int k = 1; k < sh_count(Lmax); ++k) c[k] = cplx(nd(gen), nd(gen));
    return c;
}

double rel(const CVecX& a, const CVecX& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace

TEST_CASE("gradients of harmonics on the unit sphere")
{
    auto g = make_grid(10, 22);
    const Surface S = build_sphere(g, 1.0);
    for (int n = 1; n <= 10; ++n)
        for (int m = -n; m <= n; ++m) {
            const int c = sh_index(n, m);
            double s = 0.0;
            for (int a = 0; a < 3; ++a)
                s += (g->weights.array() * S.J.array() * S.G[a].col(c).array().square()).sum();
            CHECK(s == doctest::Approx(n * (n + 1.0)).epsilon(1e-10));
        }
}

TEST_CASE("Laplace-Beltrami eigenvalues on the sphere")
{
    const int L = 12;
    auto g = make_grid(L, 2 * L + 2);
    const Surface S = build_sphere(g, 1.0);
    for (int n = 0; n <= L - 2; ++n)
        for (int m = -n; m <= n; ++m) {
            const ScalarField Y = g->Y.col(sh_index(n, m)).cast<cplx>();
            const ScalarField lap = laplace_beltrami(S, Y);
            CHECK((lap + n * (n + 1.0) * Y).cwiseAbs().maxCoeff() < 1e-8);
        }
}

TEST_CASE("surface identities hold to rounding on a deformed surface")
{
    auto g = make_grid(10, 22);
    const Surface S = bumpy(g);
    const CVecX cu = random_coeffs(10, 8, 1);
    const ScalarField u = g->synthesis(cu);
    const VectorField j = density_field(S, HelmholtzDensity{10, drop_mean(random_coeffs(10, 7, 2)),
                                                            drop_mean(random_coeffs(10, 7, 3))});
    const double su = u.cwiseAbs().maxCoeff();
    CHECK(surface_scalar_curl(S, surface_gradient(S, u)).cwiseAbs().maxCoeff() < 1e-10 * su * 100);
    CHECK(surface_divergence(S, tangential_vector_curl(S, u)).cwiseAbs().maxCoeff() < 1e-10 * su * 100);
    VectorField nj(S.size(), 3);
    for (int i = 0; i < S.size(); ++i)
        nj.row(i) = crossu(Vec3(S.Nrm.row(i).transpose()), CVec3(j.row(i).transpose())).transpose();
    const ScalarField d1 = surface_divergence(S, nj), c1 = surface_scalar_curl(S, j);
    CHECK((d1 + c1).cwiseAbs().maxCoeff() < 1e-10 * c1.cwiseAbs().maxCoeff());
    const ScalarField d2 = surface_scalar_curl(S, nj), c2 = surface_divergence(S, j);
    CHECK((d2 - c2).cwiseAbs().maxCoeff() < 1e-10 * c2.cwiseAbs().maxCoeff());
}

TEST_CASE("divergence and gradient are dual, curls are dual")
{
    auto g = make_grid(10, 22);
    const Surface S = bumpy(g);
    const VectorField j = density_field(S, HelmholtzDensity{10, drop_mean(random_coeffs(10, 9, 4)),
                                                            drop_mean(random_coeffs(10, 9, 5))});
    const ScalarField phi = g->synthesis(random_coeffs(10, 6, 6));
    const VecX wJ = g->weights.cwiseProduct(S.J);
    auto integrate = [&](const ScalarField& f) { return (wJ.cast<cplx>().array() * f.array()).sum(); };
    auto inner = [&](const VectorField& a, const VectorField& b) {
        return integrate((a.array() * b.array()).rowwise().sum().matrix());
    };
    const cplx lhs1 = integrate(surface_divergence(S, j).cwiseProduct(phi));
    const cplx rhs1 = -inner(j, surface_gradient(S, phi));
    CHECK(std::abs(lhs1 - rhs1) < 1e-9 * std::abs(rhs1));
    const cplx lhs2 = integrate(surface_scalar_curl(S, j).cwiseProduct(phi));
    const cplx rhs2 = inner(j, tangential_vector_curl(S, phi));
    CHECK(std::abs(lhs2 - rhs2) < 1e-9 * std::abs(rhs2));
}

TEST_CASE("Helmholtz decomposition recovers resolved densities")
{
    auto g = make_grid(10, 22);
    const Surface S = bumpy(g);
    const HelmholtzDensity h{10, drop_mean(random_coeffs(10, 8, 7)), drop_mean(random_coeffs(10, 8, 8))};
    const VectorField j = density_field(S, h);
    const HelmholtzDensity r = helmholtz_decompose(S, j);
    CHECK(rel(r.p, h.p) < 1e-10);
    CHECK(rel(r.q, h.q) < 1e-10);
    CHECK((density_field(S, r) - j).norm() / j.norm() < 1e-8);
}

TEST_CASE("inverse Laplace-Beltrami")
{
    auto g = make_grid(10, 22);
    const Surface S = build_sphere(g, 1.0);
    const ScalarField one = ScalarField::Ones(S.size());
    CHECK_THROWS_AS(laplace_beltrami_inverse(S, one), NonZeroMean);
    const ScalarField f = g->synthesis(random_coeffs(10, 6, 9));
    const ScalarField u = laplace_beltrami_inverse(S, f);
    CHECK((laplace_beltrami(S, u) - f).cwiseAbs().maxCoeff() < 1e-10 * f.cwiseAbs().maxCoeff());
    CHECK_THROWS_AS(surface_operator(S, SurfaceOp::divergence, AnyField(f)), KindMismatch);
    CHECK_THROWS_AS(d_surface_operator(S, DeformationField::constant(Vec3(1, 0, 0)),
                                       SurfaceOp::gradient, AnyField(VectorField(S.size(), 3))),
                    KindMismatch);
}

TEST_CASE("translation does not change surface operators")
{
    auto g = make_grid(8, 18);
    const Surface S = bumpy(g);
    const auto xi = DeformationField::constant(Vec3(0.2, 0.1, -0.3));
    CHECK(d_normal(S, xi).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(d_jacobian(S, xi).cwiseAbs().maxCoeff() < 1e-14);
    const ScalarField u = g->synthesis(random_coeffs(8, 6, 10));
    const auto dg = std::get<VectorField>(d_surface_operator(S, xi, SurfaceOp::gradient, u));
    CHECK(dg.cwiseAbs().maxCoeff() < 1e-14);
}
