#include <doctest.h>

#include "maxshape/errors.hpp"
#include "maxshape/oracle.hpp"
#include "maxshape/quadrature.hpp"
#include "maxshape/shapederiv.hpp"

#include <cmath>
#include <functional>
#include <random>

using namespace maxshape;

namespace {

Surface bumpy(GridPtr g)
{
    VecX rho = VecX::Zero(sh_count(3));
    rho[0] = std::sqrt(4 * pi);
    rho[sh_index(2, 0)] = 0.15;
    rho[sh_index(3, -2)] = 0.1;
    return build_surface(g, 3, rho);
}

// band-limited field from a function on S^2, exact for polynomials of degree <= L
DeformationField field_from(int L, const std::function<Vec3(const Vec3&)>& f)
{
    auto g = make_grid(L, 2 * L + 2);
    MatX v(g->size(), 3);
    for (int i = 0; i < g->size(); ++i) v.row(i) = f(g->node(i)).transpose();
    return DeformationField::coefficients(L, {g->analysis(VecX(v.col(0))), g->analysis(VecX(v.col(1))),
                                              g->analysis(VecX(v.col(2)))});
}

DeformationField smooth_xi()
{
    std::array<VecX, 3> c;
    for (auto& v : c) v = VecX::Zero(sh_count(3));
    c[0][sh_index(1, 1)] = 0.09;
    c[1][sh_index(2, 1)] = 0.06;
    c[2][sh_index(3, 0)] = 0.075;
    c[2][0] = 0.03;
    return DeformationField::coefficients(3, c);
}

MatX some_directions()
{
    MatX D(5, 3);
    D << 0, 0, 1, 1, 0, 0, 0, 0.6, 0.8, -0.48, 0.6, -0.64, 0, 0, -1;
    return D;
}

double rel(const CMatX& a, const CMatX& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_CASE("third radial kernel factor is the derivative of the second")
{
    for (double k : {0.0, 1.3}) {
        for (double r : {0.3, 1.0, 2.7}) {
            const double h = 1e-4;
            const cplx fd = (helmholtz_full(k, r + h).g2 - helmholtz_full(k, r - h).g2) / (2 * h * r);
            const cplx g3 = helmholtz_full(k, r).g3;
            CHECK(std::abs(fd - g3) < 1e-6 * std::abs(g3));
        }
    }
}

TEST_CASE("operator derivatives match differences of assembled matrices")
{
    auto g = make_grid(6, 14);
    const Surface S = build_sphere(g, 1.0);
    // Y_2^0 times the normal
    const DeformationField xi = field_from(4, [](const Vec3& u) { return (3 * u.z() * u.z() - 1) * u; });
    const double h = 1e-4, k = 1.4;
    const Surface P = deform(S, xi, h), M = deform(S, xi, -h);
    const CMatX fC = (assemble_C(P, k).mat - assemble_C(M, k).mat) / (2 * h);
    const CMatX fM = (assemble_M(P, k).mat - assemble_M(M, k).mat) / (2 * h);
    const CMatX f0 = (assemble_C0star(P).mat - assemble_C0star(M).mat) / (2 * h);
    CHECK(rel(d_operator(DOp::C, S, k, xi).mat, fC) < 1e-5);
    CHECK(rel(d_operator(DOp::M, S, k, xi).mat, fM) < 1e-5);
    CHECK(rel(d_operator(DOp::C0star, S, k, xi).mat, f0) < 1e-5);
    CHECK_THROWS_AS(d_operator(DOp::C, S, 0.0, xi), AssemblyFailure);
}

TEST_CASE("operator derivatives vanish under translation")
{
    auto g = make_grid(6, 14);
    const Surface S = bumpy(g);
    const auto xi = DeformationField::constant(Vec3(0.3, -0.2, 0.5));
    const Material m{2.25, 1.0, 1.2, 1.0, 1.0, 1.0};
    const BoundaryOperators B = assemble_operators(S, m);
    const BoundaryOperators d = d_boundary_operators(S, m, xi);
    CHECK(d.Ci.mat.norm() < 1e-8 * B.Ci.mat.norm());
    CHECK(d.Mi.mat.norm() < 1e-8 * B.Mi.mat.norm());
    CHECK(d.Ce.mat.norm() < 1e-8 * B.Ce.mat.norm());
    CHECK(d.Me.mat.norm() < 1e-8 * B.Me.mat.norm());
    CHECK(d.C0s.mat.norm() < 1e-8 * B.C0s.mat.norm());
}

TEST_CASE("far field operator derivative against deformed surfaces")
{
    auto g = make_grid(8, 18);
    const Surface S = bumpy(g);
    const DeformationField xi = smooth_xi();
    std::mt19937 gen(3);
    std::normal_distribution<double> nd;
    HelmholtzDensity j = HelmholtzDensity::zero(8);
    for (int c = 0; c < sh_count(5) - 1; ++c) {
        j.p[c] = cplx(nd(gen), nd(gen));
        j.q[c] = cplx(nd(gen), nd(gen));
    }
    const MatX D = some_directions();
    const double k = 1.2;
    const FarFieldPair d = d_far_field_operators(S, k, xi, j, D);
    double prev = 0.0;
    for (double h : {1e-2, 1e-3}) {
        const FarFieldPair p = far_field_operators(deform(S, xi, h), k, j, D);
        const FarFieldPair m = far_field_operators(deform(S, xi, -h), k, j, D);
        const double e = rel(d.E, CMatX((p.E - m.E) / (2 * h))) + rel(d.M, CMatX((p.M - m.M) / (2 * h)));
        if (prev > 0.0) CHECK(std::log10(prev / e) >= 1.95);
        prev = e;
    }
    CHECK(prev < 1e-5);
}

TEST_CASE("zero deformation gives zero derivative on every route")
{
    auto g = make_grid(5, 12);
    const Surface S = bumpy(g);
    const Material m{2.25, 1.0, 1.0, 1.0, 1.0, 1.0};
    const auto w = PlaneWave::make(Vec3::UnitZ(), CVec3(1, 0, 0), 1.0);
    const auto xi = DeformationField::constant(Vec3::Zero());
    const MatX D = some_directions();
    const ScatteringSolution sol = solve(S, m, w);
    CHECK(d_solution_routeA(sol, xi, D).dfar.norm() == doctest::Approx(0.0));
    CHECK(d_solution_routeB(sol, xi, D).dfar.norm() == doctest::Approx(0.0));
    CHECK(d_solution_routeC(S, m, w, xi, 1e-3, D).dfar.norm() < 1e-12);
}

TEST_CASE("translation shifts the far field phase")
{
    auto g = make_grid(8, 18);
    const Surface S = bumpy(g);
    const Material m{2.25, 1.0, 1.2, 1.0, 1.0, 1.0};
    const auto w = PlaneWave::make(Vec3(0, 0.6, 0.8), CVec3(1, 0, 0), m.kappa_e());
    const Vec3 t(0.3, -0.2, 0.5);
    const MatX D = some_directions();
    const ScatteringSolution sol = solve(S, m, w);
    const CMatX F = far_field(sol, D);
    CMatX ref(D.rows(), 3);
    for (int r = 0; r < D.rows(); ++r)
        ref.row(r) = I * m.kappa_e() * (t.dot(w.d) - t.dot(D.row(r).transpose().normalized())) * F.row(r);
    const DerivativeResult A = d_solution_routeA(sol, DeformationField::constant(t), D);
    CHECK((A.dfar - ref).cwiseAbs().maxCoeff() < 1e-6 * F.cwiseAbs().maxCoeff());
}

TEST_CASE("transmission data vanish without contrast and for tangential fields")
{
    auto g = make_grid(8, 18);
    {
        const Surface S = bumpy(g);
        const Material m{1.7, 1.7, 1.0, 1.0, 1.0, 1.0};
        const auto w = PlaneWave::make(Vec3::UnitX(), CVec3(0, 0, 1), m.kappa_e());
        const TransmissionData T = transmission_rhs(solve(S, m, w), smooth_xi());
        CHECK(T.gD.stacked().cwiseAbs().maxCoeff() < 1e-6);
        CHECK(T.gN.stacked().cwiseAbs().maxCoeff() < 1e-6);
    }
    {
        const Surface S = build_sphere(g, 1.0);
        const Material m{2.25, 1.0, 1.2, 1.0, 1.0, 1.0};
        const auto w = PlaneWave::make(Vec3::UnitZ(), CVec3(1, 0, 0), m.kappa_e());
        // u x grad Y_2^0 is tangential to the sphere
        const DeformationField xi =
            field_from(4, [](const Vec3& u) { return Vec3(u.cross(Vec3(-u.z() * u.x(), -u.z() * u.y(), 1 - u.z() * u.z()))); });
        const ScatteringSolution sol = solve(S, m, w);
        const TransmissionData T = transmission_rhs(sol, xi);
        CHECK(T.gD.stacked().cwiseAbs().maxCoeff() < 1e-14);
        CHECK(T.gN.stacked().cwiseAbs().maxCoeff() < 1e-14);
        const MatX D = some_directions();
        CHECK(d_solution_routeB(sol, xi, D).dfar.norm() < 1e-14);
        CHECK(d_solution_routeA(sol, xi, D).dfar.norm() < 1e-4 * far_field(sol, D).norm());
    }
}

TEST_CASE("routes agree on a non-symmetric surface")
{
    auto g = make_grid(8, 18);
    const Surface S = bumpy(g);
    const Material m{2.5, 1.0, 1.2, 1.0, 1.0, 1.0};
    const auto w = PlaneWave::make(Vec3(0, 0.6, 0.8), CVec3(1, 0, 0), m.kappa_e());
    const DeformationField xi = smooth_xi();
    const MatX D = some_directions();
    MatX probes(2, 3);
    probes << 0.2, 0.1, -0.3, 1.5, 1.0, 0.5;
    const ScatteringSolution sol = solve(S, m, w);
    const DerivativeResult A = d_solution_routeA(sol, xi, D, probes);
    const DerivativeResult B = d_solution_routeB(sol, xi, D, probes);
    const DerivativeResult C = d_solution_routeC(S, m, w, xi, 1e-3, D, probes);
    CHECK(rel(A.dfar, C.dfar) < 1e-6);
    CHECK(rel(A.dnear, C.dnear) < 1e-6);
    CHECK(rel(A.dfar, B.dfar) < 1e-4);
    CHECK(rel(A.dnear, B.dnear) < 1e-3);
    CHECK(B.diagnostics.at("tangency_defect") < 1e-10);

    // linear in xi
    const DeformationField xi2 = DeformationField::constant(Vec3(0.1, 0.0, -0.2));
    const DerivativeResult A2 = d_solution_routeA(sol, xi2, D);
    const DerivativeResult A12 = d_solution_routeA(sol, xi * 2.0 + xi2 * (-0.5), D);
    CHECK(rel(A12.dfar, CMatX(2.0 * A.dfar - 0.5 * A2.dfar)) < 1e-10);
}

TEST_CASE("radius derivative of the sphere matches the Mie series")
{
    auto g = make_grid(8, 18);
    const Surface S = build_sphere(g, 1.0);
    const Material m{2.25, 1.0, 1.0, 1.0, 1.0, 1.0};
    const auto w = PlaneWave::make(Vec3::UnitZ(), CVec3(1, 0, 0), 1.0);
    const MatX D = some_directions();
    const DeformationField xi = DeformationField::position(S.shape);
    const ScatteringSolution sol = solve(S, m, w);
    const CMatX ref = mie_radius_derivative(1.0, m, w, D);
    CHECK(rel(d_solution_routeA(sol, xi, D).dfar, ref) < 1e-4);
    CHECK(rel(d_solution_routeB(sol, xi, D).dfar, ref) < 1e-4);
}

TEST_CASE("probe classification")
{
    auto g = make_grid(6, 14);
    const Surface S = bumpy(g);
    CHECK(inside_surface(S, Vec3(0.1, 0.2, 0.1)));
    CHECK_FALSE(inside_surface(S, Vec3(1.5, 0.2, 0.1)));
    const Surface T = deform(S, DeformationField::constant(Vec3(0.5, 0.0, 0.0)), 1.0);
    CHECK(inside_surface(T, Vec3(1.2, 0.0, 0.0)));
    CHECK_FALSE(inside_surface(T, Vec3(-0.8, 0.0, 0.0)));
}
