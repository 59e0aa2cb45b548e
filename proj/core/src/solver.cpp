#include "maxshape/solver.hpp"

#include "maxshape/errors.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace maxshape {

PlaneWave PlaneWave::make(const Vec3& d, const CVec3& p, double kappa)
{
    PlaneWave w;
    w.d = d;
    w.p = p;
    w.kappa = kappa;
    w.validate();
    return w;
}

void PlaneWave::validate() const
{
    if (std::abs(d.norm() - 1.0) > 1e-12) throw InputError("wave direction must be a unit vector");
    if (std::abs(dotu(p, d)) >= 1e-12) throw InputError("polarization must be orthogonal to the direction");
    if (!(kappa > 0.0)) throw InputError("wave number must be positive");
}

CVec3 PlaneWave::E(const Vec3& x) const { return p * std::exp(I * (kappa * d.dot(x))); }

CVec3 PlaneWave::curlE(const Vec3& x) const
{
    return I * kappa * crossu(d, p) * std::exp(I * (kappa * d.dot(x)));
}

IncidentTraces incident_traces(const Surface& S, const PlaneWave& wave)
{
    wave.validate();
    const int N = S.size();
    VectorField gd(N, 3), gn(N, 3);
    for (int i = 0; i < N; ++i) {
        const Vec3 x = S.X.row(i).transpose();
        const Vec3 n = S.Nrm.row(i).transpose();
        gd.row(i) = crossu(n, wave.E(x)).transpose();
        gn.row(i) = (crossu(n, wave.curlE(x)) / wave.kappa).transpose();
    }
    return {helmholtz_decompose(S, gd), helmholtz_decompose(S, gn)};
}

SystemOperators combine_operators(const BoundaryOperators& B, const Material& mat)
{
    const int n = static_cast<int>(B.Ce.mat.rows());
    const CMatX Id = CMatX::Identity(n, n);
    const cplx ieta = I * mat.eta;
    SystemOperators s;
    s.Le = B.Ce.mat + ieta * ((B.Me.mat - 0.5 * Id) * B.C0s.mat);
    s.Ne = (B.Me.mat - 0.5 * Id) + ieta * (B.Ce.mat * B.C0s.mat);
    s.S = mat.rho() * ((B.Mi.mat - 0.5 * Id) * s.Le) + B.Ci.mat * s.Ne;
    return s;
}

OperatorBlock assemble_S(const Surface& S, const Material& mat)
{
    const SystemOperators s = combine_operators(assemble_operators(S, mat), mat);
    OperatorBlock B;
    B.name = "S";
    B.L = S.L();
    B.kappa = mat.kappa_e();
    B.mat = s.S;
    return B;
}

CVecX ScatteringSolution::solve_system(const CVecX& rhs) const
{
    CVecX x = lu.solve(rhs);
    const double nb = std::max(rhs.norm(), 1e-300);
    double res = (sys.S * x - rhs).norm() / nb;
    if (res > 1e-9) {
        x += lu.solve(rhs - sys.S * x);
        res = (sys.S * x - rhs).norm() / nb;
    }
    if (rhs.norm() > 0.0 && res > 1e-9)
        throw NoConvergence("relative residual " + std::to_string(res) + " after refinement");
    return x;
}

ScatteringSolution solve(const Surface& S, const Material& mat, const PlaneWave& wave)
{
    if (std::abs(wave.kappa - mat.kappa_e()) > 1e-12 * mat.kappa_e())
        throw InputError("wave number of the incident wave differs from the exterior wave number");
    ScatteringSolution sol{S, mat, wave, assemble_operators(S, mat), {}, {}, {}, {}, {}, {}, 0.0, 0.0};
    sol.sys = combine_operators(sol.ops, mat);

    Eigen::BDCSVD<CMatX> svd(sol.sys.S);
    const auto& sv = svd.singularValues();
    sol.condition = sv[0] / sv[sv.size() - 1];
    if (!(sv[sv.size() - 1] > 1e-13 * sv[0]))
        throw SingularSystem("condition number " + std::to_string(sol.condition));
    sol.lu.compute(sol.sys.S);

    sol.inc = incident_traces(S, wave);
    const int n = static_cast<int>(sol.sys.S.rows());
    const CMatX Id = CMatX::Identity(n, n);
    const CVecX gD = sol.inc.dirichlet.stacked(), gN = sol.inc.neumann.stacked();
    const CVecX rhs = -mat.rho() * ((sol.ops.Mi.mat - 0.5 * Id) * gD) - sol.ops.Ci.mat * gN;
    const CVecX x = sol.solve_system(rhs);
    sol.residual = (sol.sys.S * x - rhs).norm() / std::max(rhs.norm(), 1e-300);
    sol.j = HelmholtzDensity::from_stacked(S.L(), x);
    sol.uD = HelmholtzDensity::from_stacked(S.L(), gD + sol.sys.Le * x);
    sol.uN = HelmholtzDensity::from_stacked(S.L(), gN + sol.sys.Ne * x);
    return sol;
}

CMatX far_field_of_density(const ScatteringSolution& sol, const HelmholtzDensity& j, const MatX& directions)
{
    const double ke = sol.material.kappa_e();
    const FarFieldPair a = far_field_operators(sol.surface, ke, j, directions);
    const FarFieldPair b = far_field_operators(sol.surface, ke, sol.ops.C0s.apply(j), directions);
    return -a.E - I * sol.material.eta * b.M;
}

CMatX far_field(const ScatteringSolution& sol, const MatX& directions)
{
    return far_field_of_density(sol, sol.j, directions);
}

CMatX scattered_field(const ScatteringSolution& sol, const MatX& targets)
{
    const Surface& S = sol.surface;
    check_targets(S, targets);
    const double ke = sol.material.kappa_e();
    const SurfaceSample s = sample_surface(S, default_oversampling(S));
    return -electric_potential(S, s, ke, sol.j, targets) -
           I * sol.material.eta * magnetic_potential(S, s, ke, sol.ops.C0s.apply(sol.j), targets);
}

CMatX interior_field(const ScatteringSolution& sol, const MatX& targets)
{
    const Surface& S = sol.surface;
    check_targets(S, targets);
    const double ki = sol.material.kappa_i();
    const SurfaceSample s = sample_surface(S, default_oversampling(S));
    return -electric_potential(S, s, ki, sol.uN, targets) / sol.material.rho() -
           magnetic_potential(S, s, ki, sol.uD, targets);
}

}  // namespace maxshape
