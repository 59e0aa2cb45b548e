#include "maxshape/oracle.hpp"
#include "maxshape/shapederiv.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace maxshape;

namespace {

Surface bumpy(int L)
{
    VecX rho = VecX::Zero(sh_count(3));
    rho[0] = std::sqrt(4 * pi);
    rho[sh_index(2, 0)] = 0.15;
    rho[sh_index(3, -2)] = 0.1;
    return build_surface(make_grid(L, 2 * L + 2), 3, rho);
}

const Material kMat{2.25, 1.0, 1.0, 1.0, 1.0, 1.0};

DeformationField smooth_xi()
{
    std::array<VecX, 3> c;
    for (auto& v : c) v = VecX::Zero(sh_count(3));
    c[0][sh_index(2, 0)] = 0.1;
    c[1][sh_index(3, 1)] = 0.1;
    return DeformationField::coefficients(3, c);
}

void BM_sh_analysis(benchmark::State& st)
{
    const int L = static_cast<int>(st.range(0));
    auto g = make_grid(L, 2 * L + 2);
    CVecX f = CVecX::Random(g->size());
    for (auto _ : st) benchmark::DoNotOptimize(g->analysis(f));
}
BENCHMARK(BM_sh_analysis)->Arg(8)->Arg(16)->Arg(32);

void BM_build_surface(benchmark::State& st)
{
    for (auto _ : st) benchmark::DoNotOptimize(bumpy(static_cast<int>(st.range(0))));
}
BENCHMARK(BM_build_surface)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_assemble_operators(benchmark::State& st)
{
    const Surface S = bumpy(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(assemble_operators(S, kMat));
}
BENCHMARK(BM_assemble_operators)->Arg(6)->Arg(8)->Arg(12)->Unit(benchmark::kSecond);

void BM_solve(benchmark::State& st)
{
    const Surface S = bumpy(static_cast<int>(st.range(0)));
    const auto w = PlaneWave::make(Vec3::UnitZ(), CVec3(1, 0, 0), 1.0);
    for (auto _ : st) benchmark::DoNotOptimize(solve(S, kMat, w));
}
BENCHMARK(BM_solve)->Arg(6)->Arg(8)->Unit(benchmark::kSecond);

void BM_far_field(benchmark::State& st)
{
    const Surface S = bumpy(8);
    const auto w = PlaneWave::make(Vec3::UnitZ(), CVec3(1, 0, 0), 1.0);
    const ScatteringSolution sol = solve(S, kMat, w);
    const MatX D = make_grid(8, 18)->nodes;
    for (auto _ : st) benchmark::DoNotOptimize(far_field(sol, D));
}
BENCHMARK(BM_far_field)->Unit(benchmark::kMillisecond);

void BM_route(benchmark::State& st)
{
    const Surface S = bumpy(static_cast<int>(st.range(0)));
    const auto w = PlaneWave::make(Vec3::UnitZ(), CVec3(1, 0, 0), 1.0);
    const ScatteringSolution sol = solve(S, kMat, w);
    const DeformationField xi = smooth_xi();
    const MatX D = make_grid(6, 14)->nodes;
    for (auto _ : st) {
        if (st.range(1) == 0) benchmark::DoNotOptimize(d_solution_routeA(sol, xi, D));
        else benchmark::DoNotOptimize(d_solution_routeB(sol, xi, D));
    }
}
BENCHMARK(BM_route)->Args({6, 0})->Args({6, 1})->Args({8, 0})->Args({8, 1})->Unit(benchmark::kSecond);

void BM_mie(benchmark::State& st)
{
    const auto w = PlaneWave::make(Vec3::UnitZ(), CVec3(1, 0, 0), 1.0);
    const MatX D = make_grid(16, 34)->nodes;
    for (auto _ : st) benchmark::DoNotOptimize(mie_far_field(static_cast<double>(st.range(0)), kMat, w, D));
}
BENCHMARK(BM_mie)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
