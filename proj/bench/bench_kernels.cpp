// Parallel kernels against their serial references.
#include <random>

#include <benchmark/benchmark.h>
#include <omp.h>

#include "osqm/coarse_graining.hpp"
#include "osqm/moyal.hpp"
#include "osqm/transition.hpp"

using namespace osqm;

namespace {

MatC random_matrix(int d) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n;
    MatC M(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) M(i, j) = cplx(n(rng), n(rng));
    return M;
}

// Row-major copy for the raw kernels.
std::vector<cplx> row_major(const MatC& M) {
    std::vector<cplx> v(M.size());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) v[i * M.cols() + j] = M(i, j);
    return v;
}

void WeylMap(benchmark::State& st) {
    const int N = int(st.range(0));
    const auto M = row_major(random_matrix(N));
    std::vector<cplx> A(M.size());
    for (auto _ : st) {
        weyl::symbol_1d(M.data(), A.data(), N);
        benchmark::DoNotOptimize(A.data());
    }
}

void WeylMapSerial(benchmark::State& st) {
    const int N = int(st.range(0));
    const auto M = row_major(random_matrix(N));
    std::vector<cplx> A(M.size());
    for (auto _ : st) {
        weyl::symbol_1d_serial(M.data(), A.data(), N);
        benchmark::DoNotOptimize(A.data());
    }
}

CellMask half_plane(const PhaseGrid& g) {
    CellMask m(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) m[i] = g.coord(i, 0) < 0;
    return m;
}

void Quasiprojector(benchmark::State& st) {
    const auto g = PhaseGrid::symmetric(1, int(st.range(0)), 1.0);
    const auto R = half_plane(g);
    for (auto _ : st) benchmark::DoNotOptimize(quasiprojector_operator(R, g));
}

void QuasiprojectorSerial(benchmark::State& st) {
    const auto g = PhaseGrid::symmetric(1, int(st.range(0)), 1.0);
    const auto R = half_plane(g);
    for (auto _ : st) benchmark::DoNotOptimize(quasiprojector_operator_serial(R, g));
}

std::pair<WeylSymbol, WeylSymbol> symbol_pair(const PhaseGrid& g) {
    const int N = g.N();
    return {WeylSymbol(g, weyl::symbol_from_matrix(random_matrix(N), g)),
            WeylSymbol(g, weyl::symbol_from_matrix(random_matrix(N).adjoint(), g))};
}

void Moyal(benchmark::State& st) {
    const auto g = PhaseGrid::symmetric(1, int(st.range(0)), 1.0);
    const auto [A, B] = symbol_pair(g);
    for (auto _ : st) benchmark::DoNotOptimize(moyal_product(A, B));
}

void MoyalSerial(benchmark::State& st) {
    const auto g = PhaseGrid::symmetric(1, int(st.range(0)), 1.0);
    const auto plan = StarProductPlan::make(g);
    const auto [A, B] = symbol_pair(g);
    for (auto _ : st) benchmark::DoNotOptimize(moyal_product_serial(plan, A, B));
}

// Free-particle crossing ensemble; threads from the benchmark argument.
void Ensemble(benchmark::State& st) {
    const auto g = PhaseGrid::symmetric(1, 64, 1.0);
    const auto P = Partition::build(g, BoxSpec{{{0.0}, {}}, {"left", "right"}});
    MatC Pm = momentum_operator(g, 0);
    const auto H = OperatorMatrix::hermitian_op(Pm * Pm / 2.0);
    TrajectoryContext ctx;
    ctx.partition = &P;
    ctx.dynamics = Dynamics::oracle(H, g);
    ctx.schedule = {0.05, 0.25, 2.0, ScheduleMode::periodic};
    const auto psi0 = coherent_state(g, PhasePoint{{-3.0}, {2.0}});
    const int before = omp_get_max_threads();
    omp_set_num_threads(int(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(run_ensemble(psi0, ctx, 1, 64));
    omp_set_num_threads(before);
}

}  // namespace

BENCHMARK(WeylMap)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(WeylMapSerial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(Quasiprojector)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(QuasiprojectorSerial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(Moyal)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(MoyalSerial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(Ensemble)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
