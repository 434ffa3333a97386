#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "glpin/elliptic.hpp"
#include "glpin/kernels.hpp"
#include "glpin/pinning.hpp"

using namespace glpin;
namespace kn = glpin::kernels;

namespace {

struct Setup {
  GridPtr g;
  LatticeCoefficients c;
  std::vector<kn::cplx> v;
  std::vector<double> tx, ty;
  std::vector<kn::cplx> gv;
  std::vector<double> gx, gy;

  explicit Setup(int n) : g(build_grid(DomainSpec::disk(1.0), n)) {
    c = coefficients_F(ScalarField(g, 1.0), 0.01);
    const int N = g->size();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    v.resize(N);
    tx.assign(N, 0.0);
    ty.assign(N, 0.0);
    for (int k = 0; k < N; ++k) {
      v[k] = {uni(rng), uni(rng)};
      tx[k] = 0.1 * uni(rng);
      ty[k] = 0.1 * uni(rng);
    }
    gv.resize(N);
    gx.resize(N);
    gy.resize(N);
  }
};

void BM_LatticeParallel(benchmark::State& st) {
  Setup s(static_cast<int>(st.range(0)));
  const auto p = s.c.problem(10.0, true);
  for (auto _ : st) benchmark::DoNotOptimize(kn::lattice_energy(p, s.v, s.tx, s.ty, {s.gv, s.gx, s.gy}).total());
}

void BM_LatticeSerial(benchmark::State& st) {
  Setup s(static_cast<int>(st.range(0)));
  const auto p = s.c.problem(10.0, true);
  for (auto _ : st)
    benchmark::DoNotOptimize(kn::lattice_energy_serial(p, s.v, s.tx, s.ty, {s.gv, s.gx, s.gy}).total());
}

struct StencilSetup {
  std::vector<double> diag, x, y;
  std::vector<int> nbr;
  explicit StencilSetup(int n) {
    const int N = n * n;
    diag.assign(N, 4.0);
    x.assign(N, 1.0);
    y.assign(N, 0.0);
    nbr.assign(4 * N, -1);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int u = j * n + i;
        if (i + 1 < n) nbr[4 * u] = u + 1;
        if (i > 0) nbr[4 * u + 1] = u - 1;
        if (j + 1 < n) nbr[4 * u + 2] = u + n;
        if (j > 0) nbr[4 * u + 3] = u - n;
      }
  }
};

void BM_StencilParallel(benchmark::State& st) {
  StencilSetup s(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    kn::apply({s.diag, s.nbr}, s.x, s.y);
    benchmark::ClobberMemory();
  }
}

void BM_StencilSerial(benchmark::State& st) {
  StencilSetup s(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    kn::apply_serial({s.diag, s.nbr}, s.x, s.y);
    benchmark::ClobberMemory();
  }
}

void BM_DotParallel(benchmark::State& st) {
  std::vector<double> a(static_cast<std::size_t>(st.range(0)), 1.0), b(a);
  for (auto _ : st) benchmark::DoNotOptimize(kn::dot(a, b));
}

void BM_DotSerial(benchmark::State& st) {
  std::vector<double> a(static_cast<std::size_t>(st.range(0)), 1.0), b(a);
  for (auto _ : st) benchmark::DoNotOptimize(kn::dot_serial(a, b));
}

void BM_ScreenedSolve(benchmark::State& st) {
  auto g = build_grid(DomainSpec::disk(1.0), static_cast<int>(st.range(0)));
  ScalarField rhs(g);
  for (auto _ : st)
    benchmark::DoNotOptimize(solve_dirichlet(OperatorKind::screened, rhs, [](Point2) { return 1.0; }).values[0]);
}

}  // namespace

BENCHMARK(BM_LatticeParallel)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LatticeSerial)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StencilParallel)->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_StencilSerial)->Arg(256)->Arg(512)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DotParallel)->Arg(1 << 18)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DotSerial)->Arg(1 << 18)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ScreenedSolve)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
