#include <benchmark/benchmark.h>

#include <vector>

#include "noisegap/solver.hpp"

using namespace noisegap;
using namespace std::complex_literals;

namespace {

JointSpectrum two_bulk() {
  const std::vector<SpectralAtom> atoms{{0, 1, 0.5}, {0, 4, 0.5}};
  return joint_spectrum_from_atoms(atoms);
}

void BM_SolvePrimal(benchmark::State& state) {
  const auto h = two_bulk();
  const cplx z(1.0, 1.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_primal(z, 0.1, h));
}
BENCHMARK(BM_SolvePrimal)->Arg(10)->Arg(1000);

void BM_Continuation(benchmark::State& state) {
  const auto h = two_bulk();
  for (auto _ : state) benchmark::DoNotOptimize(continuation_solve(1.0, 1e-5, 0.1, h));
}
BENCHMARK(BM_Continuation);

}  // namespace
