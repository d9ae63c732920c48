#include <benchmark/benchmark.h>

#include "noisegap/simulate.hpp"

using namespace noisegap;

namespace {

void BM_SampleEigenvalues(benchmark::State& state) {
  EnsembleSpec spec;
  spec.p = static_cast<int>(state.range(0));
  spec.n = 10 * spec.p;
  spec.t_profile = {{1.0, 0.5}, {4.0, 0.5}};
  std::uint64_t trial = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_eigenvalues(spec, trial++));
}
BENCHMARK(BM_SampleEigenvalues)->Arg(50)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace
