#include <benchmark/benchmark.h>

#include <vector>

#include "noisegap/density.hpp"

using namespace noisegap;

namespace {

void BM_DensityGrid(benchmark::State& state) {
  const std::vector<SpectralAtom> atoms{{0, 1, 0.5}, {0, 4, 0.5}};
  const auto h = joint_spectrum_from_atoms(atoms);
  const int points = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(density_grid(0.05, 8.0, points, 0.1, h, {}, 1e-5));
  state.SetItemsProcessed(state.iterations() * points);
}
BENCHMARK(BM_DensityGrid)->Arg(256)->Arg(1600)->Unit(benchmark::kMillisecond);

}  // namespace
