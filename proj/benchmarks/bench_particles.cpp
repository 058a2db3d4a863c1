// SPDX-License-Identifier: Apache-2.0
//
// Serial reference vs OpenMP particle kernels. The two paths are
// bit-identical (see test_parallel_kernels); this target measures the speedup
// only. Run: ./bench_particles [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include "rislam/particle_filter.hpp"

using namespace rislam;

namespace {

ParticleSet make_set(int n_p) {
  SplitMix64 rng(404);
  return initialize_global(
      Eigen::AlignedBox3d(Vec3(0, 0, 0), Vec3(40, 50, 0)), n_p, rng);
}

const GravityVector kG = GravityVector::from_magnitude(9.81);
const ImuMotionParams kParams{1.5, 0.005};

void bench_predict(benchmark::State& state, Execution exec) {
  ParticleSet set = make_set(static_cast<int>(state.range(0)));
  std::uint64_t step = 0;
  for (auto _ : state) {
    predict_imu(set, Vec3(0.4, 0.1, 9.81), Rotation3::identity(), ImuBias{},
                kParams, kG, 0.14, mix_seed(7, ++step), 1e-3, exec);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bench_weight(benchmark::State& state, Execution exec) {
  ParticleSet set = make_set(static_cast<int>(state.range(0)));
  BeaconMap map;
  map.entries["b00"] = BeaconEntry{Vec3(20, 25, 2), 0.5};
  const RangeMeasurement z{0.0, "b00", 6.0};
  const RangeNoise noise{5.0};
  for (auto _ : state) {
    update_weights(set, z, map, noise, exec);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(bench_predict, serial, Execution::Serial)
    ->Arg(300)->Arg(10000)->Arg(100000);
BENCHMARK_CAPTURE(bench_predict, openmp, Execution::Parallel)
    ->Arg(300)->Arg(10000)->Arg(100000);
BENCHMARK_CAPTURE(bench_weight, serial, Execution::Serial)
    ->Arg(300)->Arg(10000)->Arg(100000);
BENCHMARK_CAPTURE(bench_weight, openmp, Execution::Parallel)
    ->Arg(300)->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
