#include <benchmark/benchmark.h>

#include <random>

#include "landscape/certify.hpp"
#include "landscape/diff.hpp"
#include "landscape/embed.hpp"
#include "landscape/forward.hpp"
#include "landscape/trainer.hpp"

using namespace landscape;

namespace {

Dataset sample_data(int n, std::uint64_t seed) {
  const Network teacher = init_random({2, 5, 5, 1}, ActivationKind::Sigmoid, 2.0, seed);
  return generate_teacher_dataset(teacher, n, InputSampler{}, seed);
}

// Width of both hidden layers is the benchmark argument.
Network wide_net(int width) {
  return init_random({2, width, width, 1}, ActivationKind::Sigmoid, 1.0, 3);
}

}  // namespace

static void BM_Loss(benchmark::State& state) {
  const Network net = wide_net(static_cast<int>(state.range(0)));
  const Dataset data = sample_data(20, 1);
  for (auto _ : state) benchmark::DoNotOptimize(loss(net, data));
}
BENCHMARK(BM_Loss)->Arg(5)->Arg(21)->Arg(64);

static void BM_Gradient(benchmark::State& state) {
  const Network net = wide_net(static_cast<int>(state.range(0)));
  const Dataset data = sample_data(20, 1);
  for (auto _ : state) benchmark::DoNotOptimize(gradient(net, data));
}
BENCHMARK(BM_Gradient)->Arg(5)->Arg(21)->Arg(64);

static void BM_HessianFd(benchmark::State& state) {
  const Network net = wide_net(static_cast<int>(state.range(0)));
  const Dataset data = sample_data(20, 1);
  for (auto _ : state) benchmark::DoNotOptimize(hessian_fd(net, data).hessian.data());
}
BENCHMARK(BM_HessianFd)->Arg(5)->Arg(21)->Unit(benchmark::kMillisecond);

static void BM_ComputeBD(benchmark::State& state) {
  const Network net = wide_net(static_cast<int>(state.range(0)));
  const Dataset data = sample_data(20, 1);
  for (auto _ : state) benchmark::DoNotOptimize(compute_bd(net, data, 2, 0).d_norm);
}
BENCHMARK(BM_ComputeBD)->Arg(5)->Arg(21);

static void BM_Probe(benchmark::State& state) {
  const Network net = wide_net(21);
  const Dataset data = sample_data(20, 1);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(probe_random_directions(net, data, k, default_probe_radii(), 1).global_min_delta);
  }
  state.SetItemsProcessed(state.iterations() * k);
}
BENCHMARK(BM_Probe)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
