#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "logbarrier/logbarrier.hpp"

namespace {

using namespace logbarrier;

Classifier make_mlp(std::size_t dim, std::size_t hidden, std::size_t classes) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto layer = [&](std::size_t rows, std::size_t cols, Activation act) {
    DenseLayer l{rows, cols, Vector(rows * cols), Vector(rows), act};
    for (double& w : l.weights) w = normal(rng) / std::sqrt(static_cast<double>(cols));
    for (double& b : l.bias) b = 0.1 * normal(rng);
    return l;
  };
  return Classifier({layer(hidden, dim, Activation::kRelu), layer(classes, hidden, Activation::kIdentity)});
}

Vector make_input(std::size_t dim) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector x(dim);
  for (double& v : x) v = u(rng);
  return x;
}

void BM_GapGradient(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const Classifier model = make_mlp(dim, 64, 10);
  const Vector x = make_input(dim);
  const std::size_t c = model.predict(x);
  for (auto _ : state) benchmark::DoNotOptimize(model.gap_and_gradient(x, c, 1));
}
BENCHMARK(BM_GapGradient)->Arg(16)->Arg(256)->Arg(784);

void BM_SmoothLinfGradient(benchmark::State& state) {
  const Vector d = make_input(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(smooth_linf_gradient(d, 10.0));
}
BENCHMARK(BM_SmoothLinfGradient)->Arg(784)->Arg(3072);

void BM_LogBarrier(benchmark::State& state) {
  const std::size_t dim = 64;
  const Classifier model = make_mlp(dim, 32, 10);
  const Vector x = make_input(dim);
  const Sample s{x, model.predict(x)};
  AttackConfig c = state.range(0) == 0 ? AttackConfig::l2_defaults() : AttackConfig::linf_defaults();
  c.outer_iterations = 5;
  c.inner_iterations = 100;
  for (auto _ : state) benchmark::DoNotOptimize(run_logbarrier(model, s, c));
}
BENCHMARK(BM_LogBarrier)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Ifgsm(benchmark::State& state) {
  const std::size_t dim = 64;
  const Classifier model = make_mlp(dim, 32, 10);
  const Vector x = make_input(dim);
  const Sample s{x, model.predict(x)};
  const BaselineConfig c = BaselineConfig::ifgsm_defaults(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(run_ifgsm(model, s, c));
}
BENCHMARK(BM_Ifgsm);

}  // namespace

BENCHMARK_MAIN();
