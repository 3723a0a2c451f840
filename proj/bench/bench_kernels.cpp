#include <benchmark/benchmark.h>

#include <random>

#include "eepc/kernels.hpp"
#include "eepc/mlp.hpp"

using namespace eepc;
using kernels::Exec;

namespace {

struct Fixture {
  DenseLayer layer;
  std::vector<double> x, pre, out, grad, gw, gb, gin;

  Fixture(std::size_t batch, std::size_t in, std::size_t width) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 1.0);
    layer = {in, width, std::vector<double>(in * width), std::vector<double>(width, 0.0),
             Activation::elu};
    for (auto& w : layer.weights) w = g(rng);
    x.resize(batch * in);
    for (auto& v : x) v = g(rng);
    pre.resize(batch * width);
    out.resize(batch * width);
    grad.resize(batch * width);
    gw.resize(in * width);
    gb.resize(width);
    gin.resize(batch * in);
  }
};

void forward(benchmark::State& state, Exec exec) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  const auto width = static_cast<std::size_t>(state.range(1));
  Fixture f(batch, width, width);
  for (auto _ : state) {
    kernels::dense_forward(f.layer, f.x, batch, f.pre, f.out, exec);
    benchmark::DoNotOptimize(f.out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * batch));
}

void backward(benchmark::State& state, Exec exec) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  const auto width = static_cast<std::size_t>(state.range(1));
  Fixture f(batch, width, width);
  kernels::dense_forward(f.layer, f.x, batch, f.pre, f.out, Exec::serial);
  for (auto _ : state) {
    std::fill(f.grad.begin(), f.grad.end(), 1.0);
    kernels::dense_backward(f.layer, f.x, f.pre, f.grad, batch, f.gw, f.gb, f.gin, exec);
    benchmark::DoNotOptimize(f.gw.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * batch));
}

void shapes(benchmark::internal::Benchmark* b) {
  for (int width : {16, 128, 1024}) b->Args({128, width});
  b->Args({4096, 128});
}

}  // namespace

BENCHMARK_CAPTURE(forward, serial, Exec::serial)->Apply(shapes);
BENCHMARK_CAPTURE(forward, parallel, Exec::parallel)->Apply(shapes);
BENCHMARK_CAPTURE(backward, serial, Exec::serial)->Apply(shapes);
BENCHMARK_CAPTURE(backward, parallel, Exec::parallel)->Apply(shapes);

BENCHMARK_MAIN();
