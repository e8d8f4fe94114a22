#include <benchmark/benchmark.h>

#include "fairnn/loaders.hpp"
#include "fairnn/losses.hpp"
#include "fairnn/model.hpp"
#include "fairnn/rng.hpp"
#include "fairnn/train.hpp"

using namespace fairnn;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform();
  return m;
}

FairNNConfig adult_config() {
  const Schema schema = adult_schema();
  FairNNConfig c;
  c.input_dim = encoded_width(schema);
  c.layout = output_layout(schema);
  return c;
}

void BM_MatMul(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Matrix a = random_matrix(512, n, 1), b = random_matrix(n, 64, 2);
  for (auto _ : state) {
    Matrix c = a * b;
    benchmark::DoNotOptimize(c.data());
  }
}
BENCHMARK(BM_MatMul)->Arg(32)->Arg(105);

void BM_TrainingStep(benchmark::State& state) {
  FairNN model = FairNN::initialize(adult_config(), 3);
  Matrix x = random_matrix(512, 105, 4);
  std::vector<std::uint8_t> labels(512), mask(512);
  for (std::size_t i = 0; i < 512; ++i) {
    labels[i] = static_cast<std::uint8_t>(i % 3 == 0);
    mask[i] = static_cast<std::uint8_t>(i % 2);
  }
  for (auto _ : state) {
    const StepObjective obj = batch_objective(model, x, labels, mask, 0.9, 0.2);
    adam_step(model.params(), obj.gradients, 0.002);
  }
}
BENCHMARK(BM_TrainingStep)->Unit(benchmark::kMillisecond);

void BM_KlGaussian(benchmark::State& state) {
  const Matrix z = random_matrix(512, 10, 5);
  std::vector<std::uint8_t> mask(512);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = static_cast<std::uint8_t>(i % 3 == 0);
  const auto groups = fit_group_gaussians(z, mask);
  for (auto _ : state) benchmark::DoNotOptimize(kl_gaussian(groups->first, groups->second));
}
BENCHMARK(BM_KlGaussian);

}  // namespace
BENCHMARK_MAIN();
