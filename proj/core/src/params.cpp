#include "fairnn/params.hpp"

#include <cmath>
#include <string>

#include "fairnn/rng.hpp"

namespace fairnn {

ParamStore ParamStore::glorot(const std::vector<std::pair<std::size_t, std::size_t>>& shapes,
                              std::uint64_t seed) {
  ParamStore store;
  Rng rng(seed);
  for (const auto& [fan_in, fan_out] : shapes) {
    if (fan_in == 0 || fan_out == 0) throw DimensionError("glorot: zero-width layer");
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    DenseLayer layer{Matrix(fan_in, fan_out), Matrix::Zero(1, fan_out)};
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = rng.uniform(-limit, limit);
    store.layers_.push_back(std::move(layer));
  }
  store.reset_adam();
  return store;
}

Matrix& ParamStore::tensor(std::size_t i) {
  if (i >= tensor_count()) throw DimensionError("parameter tensor index out of range");
  return i % 2 == 0 ? layers_[i / 2].weight : layers_[i / 2].bias;
}

const Matrix& ParamStore::tensor(std::size_t i) const {
  if (i >= tensor_count()) throw DimensionError("parameter tensor index out of range");
  return i % 2 == 0 ? layers_[i / 2].weight : layers_[i / 2].bias;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < tensor_count(); ++i) n += static_cast<std::size_t>(tensor(i).size());
  return n;
}

void ParamStore::reset_adam() {
  adam_.first.clear();
  adam_.second.clear();
  for (std::size_t i = 0; i < tensor_count(); ++i) {
    adam_.first.push_back(Matrix::Zero(tensor(i).rows(), tensor(i).cols()));
    adam_.second.push_back(Matrix::Zero(tensor(i).rows(), tensor(i).cols()));
  }
  adam_.step = 0;
}

ParamGradients ParamStore::zero_gradients() const {
  ParamGradients g;
  for (std::size_t i = 0; i < tensor_count(); ++i) g.push_back(Matrix::Zero(tensor(i).rows(), tensor(i).cols()));
  return g;
}

void ParamStore::check_gradients(const ParamGradients& grads) const {
  if (grads.size() != tensor_count()) {
    throw DimensionError("gradient count " + std::to_string(grads.size()) + " != tensor count " +
                         std::to_string(tensor_count()));
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    require_shape(grads[i], tensor(i).rows(), tensor(i).cols(), "gradient tensor");
  }
}

bool ParamStore::operator==(const ParamStore& other) const {
  if (tensor_count() != other.tensor_count() || adam_.step != other.adam_.step) return false;
  for (std::size_t i = 0; i < tensor_count(); ++i) {
    if (tensor(i).rows() != other.tensor(i).rows() || tensor(i).cols() != other.tensor(i).cols()) return false;
    if (tensor(i) != other.tensor(i)) return false;
    if (adam_.first[i] != other.adam_.first[i] || adam_.second[i] != other.adam_.second[i]) return false;
  }
  return true;
}

ParamBinding bind(Tape& tape, const ParamStore& params) {
  ParamBinding b;
  for (std::size_t i = 0; i < params.tensor_count(); ++i) b.tensors.push_back(tape.leaf(params.tensor(i)));
  return b;
}

ParamGradients collect_gradients(const Tape& tape, const ParamBinding& binding) {
  ParamGradients g;
  g.reserve(binding.tensors.size());
  for (Var v : binding.tensors) g.push_back(tape.grad(v));
  return g;
}

void adam_step(ParamStore& params, const ParamGradients& grads, double lr, const AdamConfig& config) {
  if (!(lr > 0.0)) throw ConfigError("adam_step: learning rate must be positive");
  params.check_gradients(grads);
  AdamState& state = params.adam();
  if (state.first.size() != params.tensor_count()) params.reset_adam();
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(config.beta1, t);
  const double bias2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.tensor_count(); ++i) {
    Matrix& m = state.first[i];
    Matrix& v = state.second[i];
    const Matrix& g = grads[i];
    m = config.beta1 * m + (1.0 - config.beta1) * g;
    v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
    Matrix& theta = params.tensor(i);
    theta.array() -= lr * (m.array() / bias1) / ((v.array() / bias2).sqrt() + config.epsilon);
  }
}

}  // namespace fairnn
