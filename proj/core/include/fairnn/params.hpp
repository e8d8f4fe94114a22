#pragma once

#include <cstdint>
#include <vector>

#include "fairnn/matrix.hpp"
#include "fairnn/tape.hpp"

namespace fairnn {

/// One fully connected layer; bias is stored as a 1 x out row.
struct DenseLayer {
  Matrix weight;
  Matrix bias;
};

/// First/second moment accumulators, one pair per parameter tensor.
struct AdamState {
  std::vector<Matrix> first;
  std::vector<Matrix> second;
  std::uint64_t step = 0;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Gradients aligned with ParamStore tensor order (weight, bias, weight, bias, ...).
using ParamGradients = std::vector<Matrix>;

/// All trainable tensors of a network plus the optimizer state that mirrors them.
class ParamStore {
 public:
  ParamStore() = default;

  /// Glorot-uniform weights, zero biases, zeroed Adam state.
  /// `shapes` holds (fan_in, fan_out) per layer.
  static ParamStore glorot(const std::vector<std::pair<std::size_t, std::size_t>>& shapes, std::uint64_t seed);

  std::vector<DenseLayer>& layers() noexcept { return layers_; }
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  AdamState& adam() noexcept { return adam_; }
  const AdamState& adam() const noexcept { return adam_; }

  std::size_t tensor_count() const noexcept { return 2 * layers_.size(); }
  Matrix& tensor(std::size_t i);
  const Matrix& tensor(std::size_t i) const;
  std::size_t scalar_count() const;

  /// Resets Adam moments to zero with shapes mirroring the parameters.
  void reset_adam();
  ParamGradients zero_gradients() const;
  void check_gradients(const ParamGradients& grads) const;

  bool operator==(const ParamStore& other) const;

 private:
  std::vector<DenseLayer> layers_;
  AdamState adam_;
};

/// Tape leaves for every tensor of a ParamStore, in tensor order.
struct ParamBinding {
  std::vector<Var> tensors;
  Var weight(std::size_t layer) const { return tensors[2 * layer]; }
  Var bias(std::size_t layer) const { return tensors[2 * layer + 1]; }
};

ParamBinding bind(Tape& tape, const ParamStore& params);
ParamGradients collect_gradients(const Tape& tape, const ParamBinding& binding);

/// One Adam update on every tensor; increments the step counter.
void adam_step(ParamStore& params, const ParamGradients& grads, double lr, const AdamConfig& config = {});

}  // namespace fairnn
