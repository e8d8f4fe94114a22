#include "fairnn/tape.hpp"

#include <string>
#include <utility>

namespace fairnn {

void Tape::check_live(const char* what) const {
  if (consumed_) throw StateError(std::string(what) + ": tape already consumed by backward()");
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id >= nodes_.size()) throw StateError("Var does not belong to this tape");
  return nodes_[v.id];
}

Var Tape::constant(Matrix value) {
  check_live("constant");
  nodes_.push_back(Node{std::move(value), Matrix(), Backward(), false});
  return Var{nodes_.size() - 1};
}

Var Tape::leaf(Matrix value) {
  check_live("leaf");
  nodes_.push_back(Node{std::move(value), Matrix(), Backward(), true});
  return Var{nodes_.size() - 1};
}

Var Tape::record(Matrix value, Backward backward) {
  check_live("record");
  if (!value.allFinite()) throw NumericError("non-finite value produced on tape");
  const bool needs = static_cast<bool>(backward);
  nodes_.push_back(Node{std::move(value), Matrix(), std::move(backward), needs});
  return Var{nodes_.size() - 1};
}

const Matrix& Tape::value(Var v) const { return node(v).value; }

double Tape::scalar(Var v) const {
  const Matrix& m = value(v);
  require_shape(m, 1, 1, "Tape::scalar");
  return m(0, 0);
}

Matrix Tape::grad(Var v) const {
  const Node& n = node(v);
  if (n.grad.size() == 0) return Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::accumulate(Var v, const Matrix& delta) {
  if (v.id >= nodes_.size()) throw StateError("Var does not belong to this tape");
  Node& n = nodes_[v.id];
  if (!n.needs_grad) return;
  require_shape(delta, n.value.rows(), n.value.cols(), "gradient accumulation");
  if (n.grad.size() == 0) {
    n.grad = delta;
  } else {
    n.grad += delta;
  }
}

void Tape::backward(Var objective) {
  check_live("backward");
  require_shape(value(objective), 1, 1, "backward objective");
  consumed_ = true;
  nodes_[objective.id].grad = Matrix::Ones(1, 1);
  for (std::size_t i = objective.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.backward || n.grad.size() == 0) continue;
    // Move the closure out so it can call accumulate() on earlier nodes freely.
    Backward fn = std::move(n.backward);
    fn(*this, Var{i}, n.grad);
  }
}

}  // namespace fairnn
