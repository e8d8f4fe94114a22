#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "fairnn/matrix.hpp"

namespace fairnn {

/// Handle to a value recorded on a Tape. Only meaningful for the tape that made it.
struct Var {
  std::size_t id = 0;
};

/// Reverse-mode recorder.
///
/// Every op appends a node holding its forward value and a closure that, given
/// the gradient of the objective with respect to that value, accumulates into
/// the gradients of its inputs. `backward` walks the nodes in reverse once;
/// afterwards the tape is consumed and refuses another pass or new nodes.
class Tape {
 public:
  using Backward = std::function<void(Tape&, Var self, const Matrix& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  /// Leaf that never receives a gradient.
  Var constant(Matrix value);
  /// Leaf whose gradient is kept for the caller.
  Var leaf(Matrix value);

  /// Appends a computed node. `backward` may be empty for non-differentiable values.
  Var record(Matrix value, Backward backward);

  const Matrix& value(Var v) const;
  double scalar(Var v) const;

  /// Gradient accumulated for `v` by the last backward pass (zeros if it was unreachable).
  Matrix grad(Var v) const;

  /// Adds `delta` into the gradient slot of `v`; called from op closures.
  void accumulate(Var v, const Matrix& delta);

  /// Seeds d(objective)/d(objective) = 1 and propagates. `objective` must be 1x1.
  void backward(Var objective);

  bool consumed() const noexcept { return consumed_; }
  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;  // empty until something flows in
    Backward backward;
    bool needs_grad = false;
  };

  void check_live(const char* what) const;
  const Node& node(Var v) const;

  std::vector<Node> nodes_;
  bool consumed_ = false;
};

}  // namespace fairnn
