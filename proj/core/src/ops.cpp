#include "fairnn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fairnn {

Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }

double sigmoid(double x) {
  const double c = std::clamp(x, -kSigmoidClamp, kSigmoidClamp);
  return 1.0 / (1.0 + std::exp(-c));
}

Matrix sigmoid(const Matrix& x) {
  return x.unaryExpr([](double v) { return sigmoid(v); });
}

Matrix softmax_rows(const Matrix& x) {
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double peak = x.row(r).maxCoeff();
    y.row(r) = (x.row(r).array() - peak).exp();
    y.row(r) /= y.row(r).sum();
  }
  return y;
}

std::size_t OutputLayout::width() const {
  std::size_t w = 0;
  for (const auto& b : blocks) w += b.width;
  return w;
}

std::size_t OutputLayout::numerical_count() const {
  return static_cast<std::size_t>(std::count_if(blocks.begin(), blocks.end(), [](const OutputBlock& b) {
    return b.kind == OutputBlock::Kind::kNumerical;
  }));
}

std::size_t OutputLayout::nominal_count() const { return blocks.size() - numerical_count(); }

namespace op {
namespace {

// Softmax backward for one block of columns: dx = y * (dy - <dy, y>).
void softmax_block_backward(const Matrix& y, const Matrix& dy, Matrix& dx, Eigen::Index col,
                            Eigen::Index width) {
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    const auto yr = y.row(r).segment(col, width).array();
    const auto gr = dy.row(r).segment(col, width).array();
    const double dot = (yr * gr).sum();
    dx.row(r).segment(col, width) = (yr * (gr - dot)).matrix();
  }
}

Matrix sigmoid_grad(const Matrix& x, const Matrix& y, const Matrix& dy) {
  Matrix dx(y.rows(), y.cols());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double xi = x.data()[i];
    const double yi = y.data()[i];
    const bool clamped = xi < -kSigmoidClamp || xi > kSigmoidClamp;
    dx.data()[i] = clamped ? 0.0 : dy.data()[i] * yi * (1.0 - yi);
  }
  return dx;
}

}  // namespace

Var affine(Tape& tape, Var input, Var weight, Var bias) {
  const Matrix& x = tape.value(input);
  const Matrix& w = tape.value(weight);
  const Matrix& b = tape.value(bias);
  if (x.cols() != w.rows()) {
    throw DimensionError("affine: input " + shape_string(x) + " vs weight " + shape_string(w));
  }
  require_shape(b, 1, w.cols(), "affine bias");
  Matrix out = x * w;
  out.rowwise() += b.row(0);
  return tape.record(std::move(out), [input, weight, bias](Tape& t, Var, const Matrix& g) {
    t.accumulate(weight, t.value(input).transpose() * g);
    t.accumulate(bias, g.colwise().sum());
    t.accumulate(input, g * t.value(weight).transpose());
  });
}

Var matmul(Tape& tape, Var a, Var b) {
  const Matrix& av = tape.value(a);
  const Matrix& bv = tape.value(b);
  if (av.cols() != bv.rows()) {
    throw DimensionError("matmul: " + shape_string(av) + " vs " + shape_string(bv));
  }
  return tape.record(av * bv, [a, b](Tape& t, Var, const Matrix& g) {
    t.accumulate(a, g * t.value(b).transpose());
    t.accumulate(b, t.value(a).transpose() * g);
  });
}

Var relu(Tape& tape, Var x) {
  return tape.record(fairnn::relu(tape.value(x)), [x](Tape& t, Var, const Matrix& g) {
    const Matrix& xv = t.value(x);
    t.accumulate(x, (xv.array() > 0.0).select(g, 0.0).matrix());
  });
}

Var sigmoid(Tape& tape, Var x) {
  return tape.record(fairnn::sigmoid(tape.value(x)), [x](Tape& t, Var self, const Matrix& g) {
    t.accumulate(x, sigmoid_grad(t.value(x), t.value(self), g));
  });
}

Var softmax_rows(Tape& tape, Var x) {
  return tape.record(fairnn::softmax_rows(tape.value(x)), [x](Tape& t, Var self, const Matrix& g) {
    const Matrix& y = t.value(self);
    Matrix dx(y.rows(), y.cols());
    softmax_block_backward(y, g, dx, 0, y.cols());
    t.accumulate(x, dx);
  });
}

Var mixed_output_head(Tape& tape, Var logits, const OutputLayout& layout) {
  const Matrix& z = tape.value(logits);
  if (static_cast<std::size_t>(z.cols()) != layout.width()) {
    throw DimensionError("output head: logits " + shape_string(z) + " vs layout width " +
                         std::to_string(layout.width()));
  }
  Matrix y(z.rows(), z.cols());
  for (const auto& block : layout.blocks) {
    const auto col = static_cast<Eigen::Index>(block.offset);
    const auto width = static_cast<Eigen::Index>(block.width);
    if (block.kind == OutputBlock::Kind::kNumerical) {
      y.middleCols(col, width) = fairnn::sigmoid(Matrix(z.middleCols(col, width)));
    } else {
      y.middleCols(col, width) = fairnn::softmax_rows(Matrix(z.middleCols(col, width)));
    }
  }
  return tape.record(std::move(y), [logits, layout](Tape& t, Var self, const Matrix& g) {
    const Matrix& zv = t.value(logits);
    const Matrix& yv = t.value(self);
    Matrix dz(yv.rows(), yv.cols());
    for (const auto& block : layout.blocks) {
      const auto col = static_cast<Eigen::Index>(block.offset);
      const auto width = static_cast<Eigen::Index>(block.width);
      if (block.kind == OutputBlock::Kind::kNumerical) {
        dz.middleCols(col, width) = sigmoid_grad(Matrix(zv.middleCols(col, width)),
                                                 Matrix(yv.middleCols(col, width)),
                                                 Matrix(g.middleCols(col, width)));
      } else {
        softmax_block_backward(yv, g, dz, col, width);
      }
    }
    t.accumulate(logits, dz);
  });
}

Var weighted_sum(Tape& tape, std::span<const Var> terms, std::span<const double> weights) {
  if (terms.size() != weights.size()) throw DimensionError("weighted_sum: terms/weights length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) total += weights[i] * tape.scalar(terms[i]);
  std::vector<Var> ts(terms.begin(), terms.end());
  std::vector<double> ws(weights.begin(), weights.end());
  return tape.record(Matrix::Constant(1, 1, total), [ts, ws](Tape& t, Var, const Matrix& g) {
    for (std::size_t i = 0; i < ts.size(); ++i) t.accumulate(ts[i], Matrix::Constant(1, 1, ws[i] * g(0, 0)));
  });
}

Var mean(Tape& tape, Var x) {
  const Matrix& v = tape.value(x);
  return tape.record(Matrix::Constant(1, 1, v.mean()), [x](Tape& t, Var, const Matrix& g) {
    const Matrix& xv = t.value(x);
    t.accumulate(x, Matrix::Constant(xv.rows(), xv.cols(), g(0, 0) / static_cast<double>(xv.size())));
  });
}

Var sum_squares(Tape& tape, Var x) {
  return tape.record(Matrix::Constant(1, 1, tape.value(x).squaredNorm()), [x](Tape& t, Var, const Matrix& g) {
    t.accumulate(x, 2.0 * g(0, 0) * t.value(x));
  });
}

}  // namespace op
}  // namespace fairnn
