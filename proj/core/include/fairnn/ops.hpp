#pragma once

#include <span>
#include <vector>

#include "fairnn/matrix.hpp"
#include "fairnn/tape.hpp"

namespace fairnn {

/// Sigmoid inputs are clamped to this magnitude before exponentiation.
inline constexpr double kSigmoidClamp = 30.0;
/// Floor applied to every probability before taking a log.
inline constexpr double kLogFloor = 1e-12;

// Plain (untaped) elementwise maps.
Matrix relu(const Matrix& x);
Matrix sigmoid(const Matrix& x);
double sigmoid(double x);
Matrix softmax_rows(const Matrix& x);

/// Layout of one decoder output: a numerical column or a softmax block.
struct OutputBlock {
  enum class Kind { kNumerical, kNominal };
  Kind kind = Kind::kNumerical;
  std::size_t offset = 0;
  std::size_t width = 1;
};

/// Column layout of the encoded feature matrix, in attribute order.
struct OutputLayout {
  std::vector<OutputBlock> blocks;
  std::size_t width() const;
  std::size_t numerical_count() const;
  std::size_t nominal_count() const;
};

namespace op {

/// input[B x m] * weight[m x n] + bias[1 x n], bias broadcast over rows.
Var affine(Tape& tape, Var input, Var weight, Var bias);
Var matmul(Tape& tape, Var a, Var b);
Var relu(Tape& tape, Var x);
Var sigmoid(Tape& tape, Var x);
Var softmax_rows(Tape& tape, Var x);

/// Sigmoid on numerical columns, row-wise softmax on every nominal block.
Var mixed_output_head(Tape& tape, Var logits, const OutputLayout& layout);

/// sum_i weights[i] * terms[i] over 1x1 vars.
Var weighted_sum(Tape& tape, std::span<const Var> terms, std::span<const double> weights);

/// Mean of all entries; used for toy objectives in tests.
Var mean(Tape& tape, Var x);
/// Sum of squares of all entries.
Var sum_squares(Tape& tape, Var x);

}  // namespace op
}  // namespace fairnn
