#pragma once

#include <functional>

#include "fairnn/matrix.hpp"
#include "fairnn/params.hpp"

namespace fairnn {

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every coordinate of `x`.
/// Evaluates `f` only on plain matrices, never on a tape.
Matrix finite_difference_gradient(const std::function<double(const Matrix&)>& f, Matrix x, double h = 1e-5);

/// Same oracle over every tensor of a ParamStore.
ParamGradients finite_difference_gradient(const std::function<double(const ParamStore&)>& f, ParamStore params,
                                          double h = 1e-5);

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, floor); `floor` keeps near-zero entries from dominating.
double max_relative_error(const Matrix& a, const Matrix& b, double floor = 1e-6);
double max_relative_error(const ParamGradients& a, const ParamGradients& b, double floor = 1e-6);

}  // namespace fairnn
