#pragma once

#include <cstddef>
#include <string>

#include <Eigen/Core>

#include "fairnn/error.hpp"

namespace fairnn {

/// Dense row-major matrix of doubles; the only tensor type in the library.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline std::string shape_string(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

inline void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + shape_string(m));
  }
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace fairnn
