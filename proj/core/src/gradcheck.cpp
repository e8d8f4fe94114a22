#include "fairnn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fairnn {
namespace {

double checked(double v, const char* where) {
  if (!std::isfinite(v)) throw NumericError(std::string("finite difference: non-finite objective at ") + where);
  return v;
}

}  // namespace

Matrix finite_difference_gradient(const std::function<double(const Matrix&)>& f, Matrix x, double h) {
  if (!(h > 0.0)) throw ConfigError("finite difference step must be positive");
  Matrix grad(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + h;
    const double up = checked(f(x), "+h");
    x.data()[i] = saved - h;
    const double down = checked(f(x), "-h");
    x.data()[i] = saved;
    grad.data()[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

ParamGradients finite_difference_gradient(const std::function<double(const ParamStore&)>& f, ParamStore params,
                                          double h) {
  if (!(h > 0.0)) throw ConfigError("finite difference step must be positive");
  ParamGradients grads = params.zero_gradients();
  for (std::size_t t = 0; t < params.tensor_count(); ++t) {
    for (Eigen::Index i = 0; i < params.tensor(t).size(); ++i) {
      double& slot = params.tensor(t).data()[i];
      const double saved = slot;
      slot = saved + h;
      const double up = checked(f(params), "+h");
      slot = saved - h;
      const double down = checked(f(params), "-h");
      slot = saved;
      grads[t].data()[i] = (up - down) / (2.0 * h);
    }
  }
  return grads;
}

double max_relative_error(const Matrix& a, const Matrix& b, double floor) {
  require_shape(b, a.rows(), a.cols(), "max_relative_error");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double x = a.data()[i];
    const double y = b.data()[i];
    const double scale = std::max({std::abs(x), std::abs(y), floor});
    worst = std::max(worst, std::abs(x - y) / scale);
  }
  return worst;
}

double max_relative_error(const ParamGradients& a, const ParamGradients& b, double floor) {
  if (a.size() != b.size()) throw DimensionError("max_relative_error: gradient list length mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, max_relative_error(a[i], b[i], floor));
  return worst;
}

}  // namespace fairnn
