#include "fairnn/losses.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

namespace fairnn {
namespace {

using Llt = Eigen::LLT<Eigen::MatrixXd>;

Llt factorize(const Matrix& covariance, const char* which) {
  Llt llt{Eigen::MatrixXd(covariance)};
  if (llt.info() != Eigen::Success) {
    const auto diag = covariance.diagonal();
    std::ostringstream msg;
    msg << "kl_gaussian: Cholesky failed for " << which << " covariance (dim " << covariance.rows()
        << ", diag min " << diag.minCoeff() << ", max " << diag.maxCoeff() << ")";
    throw NumericError(msg.str());
  }
  return llt;
}

double log_det(const Llt& llt) {
  const Eigen::MatrixXd l = llt.matrixL();
  return 2.0 * l.diagonal().array().log().sum();
}

void check_probabilities(const Matrix& p) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double v = p.data()[i];
    if (!std::isfinite(v) || v < 0.0) throw NumericError("invalid probability " + std::to_string(v));
  }
}

double floored_log(double p) { return std::log(std::max(p, kLogFloor)); }

std::vector<double> column(const Matrix& m) {
  if (m.cols() != 1) throw DimensionError("expected a column of probabilities, got " + shape_string(m));
  return std::vector<double>(m.data(), m.data() + m.size());
}

struct Rates {
  // mean of p over negatives and of (1 - p) over positives, per group (index = mask value)
  double fpr[2] = {0, 0};
  double fnr[2] = {0, 0};
  std::size_t negatives[2] = {0, 0};
  std::size_t positives[2] = {0, 0};
};

Rates soft_rates(std::span<const std::uint8_t> labels, std::span<const double> p, std::span<const std::uint8_t> mask) {
  if (labels.size() != p.size() || mask.size() != p.size()) throw DimensionError("soft_equalized_odds: length mismatch");
  Rates r;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const std::size_t g = mask[i] ? 1 : 0;
    if (labels[i]) {
      r.fnr[g] += 1.0 - p[i];
      ++r.positives[g];
    } else {
      r.fpr[g] += p[i];
      ++r.negatives[g];
    }
  }
  for (std::size_t g = 0; g < 2; ++g) {
    if (r.negatives[g] > 0) r.fpr[g] /= static_cast<double>(r.negatives[g]);
    if (r.positives[g] > 0) r.fnr[g] /= static_cast<double>(r.positives[g]);
  }
  return r;
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

// --- Plain evaluations -------------------------------------------------------

double reconstruction_loss(const Matrix& target, const Matrix& reconstruction, const OutputLayout& layout) {
  require_shape(reconstruction, target.rows(), target.cols(), "reconstruction_loss");
  if (static_cast<std::size_t>(target.cols()) != layout.width()) throw DimensionError("reconstruction_loss: layout width");
  if (target.rows() == 0) throw DimensionError("reconstruction_loss: empty batch");
  double total = 0.0;
  for (const auto& block : layout.blocks) {
    const auto col = static_cast<Eigen::Index>(block.offset);
    const auto width = static_cast<Eigen::Index>(block.width);
    if (block.kind == OutputBlock::Kind::kNumerical) {
      total += (target.middleCols(col, width) - reconstruction.middleCols(col, width)).squaredNorm();
    } else {
      const Matrix p = reconstruction.middleCols(col, width);
      check_probabilities(p);
      for (Eigen::Index r = 0; r < p.rows(); ++r) {
        for (Eigen::Index j = 0; j < width; ++j) {
          const double x = target(r, col + j);
          if (x != 0.0) total -= x * floored_log(p(r, j));
        }
      }
    }
  }
  return total / static_cast<double>(target.rows());
}

double squared_error_loss(const Matrix& target, const Matrix& reconstruction) {
  require_shape(reconstruction, target.rows(), target.cols(), "squared_error_loss");
  if (target.rows() == 0) throw DimensionError("squared_error_loss: empty batch");
  return (target - reconstruction).squaredNorm() / static_cast<double>(target.rows());
}

BatchGaussian fit_gaussian(const Matrix& points) {
  if (points.rows() < 2) throw DimensionError("fit_gaussian: need at least two points");
  BatchGaussian g;
  g.count = static_cast<std::size_t>(points.rows());
  g.mean = points.colwise().mean().transpose();
  const Matrix centered = points.rowwise() - g.mean.transpose();
  g.covariance = centered.transpose() * centered / static_cast<double>(points.rows());
  g.covariance.diagonal().array() += kCovarianceRidge;
  return g;
}

namespace {

std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> group_rows(std::span<const std::uint8_t> mask) {
  std::vector<Eigen::Index> prot;
  std::vector<Eigen::Index> unprot;
  for (std::size_t i = 0; i < mask.size(); ++i) (mask[i] ? prot : unprot).push_back(static_cast<Eigen::Index>(i));
  return {prot, unprot};
}

}  // namespace

std::optional<std::pair<BatchGaussian, BatchGaussian>> fit_group_gaussians(const Matrix& latent,
                                                                          std::span<const std::uint8_t> mask) {
  if (static_cast<std::size_t>(latent.rows()) != mask.size()) throw DimensionError("fit_group_gaussians: mask length");
  const auto [prot, unprot] = group_rows(mask);
  if (prot.size() < 2 || unprot.size() < 2) return std::nullopt;
  return std::make_pair(fit_gaussian(latent(prot, Eigen::all)), fit_gaussian(latent(unprot, Eigen::all)));
}

double kl_gaussian(const BatchGaussian& p, const BatchGaussian& q) {
  const auto d = p.mean.size();
  if (q.mean.size() != d) throw DimensionError("kl_gaussian: dimension mismatch");
  require_shape(p.covariance, d, d, "kl_gaussian P covariance");
  require_shape(q.covariance, d, d, "kl_gaussian Q covariance");
  const Llt lp = factorize(p.covariance, "P");
  const Llt lq = factorize(q.covariance, "Q");
  const Eigen::VectorXd delta = q.mean - p.mean;
  const double trace = lq.solve(Eigen::MatrixXd(p.covariance)).trace();
  const double maha = delta.dot(lq.solve(delta));
  return 0.5 * (log_det(lq) - log_det(lp) - static_cast<double>(d) + trace + maha);
}

double bce_loss(std::span<const std::uint8_t> labels, std::span<const double> probabilities) {
  if (labels.size() != probabilities.size()) throw DimensionError("bce_loss: length mismatch");
  if (labels.empty()) throw DimensionError("bce_loss: empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = probabilities[i];
    total += labels[i] ? floored_log(p) : floored_log(1.0 - p);
  }
  return -total / static_cast<double>(labels.size());
}

SoftEqOdds soft_equalized_odds(std::span<const std::uint8_t> labels, std::span<const double> probabilities,
                               std::span<const std::uint8_t> mask) {
  const Rates r = soft_rates(labels, probabilities, mask);
  SoftEqOdds out;
  out.fpr_dropped = r.negatives[0] == 0 || r.negatives[1] == 0;
  out.fnr_dropped = r.positives[0] == 0 || r.positives[1] == 0;
  // Non-protected (mask 0) minus protected (mask 1).
  if (!out.fpr_dropped) out.value += std::abs(r.fpr[0] - r.fpr[1]);
  if (!out.fnr_dropped) out.value += std::abs(r.fnr[0] - r.fnr[1]);
  return out;
}

void check_balance_weight(double w, const char* name) {
  if (!(w >= 0.0 && w < 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1), got " + std::to_string(w));
}

double autoencoder_loss(double recon, double kl, double alpha) {
  check_balance_weight(alpha, "alpha");
  return (1.0 - alpha) * recon + alpha * kl;
}

double classifier_loss(double bce, double eqodds_soft, double beta) {
  check_balance_weight(beta, "beta");
  return (1.0 - beta) * bce + beta * eqodds_soft;
}

LossBreakdown total_loss(double recon, double kl, double bce, double eqodds_soft, double alpha, double beta) {
  LossBreakdown b;
  b.recon = recon;
  b.kl = kl;
  b.bce = bce;
  b.eqodds_soft = eqodds_soft;
  b.alpha = alpha;
  b.beta = beta;
  b.ae = autoencoder_loss(recon, kl, alpha);
  b.cls = classifier_loss(bce, eqodds_soft, beta);
  b.total = b.ae + b.cls;
  return b;
}

// --- Taped versions ------------------------------------------------------------

namespace op {

Var reconstruction_loss(Tape& tape, const Matrix& target, Var reconstruction, const OutputLayout& layout) {
  const double value = fairnn::reconstruction_loss(target, tape.value(reconstruction), layout);
  return tape.record(Matrix::Constant(1, 1, value), [target, reconstruction, layout](Tape& t, Var, const Matrix& g) {
    const Matrix& y = t.value(reconstruction);
    const double scale = g(0, 0) / static_cast<double>(target.rows());
    Matrix dy = Matrix::Zero(y.rows(), y.cols());
    for (const auto& block : layout.blocks) {
      const auto col = static_cast<Eigen::Index>(block.offset);
      const auto width = static_cast<Eigen::Index>(block.width);
      if (block.kind == OutputBlock::Kind::kNumerical) {
        dy.middleCols(col, width) = -2.0 * scale * (target.middleCols(col, width) - y.middleCols(col, width));
      } else {
        for (Eigen::Index r = 0; r < y.rows(); ++r) {
          for (Eigen::Index j = col; j < col + width; ++j) {
            const double x = target(r, j);
            if (x != 0.0 && y(r, j) > kLogFloor) dy(r, j) = -scale * x / y(r, j);
          }
        }
      }
    }
    t.accumulate(reconstruction, dy);
  });
}

Var squared_error_loss(Tape& tape, const Matrix& target, Var reconstruction) {
  const double value = fairnn::squared_error_loss(target, tape.value(reconstruction));
  return tape.record(Matrix::Constant(1, 1, value), [target, reconstruction](Tape& t, Var, const Matrix& g) {
    const double scale = g(0, 0) / static_cast<double>(target.rows());
    t.accumulate(reconstruction, -2.0 * scale * (target - t.value(reconstruction)));
  });
}

std::optional<Var> group_gaussian_kl(Tape& tape, Var latent, std::span<const std::uint8_t> mask) {
  const Matrix& z = tape.value(latent);
  const auto fitted = fit_group_gaussians(z, mask);
  if (!fitted) return std::nullopt;
  const double value = kl_gaussian(fitted->first, fitted->second);
  auto [prot, unprot] = group_rows(mask);

  return tape.record(Matrix::Constant(1, 1, value), [latent, prot, unprot](Tape& t, Var, const Matrix& g) {
    const Matrix& zv = t.value(latent);
    const Matrix zp = zv(prot, Eigen::all);
    const Matrix zq = zv(unprot, Eigen::all);
    const BatchGaussian p = fit_gaussian(zp);
    const BatchGaussian q = fit_gaussian(zq);
    const auto d = p.mean.size();
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd p_inv = factorize(p.covariance, "P").solve(identity);
    const Eigen::MatrixXd q_inv = factorize(q.covariance, "Q").solve(identity);
    const Eigen::VectorXd delta = q.mean - p.mean;
    const Eigen::VectorXd q_inv_delta = q_inv * delta;

    // Partial derivatives of the divergence w.r.t. the fitted moments.
    const Eigen::MatrixXd d_cov_p = 0.5 * (q_inv - p_inv);
    const Eigen::MatrixXd d_cov_q =
        0.5 * (q_inv - q_inv * Eigen::MatrixXd(p.covariance) * q_inv - q_inv_delta * q_inv_delta.transpose());
    const Eigen::VectorXd d_mean_p = -q_inv_delta;
    const Eigen::VectorXd d_mean_q = q_inv_delta;

    // Through the biased covariance and the mean of each group's rows.
    auto rows_grad = [](const Matrix& pts, const BatchGaussian& fit, const Eigen::MatrixXd& d_cov,
                        const Eigen::VectorXd& d_mean) {
      const double n = static_cast<double>(pts.rows());
      const Matrix centered = pts.rowwise() - fit.mean.transpose();
      Matrix out = (2.0 / n) * centered * d_cov;
      out.rowwise() += (d_mean / n).transpose();
      return out;
    };
    Matrix dz = Matrix::Zero(zv.rows(), zv.cols());
    dz(prot, Eigen::all) = g(0, 0) * rows_grad(zp, p, d_cov_p, d_mean_p);
    dz(unprot, Eigen::all) = g(0, 0) * rows_grad(zq, q, d_cov_q, d_mean_q);
    t.accumulate(latent, dz);
  });
}

Var bce_loss(Tape& tape, std::span<const std::uint8_t> labels, Var probabilities) {
  const std::vector<double> p = column(tape.value(probabilities));
  const double value = fairnn::bce_loss(labels, p);
  std::vector<std::uint8_t> c(labels.begin(), labels.end());
  return tape.record(Matrix::Constant(1, 1, value), [c, probabilities](Tape& t, Var, const Matrix& g) {
    const Matrix& pv = t.value(probabilities);
    const double scale = g(0, 0) / static_cast<double>(c.size());
    Matrix dp = Matrix::Zero(pv.rows(), 1);
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double p_i = pv(static_cast<Eigen::Index>(i), 0);
      if (c[i]) {
        if (p_i > kLogFloor) dp(static_cast<Eigen::Index>(i), 0) = -scale / p_i;
      } else if (1.0 - p_i > kLogFloor) {
        dp(static_cast<Eigen::Index>(i), 0) = scale / (1.0 - p_i);
      }
    }
    t.accumulate(probabilities, dp);
  });
}

Var soft_equalized_odds(Tape& tape, std::span<const std::uint8_t> labels, Var probabilities,
                        std::span<const std::uint8_t> mask, SoftEqOdds* info) {
  const std::vector<double> p = column(tape.value(probabilities));
  const SoftEqOdds result = fairnn::soft_equalized_odds(labels, p, mask);
  if (info != nullptr) *info = result;
  const Rates r = soft_rates(labels, p, mask);
  const double fpr_sign = result.fpr_dropped ? 0.0 : sign(r.fpr[0] - r.fpr[1]);
  const double fnr_sign = result.fnr_dropped ? 0.0 : sign(r.fnr[0] - r.fnr[1]);
  // d value / d p_i for each (group, class) cell.
  double coef_neg[2] = {0, 0};
  double coef_pos[2] = {0, 0};
  for (std::size_t grp = 0; grp < 2; ++grp) {
    const double orient = grp == 0 ? 1.0 : -1.0;
    if (r.negatives[grp] > 0) coef_neg[grp] = orient * fpr_sign / static_cast<double>(r.negatives[grp]);
    if (r.positives[grp] > 0) coef_pos[grp] = -orient * fnr_sign / static_cast<double>(r.positives[grp]);
  }
  Matrix local(static_cast<Eigen::Index>(p.size()), 1);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const std::size_t grp = mask[i] ? 1 : 0;
    local(static_cast<Eigen::Index>(i), 0) = labels[i] ? coef_pos[grp] : coef_neg[grp];
  }
  return tape.record(Matrix::Constant(1, 1, result.value), [local, probabilities](Tape& t, Var, const Matrix& g) {
    t.accumulate(probabilities, g(0, 0) * local);
  });
}

}  // namespace op
}  // namespace fairnn
