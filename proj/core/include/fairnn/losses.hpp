#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "fairnn/matrix.hpp"
#include "fairnn/ops.hpp"
#include "fairnn/tape.hpp"

namespace fairnn {

/// Ridge added to every group covariance.
inline constexpr double kCovarianceRidge = 1e-4;

/// Sample mean and ridge-regularized biased covariance of one group's latent codes.
struct BatchGaussian {
  Vector mean;
  Matrix covariance;
  std::size_t count = 0;
};

/// Every loss term of one step and their weighted combinations.
struct LossBreakdown {
  double recon = 0.0;
  double kl = 0.0;
  double bce = 0.0;
  double eqodds_soft = 0.0;
  double ae = 0.0;   // (1 - alpha) * recon + alpha * kl
  double cls = 0.0;  // (1 - beta) * bce + beta * eqodds_soft
  double total = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  bool kl_skipped = false;        // a group had < 2 members in the batch
  bool eqodds_incomplete = false; // at least one rate difference was dropped
};

// --- Plain evaluations -----------------------------------------------------

/// Mean over rows of squared error on numerical columns minus sum of x log p on nominal blocks.
double reconstruction_loss(const Matrix& target, const Matrix& reconstruction, const OutputLayout& layout);
/// Mean over rows of squared error summed over all columns (the plain-MSE autoencoder variant).
double squared_error_loss(const Matrix& target, const Matrix& reconstruction);

/// Gaussians for the protected (mask 1) and unprotected (mask 0) rows; nullopt when either
/// group has fewer than two rows.
std::optional<std::pair<BatchGaussian, BatchGaussian>> fit_group_gaussians(const Matrix& latent,
                                                                          std::span<const std::uint8_t> mask);
BatchGaussian fit_gaussian(const Matrix& points);

/// D_KL(P || Q) between multivariate normals, using Cholesky solves only.
double kl_gaussian(const BatchGaussian& p, const BatchGaussian& q);

double bce_loss(std::span<const std::uint8_t> labels, std::span<const double> probabilities);

struct SoftEqOdds {
  double value = 0.0;
  bool fpr_dropped = false;
  bool fnr_dropped = false;
};
/// |softFPR_sbar - softFPR_s| + |softFNR_sbar - softFNR_s| with rates built from probabilities.
SoftEqOdds soft_equalized_odds(std::span<const std::uint8_t> labels, std::span<const double> probabilities,
                               std::span<const std::uint8_t> mask);

/// Throws ConfigError unless 0 <= w < 1.
void check_balance_weight(double w, const char* name);
double autoencoder_loss(double recon, double kl, double alpha);
double classifier_loss(double bce, double eqodds_soft, double beta);
/// Fills ae/cls/total from the four terms and the weights.
LossBreakdown total_loss(double recon, double kl, double bce, double eqodds_soft, double alpha, double beta);

// --- Taped versions (same values, with exact reverse-mode gradients) -------

namespace op {

Var reconstruction_loss(Tape& tape, const Matrix& target, Var reconstruction, const OutputLayout& layout);
Var squared_error_loss(Tape& tape, const Matrix& target, Var reconstruction);
/// Fits both group Gaussians to `latent` and returns D_KL(P_s || P_sbar), or nullopt when skipped.
std::optional<Var> group_gaussian_kl(Tape& tape, Var latent, std::span<const std::uint8_t> mask);
Var bce_loss(Tape& tape, std::span<const std::uint8_t> labels, Var probabilities);
Var soft_equalized_odds(Tape& tape, std::span<const std::uint8_t> labels, Var probabilities,
                        std::span<const std::uint8_t> mask, SoftEqOdds* info = nullptr);

}  // namespace op
}  // namespace fairnn
