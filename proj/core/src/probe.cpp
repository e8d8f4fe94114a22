#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Cholesky>

#include "fairnn/metrics.hpp"
#include "fairnn/ops.hpp"
#include "fairnn/rng.hpp"

namespace fairnn {
namespace {

// Newton-Raphson for L2-regularized logistic regression; x carries a leading bias column.
Eigen::VectorXd fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::size_t iterations, double l2) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
  Eigen::MatrixXd ridge = l2 * Eigen::MatrixXd::Identity(x.cols(), x.cols());
  ridge(0, 0) = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    const Eigen::VectorXd p = (x * w).unaryExpr([](double v) { return sigmoid(v); });
    const Eigen::VectorXd grad = x.transpose() * (p - y) + ridge * w;
    const Eigen::VectorXd weights = (p.array() * (1.0 - p.array())).max(1e-10).matrix();
    Eigen::MatrixXd hessian = x.transpose() * weights.asDiagonal() * x + ridge;
    hessian.diagonal().array() += 1e-9;
    const Eigen::VectorXd step = hessian.ldlt().solve(grad);
    if (!step.allFinite()) break;
    w -= step;
    if (step.lpNorm<Eigen::Infinity>() < 1e-10) break;
  }
  return w;
}

}  // namespace

double latent_probe_auc(const Matrix& latent, std::span<const std::uint8_t> mask, const ProbeOptions& options) {
  const auto n = static_cast<std::size_t>(latent.rows());
  if (mask.size() != n) throw DimensionError("latent_probe_auc: mask length");
  std::size_t n_prot = 0;
  for (auto m : mask) n_prot += m ? 1 : 0;
  if (n_prot == 0 || n_prot == n) throw ConfigError("latent_probe_auc: both groups must be non-empty");
  if (options.folds < 2 || n < options.folds) throw ConfigError("latent_probe_auc: not enough rows for folds");

  // Standardize; constant columns are dropped.
  std::vector<Eigen::Index> keep;
  Eigen::VectorXd mean = latent.colwise().mean().transpose();
  Eigen::VectorXd scale(latent.cols());
  for (Eigen::Index c = 0; c < latent.cols(); ++c) {
    const double var = (latent.col(c).array() - mean(c)).square().mean();
    scale(c) = std::sqrt(var);
    if (var > 1e-18) keep.push_back(c);
  }
  if (keep.empty()) return 0.5;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(keep.size()) + 1);
  x.col(0).setOnes();
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const Eigen::Index c = keep[k];
    x.col(static_cast<Eigen::Index>(k) + 1) = (latent.col(c).array() - mean(c)) / scale(c);
  }
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) y(static_cast<Eigen::Index>(i)) = mask[i] ? 1.0 : 0.0;

  // Identical rows share a fold; folds are stratified by the group of each cluster's first row.
  // The result is the mean of the per-fold AUCs.
  std::map<std::vector<double>, std::size_t> cluster_of;
  std::vector<std::size_t> cluster(n);
  std::vector<int> cluster_group;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = latent.row(static_cast<Eigen::Index>(i));
    std::vector<double> key(row.data(), row.data() + row.size());
    const auto [it, inserted] = cluster_of.emplace(std::move(key), cluster_group.size());
    if (inserted) cluster_group.push_back(mask[i] ? 1 : 0);
    cluster[i] = it->second;
  }
  Rng rng(options.seed);
  const auto order = rng.permutation(cluster_group.size());
  std::vector<std::size_t> cluster_fold(cluster_group.size());
  std::size_t next[2] = {0, 0};
  for (std::size_t c : order) cluster_fold[c] = next[cluster_group[c]]++ % options.folds;
  std::vector<std::size_t> fold(n);
  for (std::size_t i = 0; i < n; ++i) fold[i] = cluster_fold[cluster[i]];

  double auc_sum = 0.0;
  std::size_t scored_folds = 0;
  for (std::size_t f = 0; f < options.folds; ++f) {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> held;
    for (std::size_t i = 0; i < n; ++i) (fold[i] == f ? held : train).push_back(static_cast<Eigen::Index>(i));
    std::vector<std::uint8_t> held_mask;
    for (auto i : held) held_mask.push_back(mask[static_cast<std::size_t>(i)]);
    const auto held_prot = std::count(held_mask.begin(), held_mask.end(), std::uint8_t{1});
    if (held_prot == 0 || held_prot == static_cast<std::ptrdiff_t>(held.size())) continue;
    const Eigen::MatrixXd xt = x(train, Eigen::all);
    const Eigen::VectorXd yt = y(train);
    const Eigen::VectorXd w = fit_logistic(xt, yt, options.newton_iterations, options.l2 * static_cast<double>(train.size()));
    const Eigen::VectorXd s = x(held, Eigen::all) * w;
    const std::vector<double> scores(s.data(), s.data() + s.size());
    auc_sum += roc_auc(scores, held_mask);
    ++scored_folds;
  }
  return scored_folds == 0 ? 0.5 : auc_sum / static_cast<double>(scored_folds);
}

}  // namespace fairnn
