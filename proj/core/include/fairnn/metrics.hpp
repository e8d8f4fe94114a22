#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fairnn/matrix.hpp"

namespace fairnn {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t positives() const { return tp + fn; }
  std::size_t negatives() const { return tn + fp; }
  std::size_t total() const { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o);
};

/// Confusion counts for the protected group s and the unprotected group s̄.
struct GroupConfusion {
  ConfusionCounts protected_group;
  ConfusionCounts unprotected_group;
  ConfusionCounts pooled() const;
};

/// Rates are nullopt when the group has no instance of the conditioning class.
struct FairnessReport {
  double accuracy = 0.0;
  std::optional<double> balanced_accuracy;
  std::optional<double> tpr_protected;
  std::optional<double> tpr_unprotected;
  std::optional<double> tnr_protected;
  std::optional<double> tnr_unprotected;
  std::optional<double> delta_fpr;  // FPR_sbar - FPR_s
  std::optional<double> delta_fnr;  // FNR_sbar - FNR_s
  std::optional<double> eq_odds;    // |delta_fpr| + |delta_fnr|
};

GroupConfusion confusion(std::span<const std::uint8_t> labels, std::span<const std::uint8_t> predictions,
                         std::span<const std::uint8_t> mask);
FairnessReport fairness_report(const GroupConfusion& counts);
std::optional<double> balanced_accuracy(const GroupConfusion& counts);

/// Cross-validated AUC of a logistic probe predicting the group from latent codes.
/// 0.5 means the groups are linearly indistinguishable.
struct ProbeOptions {
  std::size_t folds = 5;
  std::size_t newton_iterations = 25;
  double l2 = 1e-4;
  std::uint64_t seed = 7;
};
double latent_probe_auc(const Matrix& latent, std::span<const std::uint8_t> mask, const ProbeOptions& options = {});

/// Area under the ROC curve with ties counted half (Mann-Whitney U).
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> positive);

/// Writes "z1,z2,group,label" rows for latent dimensions `dims`. Throws ConfigError for
/// out-of-range or equal dims.
void export_latent_scatter(std::ostream& out, const Matrix& latent, std::span<const std::uint8_t> mask,
                           std::span<const std::uint8_t> labels, std::array<std::size_t, 2> dims);

/// Summary CSV schema: one row per (dataset, seed, configuration).
std::string report_csv_header();
std::string report_csv_row(const std::string& dataset, std::uint64_t seed, const std::string& config_label,
                           double alpha, double beta, bool preferential, const FairnessReport& report);
/// Same schema with a free-form seed field (used for aggregated rows).
std::string report_csv_row(const std::string& dataset, const std::string& seed_field, const std::string& config_label,
                           double alpha, double beta, bool preferential, const FairnessReport& report);

/// Median of the present values; nullopt when none are present.
std::optional<double> median(std::vector<std::optional<double>> values);
double median(std::vector<double> values);

}  // namespace fairnn
