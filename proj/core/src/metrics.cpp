#include "fairnn/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "fairnn/csv.hpp"

namespace fairnn {
namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::optional<double> difference(const std::optional<double>& a, const std::optional<double>& b) {
  if (!a || !b) return std::nullopt;
  return *a - *b;
}

}  // namespace

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

ConfusionCounts GroupConfusion::pooled() const {
  ConfusionCounts c = protected_group;
  c += unprotected_group;
  return c;
}

GroupConfusion confusion(std::span<const std::uint8_t> labels, std::span<const std::uint8_t> predictions,
                         std::span<const std::uint8_t> mask) {
  if (labels.size() != predictions.size() || labels.size() != mask.size()) {
    throw DimensionError("confusion: labels, predictions and mask lengths differ");
  }
  GroupConfusion out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ConfusionCounts& c = mask[i] ? out.protected_group : out.unprotected_group;
    if (labels[i]) {
      (predictions[i] ? c.tp : c.fn) += 1;
    } else {
      (predictions[i] ? c.fp : c.tn) += 1;
    }
  }
  return out;
}

std::optional<double> balanced_accuracy(const GroupConfusion& counts) {
  const ConfusionCounts all = counts.pooled();
  const auto tpr = ratio(all.tp, all.positives());
  const auto tnr = ratio(all.tn, all.negatives());
  if (!tpr || !tnr) return std::nullopt;
  return (*tpr + *tnr) / 2.0;
}

FairnessReport fairness_report(const GroupConfusion& counts) {
  const ConfusionCounts& s = counts.protected_group;
  const ConfusionCounts& sbar = counts.unprotected_group;
  const ConfusionCounts all = counts.pooled();

  FairnessReport r;
  r.accuracy = all.total() == 0 ? 0.0 : static_cast<double>(all.tp + all.tn) / static_cast<double>(all.total());
  r.balanced_accuracy = balanced_accuracy(counts);
  r.tpr_protected = ratio(s.tp, s.positives());
  r.tpr_unprotected = ratio(sbar.tp, sbar.positives());
  r.tnr_protected = ratio(s.tn, s.negatives());
  r.tnr_unprotected = ratio(sbar.tn, sbar.negatives());
  r.delta_fpr = difference(ratio(sbar.fp, sbar.negatives()), ratio(s.fp, s.negatives()));
  r.delta_fnr = difference(ratio(sbar.fn, sbar.positives()), ratio(s.fn, s.positives()));
  if (r.delta_fpr && r.delta_fnr) r.eq_odds = std::abs(*r.delta_fpr) + std::abs(*r.delta_fnr);
  return r;
}

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> positive) {
  if (scores.size() != positive.size()) throw DimensionError("roc_auc: length mismatch");
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of average ranks of positives.
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (positive[order[t]]) {
        rank_sum += avg_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) return 0.5;
  const double np = static_cast<double>(n_pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

void export_latent_scatter(std::ostream& out, const Matrix& latent, std::span<const std::uint8_t> mask,
                           std::span<const std::uint8_t> labels, std::array<std::size_t, 2> dims) {
  const auto d = static_cast<std::size_t>(latent.cols());
  if (dims[0] >= d || dims[1] >= d) throw ConfigError("export_latent_scatter: dims out of range");
  if (dims[0] == dims[1]) throw ConfigError("export_latent_scatter: dims must differ");
  if (mask.size() != static_cast<std::size_t>(latent.rows()) || labels.size() != mask.size()) {
    throw DimensionError("export_latent_scatter: row count mismatch");
  }
  out << "z1,z2,group,label\n";
  for (Eigen::Index r = 0; r < latent.rows(); ++r) {
    const auto i = static_cast<std::size_t>(r);
    out << format_double(latent(r, static_cast<Eigen::Index>(dims[0]))) << ','
        << format_double(latent(r, static_cast<Eigen::Index>(dims[1]))) << ',' << static_cast<int>(mask[i]) << ','
        << static_cast<int>(labels[i]) << '\n';
  }
}

std::string report_csv_header() {
  return "dataset,seed,config,alpha,beta,preferential_sampling,accuracy,balanced_accuracy,tpr_protected,"
         "tpr_unprotected,tnr_protected,tnr_unprotected,delta_fpr,delta_fnr,eq_odds\n";
}

std::string report_csv_row(const std::string& dataset, std::uint64_t seed, const std::string& config_label,
                           double alpha, double beta, bool preferential, const FairnessReport& r) {
  return report_csv_row(dataset, std::to_string(seed), config_label, alpha, beta, preferential, r);
}

std::string report_csv_row(const std::string& dataset, const std::string& seed_field, const std::string& config_label,
                           double alpha, double beta, bool preferential, const FairnessReport& r) {
  return csv_row({dataset, seed_field, config_label, format_double(alpha), format_double(beta),
                  preferential ? "1" : "0", format_double(r.accuracy), format_optional(r.balanced_accuracy),
                  format_optional(r.tpr_protected), format_optional(r.tpr_unprotected),
                  format_optional(r.tnr_protected), format_optional(r.tnr_unprotected), format_optional(r.delta_fpr),
                  format_optional(r.delta_fnr), format_optional(r.eq_odds)});
}

std::optional<double> median(std::vector<std::optional<double>> values) {
  std::vector<double> present;
  for (const auto& v : values) {
    if (v) present.push_back(*v);
  }
  if (present.empty()) return std::nullopt;
  return median(std::move(present));
}

double median(std::vector<double> values) {
  if (values.empty()) throw DimensionError("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace fairnn
