#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairnn/checkpoint.hpp"
#include "fairnn/dataset.hpp"
#include "fairnn/losses.hpp"
#include "fairnn/metrics.hpp"
#include "fairnn/model.hpp"
#include "fairnn/sampling.hpp"
#include "fairnn/split.hpp"

namespace fairnn {

struct TrainConfig {
  DatasetId dataset = DatasetId::kAdult;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t batch_size = 512;
  double lr = 0.002;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  bool preferential_sampling = false;
  std::size_t ps_epochs = 20;
  PreferentialKRule ps_k_rule = PreferentialKRule::kDeficit;
  std::vector<std::size_t> encoder_widths{64, 32, 10};
  std::size_t classifier_hidden = 32;
  ReconstructionKind reconstruction = ReconstructionKind::kMixed;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
  /// Flat key=value snapshot; keys equal the CLI flag names.
  std::map<std::string, std::string> to_map() const;
  /// Applies the keys present in `values` over `base`. Unknown keys are a ConfigError.
  static TrainConfig from_map(const std::map<std::string, std::string>& values, TrainConfig base);
  static TrainConfig from_map(const std::map<std::string, std::string>& values);
};

/// Published (alpha, beta) choice per dataset.
std::pair<double, double> selected_weights(DatasetId id);

/// Encoded train/validation/test sets of one random split; normalization fitted on train.
struct PreparedSplit {
  SplitSpec split;
  Schema schema;
  Dataset train;
  Dataset validation;
  Dataset test;
};

PreparedSplit prepare_split(const RawTable& raw, std::uint64_t seed);
/// Re-encodes a split with a frozen schema (as stored in a checkpoint).
PreparedSplit prepare_split(const RawTable& raw, std::uint64_t seed, const Schema& frozen);

/// Combined objective of one batch with exact gradients for every parameter.
struct StepObjective {
  LossBreakdown breakdown;
  ParamGradients gradients;
};

StepObjective batch_objective(const FairNN& model, const Matrix& features, std::span<const std::uint8_t> labels,
                              std::span<const std::uint8_t> mask, double alpha, double beta);

/// One logged optimizer step.
struct StepLog {
  std::size_t step = 0;
  std::size_t epoch = 0;
  bool preferential_phase = false;
  LossBreakdown loss;
};

std::string step_log_csv_header();
std::string step_log_csv_row(const StepLog& log);

FairnessReport evaluate(const FairNN& model, const Dataset& data);
/// (1 - balanced accuracy) + eq_odds; a missing term counts as its worst value.
double validation_composite(const FairnessReport& report);

struct RunResult {
  TrainConfig config;
  FairnessReport test_report;
  FairnessReport validation_report;
  std::optional<FairnessReport> pre_ps_test_report;  // set when preferential sampling ran
  Checkpoint checkpoint;                             // validation-selected model
  std::optional<Checkpoint> pre_ps_checkpoint;
  std::vector<StepLog> steps;
  std::size_t selected_epoch = 0;
  double selected_composite = 0.0;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
};

/// Called once per epoch with the validation report of the current parameters.
using ProgressFn = std::function<void(std::size_t epoch, const FairnessReport& validation, double composite)>;

/// Joint training of autoencoder and classifier on the combined objective.
/// Throws NumericError with diagnostics when a loss turns non-finite.
RunResult train(const TrainConfig& config, const PreparedSplit& data, const ProgressFn& progress = {});
RunResult train(const TrainConfig& config, const RawTable& raw, const ProgressFn& progress = {});

/// Group-probe AUC on the latent codes of `data`.
double probe_auc(const FairNN& model, const Dataset& data, const ProbeOptions& options = {});

}  // namespace fairnn
