#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fairnn/train.hpp"

namespace fairnn {

/// Row label of a configuration: "a<alpha>_b<beta>", with "_ae-n" for squared-error reconstruction.
std::string config_label(const TrainConfig& config);

/// One named configuration of an experiment table. `config.seed` is replaced per run.
struct ExperimentCell {
  std::string label;
  TrainConfig config;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  FairnessReport test;
  FairnessReport validation;
  double validation_composite = 0.0;
  std::optional<double> probe_auc;  // latent group probe on the test split
  double wall_seconds = 0.0;
};

struct CellOutcome {
  ExperimentCell cell;
  bool preferential = false;
  std::vector<SeedOutcome> runs;
  FairnessReport median_test;
  double median_validation_composite = 0.0;
  std::optional<double> median_probe_auc;
};

struct ExperimentOptions {
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::size_t threads = 1;
  bool probe = false;
  ProbeOptions probe_options;
  /// Called after each finished (cell, seed) run; may be invoked from worker threads, serialized.
  std::function<void(const std::string& label, std::uint64_t seed, const RunResult& result)> on_run;
};

/// Field-wise median over seeds; a field missing in every run stays missing.
FairnessReport median_report(const std::vector<FairnessReport>& reports);

/// Trains every cell on every seed. When a cell has preferential sampling enabled, two outcomes
/// are emitted: the selected model before the resampling phase (preferential = false) and after.
/// Results are ordered by cell, then pre/post, independent of the thread count.
std::vector<CellOutcome> run_cells(const std::vector<ExperimentCell>& cells, const RawTable& raw,
                                   const ExperimentOptions& options);

/// Grid values searched for the balance weights.
std::vector<double> default_alpha_grid();
std::vector<double> default_beta_grid();

/// Every (alpha, beta) cell ranked by median validation composite, best first; ties keep grid order.
std::vector<CellOutcome> grid_search(const TrainConfig& base, const std::vector<double>& alphas,
                                     const std::vector<double>& betas, const RawTable& raw,
                                     const ExperimentOptions& options);

/// {(0,0), (alpha,0), (0,beta), (alpha,beta)} each without and with preferential sampling: 8 outcomes.
std::vector<CellOutcome> ablate(const TrainConfig& base, double alpha, double beta, const RawTable& raw,
                                const ExperimentOptions& options);

/// Mixed versus squared-error reconstruction at alpha = beta = 0, same seeds and splits.
std::vector<CellOutcome> compare_ae_losses(const TrainConfig& base, const RawTable& raw,
                                           const ExperimentOptions& options);

/// Summary CSV rows: one per (cell, seed), or one median row per cell with seed field "median".
std::string outcome_csv_rows(const CellOutcome& outcome, DatasetId dataset);
std::string outcome_median_csv_row(const CellOutcome& outcome, DatasetId dataset);

}  // namespace fairnn
