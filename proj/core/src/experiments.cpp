#include "fairnn/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "fairnn/csv.hpp"

namespace fairnn {
namespace {

struct Job {
  std::size_t cell = 0;
  std::size_t seed = 0;
};

// Pre- and post-resampling outcomes of one (cell, seed) job.
struct JobOutcome {
  SeedOutcome primary;
  std::optional<SeedOutcome> after_ps;
};

SeedOutcome summarize(const FairNN& model, const PreparedSplit& data, std::uint64_t seed, double wall,
                      const ExperimentOptions& options) {
  SeedOutcome out;
  out.seed = seed;
  out.test = evaluate(model, data.test);
  out.validation = evaluate(model, data.validation);
  out.validation_composite = validation_composite(out.validation);
  out.wall_seconds = wall;
  if (options.probe) out.probe_auc = probe_auc(model, data.test, options.probe_options);
  return out;
}

CellOutcome aggregate(const ExperimentCell& cell, bool preferential, std::vector<SeedOutcome> runs) {
  CellOutcome out;
  out.cell = cell;
  out.preferential = preferential;
  std::vector<FairnessReport> tests;
  std::vector<double> composites;
  std::vector<std::optional<double>> probes;
  for (const auto& r : runs) {
    tests.push_back(r.test);
    composites.push_back(r.validation_composite);
    probes.push_back(r.probe_auc);
  }
  out.median_test = median_report(tests);
  out.median_validation_composite = median(composites);
  out.median_probe_auc = median(probes);
  out.runs = std::move(runs);
  return out;
}

}  // namespace

std::string config_label(const TrainConfig& config) {
  std::string label = "a" + format_double(config.alpha) + "_b" + format_double(config.beta);
  if (config.reconstruction == ReconstructionKind::kSquaredError) label += "_ae-n";
  return label;
}

FairnessReport median_report(const std::vector<FairnessReport>& reports) {
  if (reports.empty()) throw DimensionError("median_report: no reports");
  auto field = [&](auto member) {
    std::vector<std::optional<double>> values;
    for (const auto& r : reports) values.push_back(r.*member);
    return median(values);
  };
  FairnessReport m;
  std::vector<double> acc;
  for (const auto& r : reports) acc.push_back(r.accuracy);
  m.accuracy = median(acc);
  m.balanced_accuracy = field(&FairnessReport::balanced_accuracy);
  m.tpr_protected = field(&FairnessReport::tpr_protected);
  m.tpr_unprotected = field(&FairnessReport::tpr_unprotected);
  m.tnr_protected = field(&FairnessReport::tnr_protected);
  m.tnr_unprotected = field(&FairnessReport::tnr_unprotected);
  m.delta_fpr = field(&FairnessReport::delta_fpr);
  m.delta_fnr = field(&FairnessReport::delta_fnr);
  m.eq_odds = field(&FairnessReport::eq_odds);
  return m;
}

std::vector<CellOutcome> run_cells(const std::vector<ExperimentCell>& cells, const RawTable& raw,
                                   const ExperimentOptions& options) {
  if (cells.empty()) throw ConfigError("no configurations to run");
  if (options.seeds.empty()) throw ConfigError("no seeds given");
  for (const auto& c : cells) {
    c.config.validate();
    if (c.config.dataset != raw.id) throw ConfigError("configuration '" + c.label + "' targets another dataset");
  }

  std::vector<PreparedSplit> splits;
  splits.reserve(options.seeds.size());
  for (std::uint64_t seed : options.seeds) splits.push_back(prepare_split(raw, seed));

  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t s = 0; s < options.seeds.size(); ++s) jobs.push_back({c, s});
  }
  std::vector<std::optional<JobOutcome>> outcomes(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      {
        std::lock_guard lock(failure_mutex);
        if (failure) return;
      }
      try {
        const Job& job = jobs[j];
        TrainConfig config = cells[job.cell].config;
        config.seed = options.seeds[job.seed];
        const PreparedSplit& data = splits[job.seed];
        const RunResult result = train(config, data);
        JobOutcome out;
        if (result.pre_ps_checkpoint) {
          out.primary = summarize(result.pre_ps_checkpoint->model, data, config.seed, result.wall_seconds, options);
          out.after_ps = summarize(result.checkpoint.model, data, config.seed, result.wall_seconds, options);
        } else {
          out.primary = summarize(result.checkpoint.model, data, config.seed, result.wall_seconds, options);
        }
        outcomes[j] = std::move(out);
        if (options.on_run) {
          std::lock_guard lock(callback_mutex);
          options.on_run(cells[job.cell].label, config.seed, result);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, jobs.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<CellOutcome> result;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<SeedOutcome> primary;
    std::vector<SeedOutcome> after;
    for (std::size_t s = 0; s < options.seeds.size(); ++s) {
      const JobOutcome& o = *outcomes[c * options.seeds.size() + s];
      primary.push_back(o.primary);
      if (o.after_ps) after.push_back(*o.after_ps);
    }
    result.push_back(aggregate(cells[c], false, std::move(primary)));
    if (cells[c].config.preferential_sampling) result.push_back(aggregate(cells[c], true, std::move(after)));
  }
  return result;
}

std::vector<double> default_alpha_grid() { return {0.4, 0.5, 0.6, 0.7, 0.8, 0.9}; }
std::vector<double> default_beta_grid() { return {0.1, 0.2, 0.3, 0.4, 0.5}; }

std::vector<CellOutcome> grid_search(const TrainConfig& base, const std::vector<double>& alphas,
                                     const std::vector<double>& betas, const RawTable& raw,
                                     const ExperimentOptions& options) {
  if (alphas.empty() || betas.empty()) throw ConfigError("grid_search: empty grid");
  std::vector<ExperimentCell> cells;
  for (double a : alphas) {
    for (double b : betas) {
      TrainConfig c = base;
      c.alpha = a;
      c.beta = b;
      c.preferential_sampling = false;
      cells.push_back({config_label(c), c});
    }
  }
  auto ranked = run_cells(cells, raw, options);
  std::stable_sort(ranked.begin(), ranked.end(), [](const CellOutcome& x, const CellOutcome& y) {
    return x.median_validation_composite < y.median_validation_composite;
  });
  return ranked;
}

std::vector<CellOutcome> ablate(const TrainConfig& base, double alpha, double beta, const RawTable& raw,
                                const ExperimentOptions& options) {
  std::vector<ExperimentCell> cells;
  for (auto [a, b] : {std::pair{0.0, 0.0}, std::pair{alpha, 0.0}, std::pair{0.0, beta}, std::pair{alpha, beta}}) {
    TrainConfig c = base;
    c.alpha = a;
    c.beta = b;
    c.preferential_sampling = true;
    cells.push_back({config_label(c), c});
  }
  return run_cells(cells, raw, options);
}

std::vector<CellOutcome> compare_ae_losses(const TrainConfig& base, const RawTable& raw,
                                           const ExperimentOptions& options) {
  std::vector<ExperimentCell> cells;
  for (auto [label, kind] : {std::pair{"AE-M", ReconstructionKind::kMixed},
                             std::pair{"AE-N", ReconstructionKind::kSquaredError}}) {
    TrainConfig c = base;
    c.alpha = 0.0;
    c.beta = 0.0;
    c.preferential_sampling = false;
    c.reconstruction = kind;
    cells.push_back({label, c});
  }
  return run_cells(cells, raw, options);
}

std::string outcome_csv_rows(const CellOutcome& o, DatasetId dataset) {
  std::string out;
  for (const auto& r : o.runs) {
    out += report_csv_row(to_string(dataset), r.seed, o.cell.label, o.cell.config.alpha, o.cell.config.beta,
                          o.preferential, r.test);
  }
  return out;
}

std::string outcome_median_csv_row(const CellOutcome& o, DatasetId dataset) {
  return report_csv_row(to_string(dataset), std::string("median"), o.cell.label, o.cell.config.alpha,
                        o.cell.config.beta, o.preferential, o.median_test);
}

}  // namespace fairnn
