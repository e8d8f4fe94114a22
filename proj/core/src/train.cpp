#include "fairnn/train.hpp"

#include <array>
#include <chrono>
#include <sstream>

#include "fairnn/csv.hpp"
#include "fairnn/rng.hpp"

namespace fairnn {
namespace {

std::string join_widths(const std::vector<std::size_t>& widths) {
  std::string s;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (i > 0) s += ',';
    s += std::to_string(widths[i]);
  }
  return s;
}

std::vector<std::size_t> parse_widths(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& part : split_csv_line(text)) {
    out.push_back(static_cast<std::size_t>(parse_double(part)));
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError("'" + key + "' expects a boolean, got '" + v + "'");
}

double parse_number_field(const std::string& key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (const SchemaError&) {
    throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
  }
}

std::size_t parse_count(const std::string& key, const std::string& v) {
  const double d = parse_number_field(key, v);
  if (d < 0 || d != static_cast<double>(static_cast<std::size_t>(d))) {
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'");
  }
  return static_cast<std::size_t>(d);
}

FairNNConfig model_config(const TrainConfig& config, const Schema& schema) {
  FairNNConfig m;
  m.input_dim = encoded_width(schema);
  m.encoder_widths = config.encoder_widths;
  m.classifier_hidden = config.classifier_hidden;
  m.layout = output_layout(schema);
  m.reconstruction = config.reconstruction;
  return m;
}

struct Batch {
  Matrix features;
  std::vector<std::uint8_t> label;
  std::vector<std::uint8_t> mask;
};

Batch gather(const Dataset& data, std::span<const std::size_t> rows) {
  Batch b;
  std::vector<Eigen::Index> idx(rows.begin(), rows.end());
  b.features = data.features(idx, Eigen::all);
  for (std::size_t r : rows) {
    b.label.push_back(data.label[r]);
    b.mask.push_back(data.protected_group[r]);
  }
  return b;
}

std::string describe(const LossBreakdown& b) {
  std::ostringstream s;
  s << "recon=" << b.recon << " kl=" << b.kl << " bce=" << b.bce << " eqodds_soft=" << b.eqodds_soft
    << " total=" << b.total;
  return s.str();
}

// Runs `epochs` passes over `train`, keeping the validation-best parameters.
struct PhaseResult {
  ParamStore best;
  std::size_t best_epoch = 0;
  double best_composite = 0.0;
  bool have_best = false;
};

PhaseResult run_phase(FairNN& model, const TrainConfig& config, const Dataset& train, const Dataset& validation,
                      std::size_t epochs, std::size_t first_epoch, bool ps_phase, Rng& rng, RunResult& result,
                      const ProgressFn& progress) {
  PhaseResult phase;
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t e = 0; e < epochs; ++e) {
    const std::size_t epoch = first_epoch + e;
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, order.size() - start);
      if (len < 2) continue;
      const Batch batch = gather(train, std::span<const std::size_t>(order).subspan(start, len));
      StepObjective step;
      try {
        step = batch_objective(model, batch.features, batch.label, batch.mask, config.alpha, config.beta);
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", step " +
                           std::to_string(result.steps.size()) + ": " + e.what());
      }
      if (!std::isfinite(step.breakdown.total)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ": " + describe(step.breakdown));
      }
      adam_step(model.params(), step.gradients, config.lr);
      result.steps.push_back(StepLog{result.steps.size(), epoch, ps_phase, step.breakdown});
    }
    const FairnessReport report = evaluate(model, validation);
    const double composite = validation_composite(report);
    if (progress) progress(epoch, report, composite);
    if (!phase.have_best || composite < phase.best_composite) {
      phase.best = model.params();
      phase.best_epoch = epoch;
      phase.best_composite = composite;
      phase.have_best = true;
    }
  }
  return phase;
}

}  // namespace

void TrainConfig::validate() const {
  check_balance_weight(alpha, "alpha");
  check_balance_weight(beta, "beta");
  if (batch_size < 2) throw ConfigError("batch_size must be >= 2");
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (encoder_widths.empty() || encoder_widths.back() < 2) throw ConfigError("latent width must be >= 2");
  if (classifier_hidden == 0) throw ConfigError("classifier_hidden must be positive");
}

std::map<std::string, std::string> TrainConfig::to_map() const {
  return {
      {"dataset", to_string(dataset)},
      {"alpha", format_double(alpha)},
      {"beta", format_double(beta)},
      {"batch_size", std::to_string(batch_size)},
      {"lr", format_double(lr)},
      {"epochs", std::to_string(epochs)},
      {"seed", std::to_string(seed)},
      {"preferential_sampling", preferential_sampling ? "1" : "0"},
      {"ps_epochs", std::to_string(ps_epochs)},
      {"ps_k_rule", to_string(ps_k_rule)},
      {"encoder_widths", join_widths(encoder_widths)},
      {"classifier_hidden", std::to_string(classifier_hidden)},
      {"reconstruction", to_string(reconstruction)},
  };
}

TrainConfig TrainConfig::from_map(const std::map<std::string, std::string>& values, TrainConfig c) {
  for (const auto& [key, v] : values) {
    if (key == "dataset") {
      c.dataset = parse_dataset_id(v);
    } else if (key == "alpha") {
      c.alpha = parse_number_field(key, v);
    } else if (key == "beta") {
      c.beta = parse_number_field(key, v);
    } else if (key == "batch_size") {
      c.batch_size = parse_count(key, v);
    } else if (key == "lr") {
      c.lr = parse_number_field(key, v);
    } else if (key == "epochs") {
      c.epochs = parse_count(key, v);
    } else if (key == "seed") {
      c.seed = parse_count(key, v);
    } else if (key == "preferential_sampling") {
      c.preferential_sampling = parse_bool(key, v);
    } else if (key == "ps_epochs") {
      c.ps_epochs = parse_count(key, v);
    } else if (key == "ps_k_rule") {
      c.ps_k_rule = parse_k_rule(v);
    } else if (key == "encoder_widths") {
      try {
        c.encoder_widths = parse_widths(v);
      } catch (const SchemaError&) {
        throw ConfigError("'encoder_widths' expects comma-separated integers, got '" + v + "'");
      }
    } else if (key == "classifier_hidden") {
      c.classifier_hidden = parse_count(key, v);
    } else if (key == "reconstruction") {
      c.reconstruction = parse_reconstruction_kind(v);
    } else {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
  }
  return c;
}

TrainConfig TrainConfig::from_map(const std::map<std::string, std::string>& values) {
  return from_map(values, TrainConfig{});
}

std::pair<double, double> selected_weights(DatasetId id) {
  return id == DatasetId::kAdult ? std::pair{0.9, 0.2} : std::pair{0.8, 0.4};
}

PreparedSplit prepare_split(const RawTable& raw, std::uint64_t seed) {
  const SplitSpec spec = split(raw.size(), seed);
  return prepare_split(raw, seed, fit_schema(raw, spec.train));
}

PreparedSplit prepare_split(const RawTable& raw, std::uint64_t seed, const Schema& frozen) {
  PreparedSplit p;
  p.split = split(raw.size(), seed);
  p.schema = frozen;
  const Dataset all = encode(raw, frozen);
  p.train = all.subset(p.split.train);
  p.validation = all.subset(p.split.validation);
  p.test = all.subset(p.split.test);
  return p;
}

StepObjective batch_objective(const FairNN& model, const Matrix& features, std::span<const std::uint8_t> labels,
                              std::span<const std::uint8_t> mask, double alpha, double beta) {
  check_balance_weight(alpha, "alpha");
  check_balance_weight(beta, "beta");
  if (labels.size() != static_cast<std::size_t>(features.rows()) || mask.size() != labels.size()) {
    throw DimensionError("batch_objective: labels/mask length differs from batch");
  }
  Tape tape;
  const ParamBinding params = bind(tape, model.params());
  const auto fwd = model.forward(tape, params, features);

  const Var recon = model.config().reconstruction == ReconstructionKind::kMixed
                        ? op::reconstruction_loss(tape, features, fwd.reconstruction, model.config().layout)
                        : op::squared_error_loss(tape, features, fwd.reconstruction);
  const std::optional<Var> kl = op::group_gaussian_kl(tape, fwd.latent, mask);
  const Var bce = op::bce_loss(tape, labels, fwd.probability);
  SoftEqOdds eo_info;
  const Var eo = op::soft_equalized_odds(tape, labels, fwd.probability, mask, &eo_info);

  std::vector<Var> terms{recon, bce, eo};
  std::vector<double> weights{1.0 - alpha, 1.0 - beta, beta};
  if (kl) {
    terms.push_back(*kl);
    weights.push_back(alpha);
  }
  const Var total = op::weighted_sum(tape, terms, weights);

  StepObjective out;
  out.breakdown = total_loss(tape.scalar(recon), kl ? tape.scalar(*kl) : 0.0, tape.scalar(bce), tape.scalar(eo), alpha,
                             beta);
  out.breakdown.kl_skipped = !kl.has_value();
  out.breakdown.eqodds_incomplete = eo_info.fpr_dropped || eo_info.fnr_dropped;
  tape.backward(total);
  out.gradients = collect_gradients(tape, params);
  return out;
}

std::string step_log_csv_header() { return "step,recon,kl,bce,eqodds_soft,L_ae,L_cls,total\n"; }

std::string step_log_csv_row(const StepLog& log) {
  const LossBreakdown& b = log.loss;
  return csv_row({std::to_string(log.step), format_double(b.recon), format_double(b.kl), format_double(b.bce),
                  format_double(b.eqodds_soft), format_double(b.ae), format_double(b.cls), format_double(b.total)});
}

FairnessReport evaluate(const FairNN& model, const Dataset& data) {
  const auto probs = model.predict(data.features);
  return fairness_report(confusion(data.label, hard_labels(probs), data.protected_group));
}

double validation_composite(const FairnessReport& report) {
  const double bal = report.balanced_accuracy.value_or(0.0);
  const double eo = report.eq_odds.value_or(2.0);
  return (1.0 - bal) + eo;
}

RunResult train(const TrainConfig& config, const PreparedSplit& data, const ProgressFn& progress) {
  config.validate();
  if (config.dataset != data.train.id) throw ConfigError("train: config dataset differs from data");
  const auto started = std::chrono::steady_clock::now();

  RunResult result;
  result.config = config;
  FairNN model = FairNN::initialize(model_config(config, data.schema), Rng::stream(config.seed, 0x1417).next());
  Rng shuffle_rng = Rng::stream(config.seed, 0x5e1f);

  auto make_checkpoint = [&](const ParamStore& params, std::size_t epoch) {
    return Checkpoint{FairNN(model.config(), params), data.schema, config.to_map(), config.seed, epoch};
  };

  PhaseResult main = run_phase(model, config, data.train, data.validation, config.epochs, 0, false, shuffle_rng,
                               result, progress);
  result.checkpoint = make_checkpoint(main.best, main.best_epoch);
  result.selected_epoch = main.best_epoch;
  result.selected_composite = main.best_composite;

  if (config.preferential_sampling) {
    result.pre_ps_checkpoint = result.checkpoint;
    result.pre_ps_test_report = evaluate(result.checkpoint.model, data.test);
    model.params() = main.best;
    const auto scores = model.predict(data.train.features);
    std::vector<std::string> warnings;
    const Dataset resampled = preferential_sample(data.train, scores, config.ps_k_rule, &warnings);
    result.warnings.insert(result.warnings.end(), warnings.begin(), warnings.end());
    PhaseResult ps = run_phase(model, config, resampled, data.validation, config.ps_epochs, config.epochs, true,
                               shuffle_rng, result, progress);
    if (ps.have_best) {
      result.checkpoint = make_checkpoint(ps.best, ps.best_epoch);
      result.selected_epoch = ps.best_epoch;
      result.selected_composite = ps.best_composite;
    }
  }

  result.test_report = evaluate(result.checkpoint.model, data.test);
  result.validation_report = evaluate(result.checkpoint.model, data.validation);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

RunResult train(const TrainConfig& config, const RawTable& raw, const ProgressFn& progress) {
  return train(config, prepare_split(raw, config.seed), progress);
}

double probe_auc(const FairNN& model, const Dataset& data, const ProbeOptions& options) {
  return latent_probe_auc(model.encode_batch(data.features).codes, data.protected_group, options);
}

}  // namespace fairnn
