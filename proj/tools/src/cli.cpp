#include "fairnn/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <json.hpp>
#include <sstream>

#include "fairnn/checkpoint.hpp"
#include "fairnn/csv.hpp"
#include "fairnn/dataset_cache.hpp"
#include "fairnn/error.hpp"
#include "fairnn/experiments.hpp"
#include "fairnn/loaders.hpp"
#include "fairnn/train.hpp"

#ifndef FAIRNN_VERSION
#define FAIRNN_VERSION "unknown"
#endif

namespace fairnn::cli {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  auto number = [&](const std::string& s) -> std::uint64_t {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size() || s.front() == '-') throw ConfigError("invalid seed '" + s + "'");
    return v;
  };
  for (const auto& part : split_csv_line(text)) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(number(part));
      continue;
    }
    const std::uint64_t lo = number(part.substr(0, dots));
    const std::uint64_t hi = number(part.substr(dots + 2));
    if (hi < lo) throw ConfigError("empty seed range '" + part + "'");
    if (hi - lo > 100000) throw ConfigError("seed range too large '" + part + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw ConfigError("no seeds given");
  return seeds;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  for (const auto& part : split_csv_line(text)) {
    try {
      values.push_back(parse_double(part));
    } catch (const SchemaError&) {
      throw ConfigError("invalid number '" + part + "' in list '" + text + "'");
    }
  }
  if (values.empty()) throw ConfigError("empty list");
  return values;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> values;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '-', '_');
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    values[key] = trim(line.substr(eq + 1));
  }
  return values;
}

fs::path resolve_cache_path(const std::string& flag, const std::string& dataset) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("FAIRNN_CACHE_DIR"); env != nullptr && *env != '\0') {
    return fs::path(env) / (dataset + ".cache");
  }
  return fs::path("cache") / (dataset + ".cache");
}

namespace {

// Output file plus its checksum for the manifest.
struct Manifest {
  std::string command;
  std::vector<std::string> arguments;
  std::map<std::string, std::string> config;
  std::vector<std::uint64_t> seeds;
  ordered_json inputs = ordered_json::array();
  ordered_json outputs = ordered_json::array();

  void input(const fs::path& path) {
    inputs.push_back({{"path", path.string()}, {"fnv1a64", hex64(file_checksum(path))}});
  }
  void output(const fs::path& path, std::string_view contents) {
    write_file(path, contents);
    outputs.push_back({{"path", path.string()}, {"fnv1a64", hex64(fnv1a64(contents))}});
  }
  void save(const fs::path& path) const {
    ordered_json doc;
    doc["tool"] = "fairnn";
    doc["version"] = FAIRNN_VERSION;
    doc["command"] = command;
    doc["arguments"] = arguments;
    doc["config"] = config;
    doc["seeds"] = seeds;
    doc["inputs"] = inputs;
    doc["outputs"] = outputs;
    write_file(path, doc.dump(2) + "\n");
  }
};

// Options shared by every training-based command.
struct TrainOptions {
  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_options;
  std::string config_file;
  std::string seeds;
  std::string cache;
  std::string out;
  std::size_t threads = 1;
  bool verbose = false;

  void attach(CLI::App& cmd, const std::string& default_out) {
    out = default_out;
    for (const auto& [key, value] : TrainConfig{}.to_map()) {
      std::string names = "--" + key;
      std::string dashed = key;
      std::replace(dashed.begin(), dashed.end(), '_', '-');
      if (dashed != key) names += ",--" + dashed;
      flag_options[key] = cmd.add_option(names, flag_values[key], "TrainConfig." + key + " (default " + value + ")");
    }
    cmd.add_option("--config", config_file, "Flat key=value file; flags override its entries");
    cmd.add_option("--seeds", seeds, "Seeds: N, A..B or comma list; overrides --seed");
    cmd.add_option("--cache", cache, "Prepared dataset cache (default $FAIRNN_CACHE_DIR/<dataset>.cache)");
    cmd.add_option("--out", out, "Output directory")->capture_default_str();
    cmd.add_option("--threads", threads, "Parallel training runs")->check(CLI::PositiveNumber);
    cmd.add_flag("--verbose,-v", verbose, "Per-epoch progress on stderr");
  }

  std::map<std::string, std::string> merged() const {
    std::map<std::string, std::string> values;
    if (!config_file.empty()) {
      std::string text;
      try {
        text = read_file(config_file);
      } catch (const IoError& e) {
        throw ConfigError(std::string("cannot read config file: ") + e.what());
      }
      values = parse_config_text(text);
    }
    for (const auto& [key, option] : flag_options) {
      if (option->count() > 0) values[key] = flag_values.at(key);
    }
    if (values.count("seeds") > 0) values.erase("seeds");
    return values;
  }

  std::map<std::string, std::string> file_values() const {
    return config_file.empty() ? std::map<std::string, std::string>{} : parse_config_text(read_file(config_file));
  }

  TrainConfig config() const {
    auto values = merged();
    TrainConfig c = TrainConfig::from_map(values);
    c.validate();
    return c;
  }

  std::vector<std::uint64_t> seed_list(const TrainConfig& c) const {
    if (!seeds.empty()) return parse_seeds(seeds);
    if (!config_file.empty()) {
      const auto file = file_values();
      if (const auto it = file.find("seeds"); it != file.end() && flag_options.at("seed")->count() == 0) {
        return parse_seeds(it->second);
      }
    }
    return {c.seed};
  }
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::vector<std::string> args;
};

RawTable load_cached(const fs::path& path, DatasetId expected) {
  if (!fs::exists(path)) {
    throw IoError("dataset cache '" + path.string() + "' not found; run 'fairnn prepare --dataset " +
                  to_string(expected) + " --input <raw files>' first");
  }
  RawTable raw = read_cache(path);
  if (raw.id != expected) {
    throw ConfigError("cache '" + path.string() + "' holds " + to_string(raw.id) + ", expected " +
                      to_string(expected));
  }
  return raw;
}

std::string ratio_text(const DatasetStats& s) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(2);
  o << "1:" << s.negatives_per_positive();
  return o.str();
}

ProgressFn progress_printer(std::ostream& err, bool verbose, std::uint64_t seed) {
  if (!verbose) return {};
  return [&err, seed](std::size_t epoch, const FairnessReport& v, double composite) {
    err << "seed " << seed << " epoch " << epoch << " val_composite " << format_double(composite)
        << " val_bal_acc " << format_optional(v.balanced_accuracy) << " val_eq_odds " << format_optional(v.eq_odds)
        << "\n";
  };
}

std::string steps_csv(const std::vector<StepLog>& steps) {
  std::string text = step_log_csv_header();
  for (const auto& s : steps) text += step_log_csv_row(s);
  return text;
}

int cmd_prepare(Context& ctx, const std::string& dataset, const std::string& input, const std::string& cache,
                bool keep_unknown) {
  const DatasetId id = parse_dataset_id(dataset);
  RawTable raw;
  if (id == DatasetId::kBank) {
    fs::path path = input;
    if (fs::is_directory(path)) path /= "bank-full.csv";
    BankFilter filter;
    filter.drop_unknown_job = !keep_unknown;
    filter.drop_unknown_education = !keep_unknown;
    raw = load_bank(path, filter);
  } else {
    raw = load_raw(id, input);
  }
  const fs::path cache_path = resolve_cache_path(cache, dataset);
  Manifest manifest;
  manifest.command = "prepare";
  manifest.arguments = ctx.args;
  if (fs::is_directory(input)) {
    for (const auto& entry : fs::directory_iterator(input)) {
      if (entry.is_regular_file()) manifest.input(entry.path());
    }
  } else {
    manifest.input(input);
  }
  manifest.output(cache_path, serialize_cache(raw));
  manifest.save(cache_path.string() + ".manifest.json");

  const DatasetStats s = stats(raw);
  ctx.out << "dataset: " << dataset << "\n"
          << "instances: " << s.instances << "\n"
          << "attributes: " << s.attributes << "\n"
          << "positives: " << s.positives << "\n"
          << "negatives: " << s.negatives << "\n"
          << "class_ratio: " << ratio_text(s) << "\n"
          << "protected_group: " << s.protected_count << "\n"
          << "unprotected_group: " << s.unprotected_count << "\n"
          << "cache: " << cache_path.string() << "\n"
          << "cache_fnv1a64: " << hex64(file_checksum(cache_path)) << "\n";
  return kOk;
}

int cmd_train(Context& ctx, const TrainOptions& opts) {
  const TrainConfig base = opts.config();
  const auto seeds = opts.seed_list(base);
  const std::string dataset = to_string(base.dataset);
  const fs::path cache_path = resolve_cache_path(opts.cache, dataset);
  const RawTable raw = load_cached(cache_path, base.dataset);
  const fs::path out_dir = opts.out;

  Manifest manifest;
  manifest.command = "train";
  manifest.arguments = ctx.args;
  manifest.config = base.to_map();
  manifest.config.erase("seed");
  manifest.seeds = seeds;
  manifest.input(cache_path);

  std::string summary = report_csv_header();
  std::map<std::uint64_t, std::string> rows;
  for (std::uint64_t seed : seeds) {
    TrainConfig c = base;
    c.seed = seed;
    const RunResult r = train(c, raw, progress_printer(ctx.err, opts.verbose, seed));
    for (const auto& w : r.warnings) ctx.err << "warning (seed " << seed << "): " << w << "\n";
    const std::string tag = "seed" + std::to_string(seed);
    manifest.output(out_dir / ("steps_" + tag + ".csv"), steps_csv(r.steps));
    manifest.output(out_dir / ("checkpoint_" + tag + ".json"), serialize_checkpoint(r.checkpoint));
    summary += report_csv_row(dataset, seed, config_label(c), c.alpha, c.beta, c.preferential_sampling,
                              r.test_report);
    if (opts.verbose) ctx.err << "seed " << seed << " done in " << r.wall_seconds << " s\n";
  }
  manifest.output(out_dir / "summary.csv", summary);
  manifest.save(out_dir / "manifest.json");
  ctx.out << summary;
  return kOk;
}

struct LoadedCheckpoint {
  Checkpoint checkpoint;
  TrainConfig config;
  PreparedSplit data;
  fs::path cache_path;
};

LoadedCheckpoint open_checkpoint(const std::string& path, const std::string& cache) {
  LoadedCheckpoint l;
  l.checkpoint = load_checkpoint(path);
  l.config = TrainConfig::from_map(l.checkpoint.run);
  l.config.seed = l.checkpoint.seed;
  l.cache_path = resolve_cache_path(cache, to_string(l.config.dataset));
  const RawTable raw = load_cached(l.cache_path, l.config.dataset);
  l.data = prepare_split(raw, l.checkpoint.seed, l.checkpoint.schema);
  return l;
}

const Dataset& pick_split(const PreparedSplit& data, const std::string& name) {
  if (name == "test") return data.test;
  if (name == "validation") return data.validation;
  if (name == "train") return data.train;
  throw ConfigError("unknown split '" + name + "' (expected train, validation or test)");
}

int cmd_eval(Context& ctx, const std::string& checkpoint, const std::string& cache, const std::string& split_name,
             const std::string& out) {
  const LoadedCheckpoint l = open_checkpoint(checkpoint, cache);
  const TrainConfig& c = l.config;
  const FairnessReport report = evaluate(l.checkpoint.model, pick_split(l.data, split_name));
  const std::string text = report_csv_header() + report_csv_row(to_string(c.dataset), c.seed, config_label(c), c.alpha,
                                                                c.beta, c.preferential_sampling, report);
  if (!out.empty()) {
    Manifest manifest;
    manifest.command = "eval";
    manifest.arguments = ctx.args;
    manifest.config = l.checkpoint.run;
    manifest.seeds = {c.seed};
    manifest.input(checkpoint);
    manifest.input(l.cache_path);
    manifest.output(out, text);
    manifest.save(out + ".manifest.json");
  }
  ctx.out << text;
  return kOk;
}

constexpr const char* kPlotScript = R"(# Scatter of two latent dimensions coloured by group.
# usage: python3 plot_latent.py latent.csv [out.png]
import sys
import pandas as pd
import matplotlib.pyplot as plt

data = pd.read_csv(sys.argv[1])
fig, ax = plt.subplots(figsize=(5, 5))
for group, name in ((1, "protected"), (0, "non-protected")):
    part = data[data.group == group]
    ax.scatter(part.z1, part.z2, s=2, alpha=0.4, label=name)
ax.legend()
fig.savefig(sys.argv[2] if len(sys.argv) > 2 else "latent.png", dpi=150)
)";

int cmd_export_latent(Context& ctx, const std::string& checkpoint, const std::string& cache,
                      const std::vector<std::size_t>& dims, const std::string& split_name, const std::string& out) {
  const LoadedCheckpoint l = open_checkpoint(checkpoint, cache);
  const Dataset& data = pick_split(l.data, split_name);
  const LatentBatch z = l.checkpoint.model.encode_batch(data.features, data.protected_group);
  std::ostringstream csv;
  export_latent_scatter(csv, z.codes, data.protected_group, data.label, {dims.at(0), dims.at(1)});
  Manifest manifest;
  manifest.command = "export-latent";
  manifest.arguments = ctx.args;
  manifest.config = l.checkpoint.run;
  manifest.seeds = {l.config.seed};
  manifest.input(checkpoint);
  manifest.input(l.cache_path);
  manifest.output(out, csv.str());
  manifest.output(fs::path(out).parent_path() / "plot_latent.py", kPlotScript);
  manifest.save(out + ".manifest.json");
  ctx.out << "wrote " << data.size() << " rows to " << out << "\n";
  return kOk;
}

ExperimentOptions experiment_options(Context& ctx, const TrainOptions& opts, const std::vector<std::uint64_t>& seeds) {
  ExperimentOptions o;
  o.seeds = seeds;
  o.threads = opts.threads;
  if (opts.verbose) {
    o.on_run = [&ctx](const std::string& label, std::uint64_t seed, const RunResult& r) {
      ctx.err << label << " seed " << seed << " done in " << r.wall_seconds << " s\n";
    };
  }
  return o;
}

std::string all_seed_rows(const std::vector<CellOutcome>& outcomes, DatasetId id) {
  std::string text = report_csv_header();
  for (const auto& o : outcomes) text += outcome_csv_rows(o, id);
  return text;
}

std::string median_rows(const std::vector<CellOutcome>& outcomes, DatasetId id) {
  std::string text = report_csv_header();
  for (const auto& o : outcomes) text += outcome_median_csv_row(o, id);
  return text;
}

std::string join(const std::vector<double>& values) {
  std::string text;
  for (double v : values) text += (text.empty() ? "" : ",") + format_double(v);
  return text;
}

Manifest experiment_manifest(Context& ctx, const std::string& command, const TrainConfig& base,
                             const std::vector<std::uint64_t>& seeds, const fs::path& cache_path) {
  Manifest m;
  m.command = command;
  m.arguments = ctx.args;
  m.config = base.to_map();
  m.config.erase("seed");
  m.seeds = seeds;
  m.input(cache_path);
  return m;
}

int cmd_gridsearch(Context& ctx, const TrainOptions& opts, const std::string& alpha_grid,
                   const std::string& beta_grid) {
  const TrainConfig base = opts.config();
  const auto seeds = opts.seed_list(base);
  const fs::path cache_path = resolve_cache_path(opts.cache, to_string(base.dataset));
  const RawTable raw = load_cached(cache_path, base.dataset);
  const auto alphas = alpha_grid.empty() ? default_alpha_grid() : parse_list(alpha_grid);
  const auto betas = beta_grid.empty() ? default_beta_grid() : parse_list(beta_grid);
  const auto ranked = grid_search(base, alphas, betas, raw, experiment_options(ctx, opts, seeds));

  std::string table = "rank,config,alpha,beta,validation_composite,accuracy,balanced_accuracy,eq_odds\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& o = ranked[i];
    table += csv_row({std::to_string(i + 1), o.cell.label, format_double(o.cell.config.alpha),
                      format_double(o.cell.config.beta), format_double(o.median_validation_composite),
                      format_double(o.median_test.accuracy), format_optional(o.median_test.balanced_accuracy),
                      format_optional(o.median_test.eq_odds)});
  }
  Manifest m = experiment_manifest(ctx, "gridsearch", base, seeds, cache_path);
  m.config.erase("alpha");
  m.config.erase("beta");
  m.config["alpha_grid"] = join(alphas);
  m.config["beta_grid"] = join(betas);
  m.output(fs::path(opts.out) / "gridsearch.csv", table);
  m.output(fs::path(opts.out) / "summary.csv", all_seed_rows(ranked, base.dataset));
  m.save(fs::path(opts.out) / "manifest.json");
  ctx.out << table;
  return kOk;
}

int cmd_ablate(Context& ctx, const TrainOptions& opts, bool probe) {
  TrainConfig base = opts.config();
  const auto merged = opts.merged();
  const auto [alpha_star, beta_star] = selected_weights(base.dataset);
  const double alpha = merged.count("alpha") > 0 ? base.alpha : alpha_star;
  const double beta = merged.count("beta") > 0 ? base.beta : beta_star;
  const auto seeds = opts.seed_list(base);
  const fs::path cache_path = resolve_cache_path(opts.cache, to_string(base.dataset));
  const RawTable raw = load_cached(cache_path, base.dataset);
  ExperimentOptions o = experiment_options(ctx, opts, seeds);
  o.probe = probe;
  const auto outcomes = ablate(base, alpha, beta, raw, o);

  base.alpha = alpha;
  base.beta = beta;
  Manifest m = experiment_manifest(ctx, "ablate", base, seeds, cache_path);
  const std::string medians = median_rows(outcomes, base.dataset);
  m.output(fs::path(opts.out) / "ablation.csv", medians);
  m.output(fs::path(opts.out) / "summary.csv", all_seed_rows(outcomes, base.dataset));
  if (probe) {
    std::string table = "config,alpha,beta,preferential_sampling,seed,probe_auc\n";
    for (const auto& oc : outcomes) {
      for (const auto& r : oc.runs) {
        table += csv_row({oc.cell.label, format_double(oc.cell.config.alpha), format_double(oc.cell.config.beta),
                          oc.preferential ? "1" : "0", std::to_string(r.seed), format_optional(r.probe_auc)});
      }
    }
    m.output(fs::path(opts.out) / "probe.csv", table);
  }
  m.save(fs::path(opts.out) / "manifest.json");
  ctx.out << medians;
  return kOk;
}

int cmd_compare_ae(Context& ctx, const TrainOptions& opts) {
  const TrainConfig base = opts.config();
  const auto seeds = opts.seed_list(base);
  const fs::path cache_path = resolve_cache_path(opts.cache, to_string(base.dataset));
  const RawTable raw = load_cached(cache_path, base.dataset);
  const auto outcomes = compare_ae_losses(base, raw, experiment_options(ctx, opts, seeds));
  Manifest m = experiment_manifest(ctx, "compare-ae", base, seeds, cache_path);
  const std::string rows = all_seed_rows(outcomes, base.dataset);
  m.output(fs::path(opts.out) / "compare_ae.csv", rows);
  m.output(fs::path(opts.out) / "compare_ae_median.csv", median_rows(outcomes, base.dataset));
  m.save(fs::path(opts.out) / "manifest.json");
  ctx.out << rows;
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err, args};
  CLI::App app{"Fair neural network training and evaluation", "fairnn"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FAIRNN_VERSION);

  std::string dataset = "adult";
  std::string input;
  std::string cache;
  bool keep_unknown = false;
  auto* prepare = app.add_subcommand("prepare", "Clean raw UCI files into a dataset cache and print statistics");
  prepare->add_option("--dataset", dataset, "adult or bank")->capture_default_str();
  prepare->add_option("--input", input, "Raw file or directory (adult.data + adult.test, bank-full.csv)")->required();
  prepare->add_option("--cache", cache, "Cache path (default $FAIRNN_CACHE_DIR/<dataset>.cache)");
  prepare->add_flag("--bank-keep-unknown", keep_unknown, "Bank: keep rows with unknown job/education");

  TrainOptions train_opts;
  auto* train_cmd = app.add_subcommand("train", "Train one configuration over one or more seeds");
  train_opts.attach(*train_cmd, "runs/train");

  std::string checkpoint;
  std::string split_name = "test";
  std::string out_path;
  auto* eval = app.add_subcommand("eval", "Re-evaluate a checkpoint on its split");
  eval->add_option("--checkpoint", checkpoint, "Checkpoint JSON")->required();
  eval->add_option("--cache", cache, "Dataset cache");
  eval->add_option("--split", split_name, "train, validation or test")->capture_default_str();
  eval->add_option("--out", out_path, "Also write the summary CSV here");

  TrainOptions grid_opts;
  std::string alpha_grid;
  std::string beta_grid;
  auto* grid = app.add_subcommand("gridsearch", "Search the (alpha, beta) grid ranked by validation composite");
  grid_opts.attach(*grid, "runs/gridsearch");
  grid->add_option("--alpha_grid,--alpha-grid", alpha_grid, "Comma list (default 0.4,...,0.9)");
  grid->add_option("--beta_grid,--beta-grid", beta_grid, "Comma list (default 0.1,...,0.5)");

  TrainOptions ablate_opts;
  bool probe = false;
  auto* ablate_cmd = app.add_subcommand("ablate", "Four weight settings, each without and with preferential sampling");
  ablate_opts.attach(*ablate_cmd, "runs/ablate");
  ablate_cmd->add_flag("--probe", probe, "Also report latent group-probe AUC per run");

  TrainOptions ae_opts;
  auto* compare = app.add_subcommand("compare-ae", "Mixed versus squared-error reconstruction at alpha = beta = 0");
  ae_opts.attach(*compare, "runs/compare-ae");

  std::vector<std::size_t> dims;
  std::string latent_out = "latent.csv";
  auto* latent = app.add_subcommand("export-latent", "Write two latent dimensions per instance as CSV");
  latent->add_option("--checkpoint", checkpoint, "Checkpoint JSON")->required();
  latent->add_option("--cache", cache, "Dataset cache");
  latent->add_option("--dims", dims, "Two latent dimension indices")->expected(2)->required();
  latent->add_option("--split", split_name, "train, validation or test")->capture_default_str();
  latent->add_option("--out", latent_out, "Output CSV")->capture_default_str();

  std::vector<const char*> argv{"fairnn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*prepare) return cmd_prepare(ctx, dataset, input, cache, keep_unknown);
    if (*train_cmd) return cmd_train(ctx, train_opts);
    if (*eval) return cmd_eval(ctx, checkpoint, cache, split_name, out_path);
    if (*grid) return cmd_gridsearch(ctx, grid_opts, alpha_grid, beta_grid);
    if (*ablate_cmd) return cmd_ablate(ctx, ablate_opts, probe);
    if (*compare) return cmd_compare_ae(ctx, ae_opts);
    if (*latent) return cmd_export_latent(ctx, checkpoint, cache, dims, split_name, latent_out);
  } catch (const ConfigError& e) {
    err << "fairnn: configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "fairnn: " << e.what() << "\n";
    return kIo;
  } catch (const SchemaError& e) {
    err << "fairnn: malformed input: " << e.what() << "\n";
    return kIo;
  } catch (const NumericError& e) {
    err << "fairnn: numeric failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const Error& e) {
    err << "fairnn: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace fairnn::cli
