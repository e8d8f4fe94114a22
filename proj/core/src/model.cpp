#include "fairnn/model.hpp"

#include <string>

namespace fairnn {

std::string to_string(ReconstructionKind kind) {
  return kind == ReconstructionKind::kMixed ? "mixed" : "squared";
}

ReconstructionKind parse_reconstruction_kind(const std::string& name) {
  if (name == "mixed" || name == "ae-m") return ReconstructionKind::kMixed;
  if (name == "squared" || name == "ae-n") return ReconstructionKind::kSquaredError;
  throw ConfigError("unknown reconstruction kind '" + name + "' (mixed or squared)");
}

std::vector<std::size_t> FairNNConfig::decoder_widths() const {
  std::vector<std::size_t> widths;
  for (std::size_t i = encoder_widths.size() - 1; i-- > 0;) widths.push_back(encoder_widths[i]);
  widths.push_back(input_dim);
  return widths;
}

void FairNNConfig::validate() const {
  if (input_dim == 0) throw ConfigError("model: input_dim must be positive");
  if (encoder_widths.empty()) throw ConfigError("model: encoder needs at least one layer");
  for (std::size_t w : encoder_widths) {
    if (w == 0) throw ConfigError("model: zero-width encoder layer");
  }
  if (latent_dim() < 2) throw ConfigError("model: latent_dim must be >= 2");
  if (classifier_hidden == 0) throw ConfigError("model: classifier hidden width must be positive");
  if (layout.width() != input_dim) {
    throw ConfigError("model: output layout width " + std::to_string(layout.width()) + " != input_dim " +
                      std::to_string(input_dim));
  }
}

FairNN::FairNN(FairNNConfig config, ParamStore params) : config_(std::move(config)), params_(std::move(params)) {
  config_.validate();
  const auto shapes = layer_shapes(config_);
  if (params_.layers().size() != shapes.size()) throw DimensionError("FairNN: parameter layer count mismatch");
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const auto& layer = params_.layers()[i];
    require_shape(layer.weight, static_cast<Eigen::Index>(shapes[i].first), static_cast<Eigen::Index>(shapes[i].second),
                  "FairNN weight");
    require_shape(layer.bias, 1, static_cast<Eigen::Index>(shapes[i].second), "FairNN bias");
  }
}

std::vector<std::pair<std::size_t, std::size_t>> FairNN::layer_shapes(const FairNNConfig& config) {
  config.validate();
  std::vector<std::pair<std::size_t, std::size_t>> shapes;
  std::size_t in = config.input_dim;
  for (std::size_t w : config.encoder_widths) {
    shapes.emplace_back(in, w);
    in = w;
  }
  for (std::size_t w : config.decoder_widths()) {
    shapes.emplace_back(in, w);
    in = w;
  }
  shapes.emplace_back(config.latent_dim(), config.classifier_hidden);
  shapes.emplace_back(config.classifier_hidden, 1);
  return shapes;
}

FairNN FairNN::initialize(const FairNNConfig& config, std::uint64_t seed) {
  return FairNN(config, ParamStore::glorot(layer_shapes(config), seed));
}

Var FairNN::encode(Tape& tape, const ParamBinding& p, Var input) const {
  Var h = input;
  for (std::size_t i = 0; i < encoder_layers(); ++i) {
    h = op::affine(tape, h, p.weight(i), p.bias(i));
    if (i + 1 < encoder_layers()) h = op::relu(tape, h);
  }
  return h;
}

Var FairNN::decode(Tape& tape, const ParamBinding& p, Var latent) const {
  Var h = latent;
  const std::size_t first = encoder_layers();
  for (std::size_t i = 0; i < decoder_layers(); ++i) {
    h = op::affine(tape, h, p.weight(first + i), p.bias(first + i));
    if (i + 1 < decoder_layers()) h = op::relu(tape, h);
  }
  if (config_.reconstruction == ReconstructionKind::kSquaredError) return op::sigmoid(tape, h);
  return op::mixed_output_head(tape, h, config_.layout);
}

Var FairNN::classify(Tape& tape, const ParamBinding& p, Var latent) const {
  const std::size_t first = classifier_first_layer();
  Var h = op::relu(tape, op::affine(tape, latent, p.weight(first), p.bias(first)));
  h = op::affine(tape, h, p.weight(first + 1), p.bias(first + 1));
  return op::sigmoid(tape, h);
}

FairNN::Forward FairNN::forward(Tape& tape, const ParamBinding& p, const Matrix& input) const {
  if (static_cast<std::size_t>(input.cols()) != config_.input_dim) {
    throw DimensionError("FairNN: input has " + std::to_string(input.cols()) + " columns, expected " +
                         std::to_string(config_.input_dim));
  }
  Forward f;
  f.latent = encode(tape, p, tape.constant(input));
  f.reconstruction = decode(tape, p, f.latent);
  f.probability = classify(tape, p, f.latent);
  return f;
}

LatentBatch FairNN::encode_batch(const Matrix& input, std::span<const std::uint8_t> mask) const {
  if (static_cast<std::size_t>(input.cols()) != config_.input_dim) {
    throw DimensionError("encode_batch: input has " + std::to_string(input.cols()) + " columns, expected " +
                         std::to_string(config_.input_dim));
  }
  if (!mask.empty() && mask.size() != static_cast<std::size_t>(input.rows())) {
    throw DimensionError("encode_batch: mask length differs from batch size");
  }
  Tape tape;
  const ParamBinding p = bind(tape, params_);
  LatentBatch out;
  out.codes = tape.value(encode(tape, p, tape.constant(input)));
  out.mask.assign(mask.begin(), mask.end());
  return out;
}

Matrix FairNN::decode_batch(const Matrix& latent) const {
  if (static_cast<std::size_t>(latent.cols()) != config_.latent_dim()) throw DimensionError("decode_batch: latent width");
  Tape tape;
  const ParamBinding p = bind(tape, params_);
  return tape.value(decode(tape, p, tape.constant(latent)));
}

std::vector<double> FairNN::classify_batch(const Matrix& latent) const {
  if (static_cast<std::size_t>(latent.cols()) != config_.latent_dim()) {
    throw DimensionError("classify_batch: latent width");
  }
  Tape tape;
  const ParamBinding p = bind(tape, params_);
  const Matrix& probs = tape.value(classify(tape, p, tape.constant(latent)));
  return std::vector<double>(probs.data(), probs.data() + probs.size());
}

std::vector<double> FairNN::predict(const Matrix& input) const { return classify_batch(encode_batch(input).codes); }

std::vector<std::uint8_t> hard_labels(std::span<const double> probabilities, double threshold) {
  std::vector<std::uint8_t> out;
  out.reserve(probabilities.size());
  for (double p : probabilities) out.push_back(p >= threshold ? 1 : 0);
  return out;
}

}  // namespace fairnn
