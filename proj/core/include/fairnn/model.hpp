#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fairnn/matrix.hpp"
#include "fairnn/ops.hpp"
#include "fairnn/params.hpp"
#include "fairnn/tape.hpp"

namespace fairnn {

/// Which reconstruction objective the decoder head is trained for.
enum class ReconstructionKind {
  kMixed,        // sigmoid numericals + softmax nominal blocks, squared error + cross entropy (AE-M)
  kSquaredError, // sigmoid on every column, squared error everywhere (AE-N)
};

std::string to_string(ReconstructionKind kind);
ReconstructionKind parse_reconstruction_kind(const std::string& name);

struct FairNNConfig {
  std::size_t input_dim = 0;
  std::vector<std::size_t> encoder_widths{64, 32, 10};  // last entry is the latent width
  std::size_t classifier_hidden = 32;
  OutputLayout layout;
  ReconstructionKind reconstruction = ReconstructionKind::kMixed;

  std::size_t latent_dim() const { return encoder_widths.empty() ? 0 : encoder_widths.back(); }
  /// Decoder widths mirror the encoder: latent -> ... -> input_dim.
  std::vector<std::size_t> decoder_widths() const;
  /// Throws ConfigError on inconsistent widths or layout.
  void validate() const;
};

/// A latent batch: codes and the group mask aligned with its rows.
struct LatentBatch {
  Matrix codes;
  std::vector<std::uint8_t> mask;
};

/// Autoencoder with a classifier head on the latent code.
///
/// Layers are stored in one ParamStore: encoder layers first, then decoder, then the
/// two classifier layers. Every hidden layer is followed by ReLU; the latent layer is linear.
class FairNN {
 public:
  struct Forward {
    Var latent;
    Var reconstruction;
    Var probability;  // B x 1
  };

  FairNN() = default;
  FairNN(FairNNConfig config, ParamStore params);

  static FairNN initialize(const FairNNConfig& config, std::uint64_t seed);
  static std::vector<std::pair<std::size_t, std::size_t>> layer_shapes(const FairNNConfig& config);

  const FairNNConfig& config() const noexcept { return config_; }
  ParamStore& params() noexcept { return params_; }
  const ParamStore& params() const noexcept { return params_; }

  std::size_t encoder_layers() const { return config_.encoder_widths.size(); }
  std::size_t decoder_layers() const { return config_.encoder_widths.size(); }
  std::size_t classifier_first_layer() const { return encoder_layers() + decoder_layers(); }

  // Taped pieces, bound to leaves created by bind(tape, params()).
  Var encode(Tape& tape, const ParamBinding& p, Var input) const;
  Var decode(Tape& tape, const ParamBinding& p, Var latent) const;
  Var classify(Tape& tape, const ParamBinding& p, Var latent) const;
  Forward forward(Tape& tape, const ParamBinding& p, const Matrix& input) const;

  // Untaped inference.
  LatentBatch encode_batch(const Matrix& input, std::span<const std::uint8_t> mask = {}) const;
  Matrix decode_batch(const Matrix& latent) const;
  std::vector<double> classify_batch(const Matrix& latent) const;
  std::vector<double> predict(const Matrix& input) const;

 private:
  FairNNConfig config_;
  ParamStore params_;
};

/// Hard label from a probability.
inline constexpr double kDecisionThreshold = 0.5;
std::vector<std::uint8_t> hard_labels(std::span<const double> probabilities, double threshold = kDecisionThreshold);

}  // namespace fairnn
