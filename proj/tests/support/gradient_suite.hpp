#pragma once

// Analytic-versus-finite-difference comparison of every objective term on small random nets.
// The analytic side runs the library's taped ops; the finite-difference side differentiates the
// straight-line reference objective in reference.hpp.

#include <string>
#include <vector>

#include "fairnn/gradcheck.hpp"
#include "fairnn/losses.hpp"
#include "fairnn/model.hpp"
#include "fairnn/rng.hpp"
#include "fairnn/train.hpp"
#include "reference.hpp"

namespace gradsuite {

using fairnn::Matrix;

enum class Term { kReconstruction, kKl, kBce, kSoftEqOdds, kTotal };

inline std::vector<Term> all_terms() {
  return {Term::kReconstruction, Term::kKl, Term::kBce, Term::kSoftEqOdds, Term::kTotal};
}

inline std::string name(Term t) {
  switch (t) {
    case Term::kReconstruction: return "reconstruction";
    case Term::kKl: return "kl";
    case Term::kBce: return "bce";
    case Term::kSoftEqOdds: return "soft_eqodds";
    case Term::kTotal: return "total";
  }
  return "?";
}

struct Problem {
  fairnn::FairNNConfig config;
  fairnn::FairNN model;
  Matrix x;
  std::vector<std::uint8_t> labels;
  std::vector<std::uint8_t> mask;
  double alpha = 0.0;
  double beta = 0.0;
};

// Widths <= 8, latent_dim in [2, 4], batch <= 16, both groups and both classes present in each group.
inline Problem make_problem(std::uint64_t seed, fairnn::ReconstructionKind kind = fairnn::ReconstructionKind::kMixed) {
  fairnn::Rng rng = fairnn::Rng::stream(seed, 0x9c);
  Problem p;
  const std::size_t latent = 2 + rng.index(3);
  p.config.input_dim = 7;
  p.config.encoder_widths = {4 + rng.index(5), latent};
  p.config.classifier_hidden = 3 + rng.index(6);
  p.config.layout.blocks = {{fairnn::OutputBlock::Kind::kNumerical, 0, 1},
                            {fairnn::OutputBlock::Kind::kNominal, 1, 3},
                            {fairnn::OutputBlock::Kind::kNumerical, 4, 1},
                            {fairnn::OutputBlock::Kind::kNominal, 5, 2}};
  p.config.reconstruction = kind;
  p.model = fairnn::FairNN::initialize(p.config, rng.next());
  // Non-zero biases so no unit sits exactly on a ReLU kink.
  for (auto& layer : p.model.params().layers()) {
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias.data()[i] = rng.uniform(-0.3, 0.3);
  }
  const std::size_t batch = 12 + rng.index(5);
  p.x = Matrix::Zero(static_cast<Eigen::Index>(batch), 7);
  for (std::size_t r = 0; r < batch; ++r) {
    const auto row = static_cast<Eigen::Index>(r);
    p.x(row, 0) = rng.uniform();
    p.x(row, 1 + static_cast<Eigen::Index>(rng.index(3))) = 1.0;
    p.x(row, 4) = rng.uniform();
    p.x(row, 5 + static_cast<Eigen::Index>(rng.index(2))) = 1.0;
    // First eight rows cover every (group, label) pair twice.
    p.mask.push_back(r < 8 ? static_cast<std::uint8_t>(r % 2) : static_cast<std::uint8_t>(rng.index(2)));
    p.labels.push_back(r < 8 ? static_cast<std::uint8_t>((r / 2) % 2) : static_cast<std::uint8_t>(rng.index(2)));
  }
  p.alpha = rng.uniform(0.0, 0.95);
  p.beta = rng.uniform(0.0, 0.95);
  return p;
}

inline fairnn::ParamGradients analytic(const Problem& p, Term term) {
  using namespace fairnn;
  if (term == Term::kTotal) {
    return batch_objective(p.model, p.x, p.labels, p.mask, p.alpha, p.beta).gradients;
  }
  Tape tape;
  const ParamBinding params = bind(tape, p.model.params());
  const auto fwd = p.model.forward(tape, params, p.x);
  Var out{};
  switch (term) {
    case Term::kReconstruction:
      out = p.config.reconstruction == ReconstructionKind::kMixed
                ? op::reconstruction_loss(tape, p.x, fwd.reconstruction, p.config.layout)
                : op::squared_error_loss(tape, p.x, fwd.reconstruction);
      break;
    case Term::kKl:
      out = *op::group_gaussian_kl(tape, fwd.latent, p.mask);
      break;
    case Term::kBce:
      out = op::bce_loss(tape, p.labels, fwd.probability);
      break;
    case Term::kSoftEqOdds:
      out = op::soft_equalized_odds(tape, p.labels, fwd.probability, p.mask);
      break;
    case Term::kTotal:
      break;
  }
  tape.backward(out);
  return collect_gradients(tape, params);
}

template <typename T = double>
T reference_value(const Problem& p, const fairnn::ParamStore& params, Term term) {
  if (term == Term::kTotal) {
    return ref::total_objective<T>(params, p.config, p.x, p.labels, p.mask, p.alpha, p.beta);
  }
  const ref::ForwardT<T> f = ref::forward<T>(params, p.config, p.x);
  switch (term) {
    case Term::kReconstruction:
      return p.config.reconstruction == fairnn::ReconstructionKind::kMixed
                 ? ref::mixed_reconstruction(p.x, f.xhat, p.config.layout)
                 : ref::squared_reconstruction(p.x, f.xhat);
    case Term::kKl: return *ref::group_kl(f.z, p.mask);
    case Term::kBce: return ref::bce(p.labels, f.p);
    case Term::kSoftEqOdds: return ref::soft_equalized_odds(p.labels, f.p, p.mask);
    case Term::kTotal: break;
  }
  return T(0);
}

// Central differences of the long-double reference objective. The perturbed parameters are
// doubles; the quotient uses the exact distance between them.
inline fairnn::ParamGradients reference_gradient(const Problem& p, Term term, double h = 1e-5) {
  fairnn::ParamStore params = p.model.params();
  fairnn::ParamGradients out = params.zero_gradients();
  for (std::size_t t = 0; t < params.tensor_count(); ++t) {
    Matrix& m = params.tensor(t);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double saved = m.data()[i];
      const double up = saved + h, down = saved - h;
      m.data()[i] = up;
      const long double f_up = reference_value<long double>(p, params, term);
      m.data()[i] = down;
      const long double f_down = reference_value<long double>(p, params, term);
      m.data()[i] = saved;
      out[t].data()[i] = static_cast<double>((f_up - f_down) / (static_cast<long double>(up) - down));
    }
  }
  return out;
}

// Largest per-entry relative error between the analytic gradient and central differences.
inline double relative_error(const Problem& p, Term term, double h = 1e-5) {
  return fairnn::max_relative_error(analytic(p, term), reference_gradient(p, term, h));
}

}  // namespace gradsuite
