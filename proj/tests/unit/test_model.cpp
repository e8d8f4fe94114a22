#include <doctest.h>

#include "fairnn/checkpoint.hpp"
#include "fairnn/error.hpp"
#include "fairnn/loaders.hpp"
#include "fairnn/model.hpp"
#include "fairnn/rng.hpp"
#include "reference.hpp"

using namespace fairnn;

namespace {

FairNNConfig adult_config() {
  const Schema schema = adult_schema();
  FairNNConfig c;
  c.input_dim = encoded_width(schema);
  c.layout = output_layout(schema);
  return c;
}

FairNNConfig toy_config(ReconstructionKind kind = ReconstructionKind::kMixed) {
  FairNNConfig c;
  c.input_dim = 6;
  c.encoder_widths = {5, 4, 3};
  c.classifier_hidden = 4;
  c.layout.blocks = {{OutputBlock::Kind::kNumerical, 0, 1}, {OutputBlock::Kind::kNominal, 1, 3},
                     {OutputBlock::Kind::kNumerical, 4, 1}, {OutputBlock::Kind::kNominal, 5, 1}};
  c.reconstruction = kind;
  return c;
}

Matrix random_input(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols) {
  Rng rng(seed);
  Matrix x(rows, cols);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform();
  return x;
}

}  // namespace

TEST_CASE("model: adult input gives a 10-dimensional latent batch") {
  const FairNNConfig config = adult_config();
  CHECK(config.input_dim == 105);
  const FairNN model = FairNN::initialize(config, 1);
  const Matrix x = random_input(2, 512, 105);
  const LatentBatch z = model.encode_batch(x);
  CHECK(z.codes.rows() == 512);
  CHECK(z.codes.cols() == 10);
  CHECK(model.decode_batch(z.codes).cols() == 105);
  CHECK(model.predict(x).size() == 512);
}

TEST_CASE("model: zero parameters give zero codes and probability one half") {
  FairNN model = FairNN::initialize(toy_config(), 0);
  for (std::size_t i = 0; i < model.params().tensor_count(); ++i) model.params().tensor(i).setZero();
  const Matrix x = random_input(3, 7, 6);
  const LatentBatch z = model.encode_batch(x);
  CHECK(z.codes.isZero());
  for (double p : model.classify_batch(z.codes)) CHECK(p == 0.5);
}

TEST_CASE("model: identical rows map to identical codes and predictions") {
  const FairNN model = FairNN::initialize(toy_config(), 5);
  Matrix x = random_input(4, 3, 6);
  x.row(2) = x.row(0);
  const Matrix z = model.encode_batch(x).codes;
  CHECK(z.row(0) == z.row(2));
  const auto p = model.predict(x);
  CHECK(p[0] == p[2]);
}

TEST_CASE("model: decoder heads respect their codomains") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const FairNNConfig config = toy_config();
    const FairNN model = FairNN::initialize(config, seed);
    const Matrix z = 3.0 * random_input(seed + 100, 9, 3).array() - 1.5;
    const Matrix xhat = model.decode_batch(z);
    CHECK(xhat.cols() == 6);
    for (Eigen::Index r = 0; r < xhat.rows(); ++r) {
      CHECK(xhat(r, 0) > 0.0);
      CHECK(xhat(r, 0) < 1.0);
      CHECK(xhat(r, 4) > 0.0);
      CHECK(xhat(r, 4) < 1.0);
      CHECK(std::abs(xhat.row(r).segment(1, 3).sum() - 1.0) <= 1e-9);
      CHECK(std::abs(xhat(r, 5) - 1.0) <= 1e-9);  // width-1 softmax block
    }
    for (double p : model.classify_batch(z)) {
      CHECK(p > 0.0);
      CHECK(p < 1.0);
    }
  }
}

TEST_CASE("model: squared-error variant uses a sigmoid on every column") {
  const FairNN model = FairNN::initialize(toy_config(ReconstructionKind::kSquaredError), 8);
  const Matrix xhat = model.decode_batch(random_input(9, 5, 3));
  CHECK(xhat.minCoeff() > 0.0);
  CHECK(xhat.maxCoeff() < 1.0);
  CHECK(std::abs(xhat.row(0).segment(1, 3).sum() - 1.0) > 1e-6);
}

TEST_CASE("model: forward pass matches the straight-line reference") {
  for (auto kind : {ReconstructionKind::kMixed, ReconstructionKind::kSquaredError}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const FairNNConfig config = toy_config(kind);
      const FairNN model = FairNN::initialize(config, seed);
      const Matrix x = random_input(seed + 50, 8, 6);
      const ref::Forward expected = ref::forward(model.params(), config, x);
      const Matrix z = model.encode_batch(x).codes;
      CHECK((z - expected.z).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((model.decode_batch(z) - expected.xhat).cwiseAbs().maxCoeff() < 1e-12);
      const auto p = model.predict(x);
      for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p[i] - expected.p[i]) < 1e-12);
    }
  }
}

TEST_CASE("model: shape and configuration errors") {
  const FairNN model = FairNN::initialize(toy_config(), 1);
  CHECK_THROWS_AS(model.encode_batch(Matrix::Zero(2, 5)), DimensionError);
  CHECK_THROWS_AS(model.decode_batch(Matrix::Zero(2, 4)), DimensionError);
  CHECK_THROWS_AS(model.classify_batch(Matrix::Zero(2, 2)), DimensionError);
  FairNNConfig bad = toy_config();
  bad.encoder_widths = {5, 1};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = toy_config();
  bad.input_dim = 7;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK(toy_config().decoder_widths() == std::vector<std::size_t>{4, 5, 6});
}

TEST_CASE("model: hard labels threshold at one half") {
  const std::vector<double> p{0.2, 0.5, 0.7, 0.4999};
  CHECK(hard_labels(p) == std::vector<std::uint8_t>{0, 1, 1, 0});
}

TEST_CASE("checkpoint: round trip is bit-exact, including Adam state") {
  const FairNNConfig config = toy_config();
  FairNN model = FairNN::initialize(config, 12);
  ParamGradients g = model.params().zero_gradients();
  for (auto& m : g) m.setConstant(0.123456789);
  adam_step(model.params(), g, 0.01);
  adam_step(model.params(), g, 0.01);

  Schema schema{AttributeSchema{"a", AttributeSchema::Kind::kNumerical, {}, 3.7},
                AttributeSchema{"b", AttributeSchema::Kind::kNominal, {"x", "y", "z"}, 1.0},
                AttributeSchema{"c", AttributeSchema::Kind::kNumerical, {}, 1.0 / 3.0},
                AttributeSchema{"d", AttributeSchema::Kind::kNominal, {"only"}, 1.0}};
  const Checkpoint saved{model, schema, {{"alpha", "0.9"}, {"dataset", "adult"}}, 77, 41};
  const std::string text = serialize_checkpoint(saved);
  const Checkpoint loaded = deserialize_checkpoint(text);
  CHECK(loaded.model.params() == model.params());
  CHECK(loaded.model.params().adam().step == 2);
  CHECK(loaded.seed == 77);
  CHECK(loaded.epoch == 41);
  CHECK(loaded.run == saved.run);
  CHECK(loaded.schema[2].max == 1.0 / 3.0);
  CHECK(serialize_checkpoint(loaded) == text);
  const Matrix x = random_input(1, 4, 6);
  CHECK(loaded.model.predict(x) == model.predict(x));
}

TEST_CASE("checkpoint: malformed documents are schema errors") {
  CHECK_THROWS_AS(deserialize_checkpoint("{"), SchemaError);
  CHECK_THROWS_AS(deserialize_checkpoint("{\"format\":\"other\"}"), SchemaError);
  const FairNN model = FairNN::initialize(toy_config(), 1);
  std::string text = serialize_checkpoint(Checkpoint{model, {}, {}, 0, 0});
  const std::string version = "\"version\": 1";
  const auto pos = text.find(version);
  REQUIRE(pos != std::string::npos);
  text.replace(pos, version.size(), "\"version\": 9");
  CHECK_THROWS_AS(deserialize_checkpoint(text), SchemaError);
}
