#include "fairnn/checkpoint.hpp"

#include <json.hpp>

#include "fairnn/csv.hpp"

namespace fairnn {
namespace {

using Json = nlohmann::ordered_json;

Json matrix_json(const Matrix& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = std::vector<double>(m.data(), m.data() + m.size());
  return j;
}

Matrix matrix_from(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw SchemaError("checkpoint: matrix data length");
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

Json schema_json(const Schema& schema) {
  Json out = Json::array();
  for (const auto& attr : schema) {
    Json a;
    a["name"] = attr.name;
    if (attr.kind == AttributeSchema::Kind::kNominal) {
      a["kind"] = "nominal";
      a["values"] = attr.values;
    } else {
      a["kind"] = "numerical";
      a["max"] = attr.max;
    }
    out.push_back(std::move(a));
  }
  return out;
}

Schema schema_from(const nlohmann::json& j) {
  Schema schema;
  for (const auto& a : j) {
    AttributeSchema attr;
    attr.name = a.at("name").get<std::string>();
    if (a.at("kind").get<std::string>() == "nominal") {
      attr.kind = AttributeSchema::Kind::kNominal;
      attr.values = a.at("values").get<std::vector<std::string>>();
    } else {
      attr.max = a.at("max").get<double>();
    }
    schema.push_back(std::move(attr));
  }
  return schema;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& c) {
  const FairNNConfig& cfg = c.model.config();
  const ParamStore& params = c.model.params();
  Json j;
  j["format"] = "fairnn-checkpoint";
  j["version"] = kCheckpointFormatVersion;
  j["seed"] = c.seed;
  j["epoch"] = c.epoch;
  j["run"] = c.run;

  Json model;
  model["input_dim"] = cfg.input_dim;
  model["encoder_widths"] = cfg.encoder_widths;
  model["classifier_hidden"] = cfg.classifier_hidden;
  model["reconstruction"] = to_string(cfg.reconstruction);
  j["model"] = std::move(model);
  j["schema"] = schema_json(c.schema);

  Json layers = Json::array();
  for (const auto& layer : params.layers()) {
    Json l;
    l["weight"] = matrix_json(layer.weight);
    l["bias"] = matrix_json(layer.bias);
    layers.push_back(std::move(l));
  }
  j["layers"] = std::move(layers);

  Json adam;
  adam["step"] = params.adam().step;
  Json first = Json::array();
  Json second = Json::array();
  for (const auto& m : params.adam().first) first.push_back(matrix_json(m));
  for (const auto& v : params.adam().second) second.push_back(matrix_json(v));
  adam["first"] = std::move(first);
  adam["second"] = std::move(second);
  j["adam"] = std::move(adam);
  return j.dump(1) + "\n";
}

Checkpoint deserialize_checkpoint(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("checkpoint: not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "fairnn-checkpoint") throw SchemaError("checkpoint: wrong format tag");
    if (j.at("version").get<int>() != kCheckpointFormatVersion) throw SchemaError("checkpoint: unsupported version");

    Checkpoint c;
    c.seed = j.at("seed").get<std::uint64_t>();
    c.epoch = j.at("epoch").get<std::size_t>();
    c.run = j.at("run").get<std::map<std::string, std::string>>();
    c.schema = schema_from(j.at("schema"));

    FairNNConfig cfg;
    const auto& m = j.at("model");
    cfg.input_dim = m.at("input_dim").get<std::size_t>();
    cfg.encoder_widths = m.at("encoder_widths").get<std::vector<std::size_t>>();
    cfg.classifier_hidden = m.at("classifier_hidden").get<std::size_t>();
    cfg.reconstruction = parse_reconstruction_kind(m.at("reconstruction").get<std::string>());
    cfg.layout = output_layout(c.schema);

    ParamStore params = ParamStore::glorot(FairNN::layer_shapes(cfg), 0);
    const auto& layers = j.at("layers");
    if (layers.size() != params.layers().size()) throw SchemaError("checkpoint: layer count mismatch");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      params.layers()[i].weight = matrix_from(layers[i].at("weight"));
      params.layers()[i].bias = matrix_from(layers[i].at("bias"));
    }
    const auto& adam = j.at("adam");
    params.adam().step = adam.at("step").get<std::uint64_t>();
    params.adam().first.clear();
    params.adam().second.clear();
    for (const auto& a : adam.at("first")) params.adam().first.push_back(matrix_from(a));
    for (const auto& a : adam.at("second")) params.adam().second.push_back(matrix_from(a));
    if (params.adam().first.size() != params.tensor_count() || params.adam().second.size() != params.tensor_count()) {
      throw SchemaError("checkpoint: Adam state does not mirror parameters");
    }
    c.model = FairNN(std::move(cfg), std::move(params));
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("checkpoint: ") + e.what());
  } catch (const DimensionError& e) {
    throw SchemaError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  write_file(path, serialize_checkpoint(c));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return deserialize_checkpoint(read_file(path)); }

}  // namespace fairnn
