#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "fairnn/dataset.hpp"
#include "fairnn/model.hpp"

namespace fairnn {

inline constexpr int kCheckpointFormatVersion = 1;

/// Everything needed to rebuild a trained model and re-evaluate it on its split.
struct Checkpoint {
  FairNN model;
  Schema schema;                               // frozen normalization used at train time
  std::map<std::string, std::string> run;      // flat TrainConfig snapshot
  std::uint64_t seed = 0;
  std::size_t epoch = 0;
};

/// JSON document: format version, model config, layer shapes, row-major weights,
/// Adam moments and step, schema, run snapshot and seed. Doubles are written in
/// shortest round-trip form so save/load is bit-exact.
std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace fairnn
