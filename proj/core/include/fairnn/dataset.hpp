#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairnn/matrix.hpp"
#include "fairnn/ops.hpp"

namespace fairnn {

enum class DatasetId { kAdult, kBank };

std::string to_string(DatasetId id);
DatasetId parse_dataset_id(const std::string& name);

/// One raw attribute: numerical (normalized by its max) or nominal (one-hot over `values`).
struct AttributeSchema {
  enum class Kind { kNumerical, kNominal };

  std::string name;
  Kind kind = Kind::kNumerical;
  std::vector<std::string> values;  // nominal only, in one-hot order
  double max = 1.0;                 // numerical only, normalization divisor

  std::size_t encoded_width() const { return kind == Kind::kNominal ? values.size() : 1; }
  /// Index of `value` in the vocabulary, or nullopt.
  std::optional<std::size_t> value_index(const std::string& value) const;
};

using Schema = std::vector<AttributeSchema>;

/// Throws SchemaError unless vocabularies are non-empty and duplicate-free and every max > 0.
void validate_schema(const Schema& schema);
std::size_t encoded_width(const Schema& schema);
OutputLayout output_layout(const Schema& schema);

/// Cleaned, un-normalized instances. Nominal cells hold the vocabulary index.
struct RawTable {
  DatasetId id = DatasetId::kAdult;
  Schema schema;                             // vocabularies declared; max is not meaningful here
  std::vector<std::vector<double>> rows;     // rows[i][attribute]
  std::vector<std::uint8_t> label;           // 1 = positive class
  std::vector<std::uint8_t> protected_group; // 1 = protected group s
  std::vector<std::size_t> row_ids;          // line number provenance in the source file(s)

  std::size_t size() const { return rows.size(); }
};

/// Encoded instances ready for the network.
struct Dataset {
  DatasetId id = DatasetId::kAdult;
  Schema schema;
  Matrix features;                           // n x encoded_width(schema)
  std::vector<std::uint8_t> label;
  std::vector<std::uint8_t> protected_group;
  std::vector<std::size_t> row_ids;

  std::size_t size() const { return label.size(); }
  /// Rows selected by `indices`, in that order (duplicates allowed).
  Dataset subset(const std::vector<std::size_t>& indices) const;
};

/// Schema with numerical maxima taken over `indices` of `raw` (all rows when empty).
Schema fit_schema(const RawTable& raw, const std::vector<std::size_t>& indices = {});

/// Max-normalizes numerical columns and one-hot encodes nominal ones.
/// Values outside [0, max] are clamped into [0, 1] and counted in `clamped` when given.
Dataset encode(const RawTable& raw, const Schema& schema, std::size_t* clamped = nullptr);

/// Decodes the nominal value of attribute `attribute` from an encoded row.
std::string decode_nominal(const Dataset& data, std::size_t row, std::size_t attribute);

/// Summary printed by `prepare` for comparison against the dataset overview table.
struct DatasetStats {
  std::size_t instances = 0;
  std::size_t attributes = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t protected_count = 0;
  std::size_t unprotected_count = 0;
  double negatives_per_positive() const;
};

DatasetStats stats(const RawTable& raw);

}  // namespace fairnn
