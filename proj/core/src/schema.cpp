#include "fairnn/dataset.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace fairnn {

std::string to_string(DatasetId id) { return id == DatasetId::kAdult ? "adult" : "bank"; }

DatasetId parse_dataset_id(const std::string& name) {
  if (name == "adult") return DatasetId::kAdult;
  if (name == "bank") return DatasetId::kBank;
  throw ConfigError("unknown dataset '" + name + "' (expected adult or bank)");
}

std::optional<std::size_t> AttributeSchema::value_index(const std::string& value) const {
  const auto it = std::find(values.begin(), values.end(), value);
  if (it == values.end()) return std::nullopt;
  return static_cast<std::size_t>(it - values.begin());
}

void validate_schema(const Schema& schema) {
  if (schema.empty()) throw SchemaError("schema has no attributes");
  for (const auto& attr : schema) {
    if (attr.kind == AttributeSchema::Kind::kNominal) {
      if (attr.values.empty()) throw SchemaError("nominal attribute '" + attr.name + "' has no values");
      std::set<std::string> seen(attr.values.begin(), attr.values.end());
      if (seen.size() != attr.values.size()) {
        throw SchemaError("nominal attribute '" + attr.name + "' has duplicate values");
      }
    } else if (!(attr.max > 0.0)) {
      throw SchemaError("numerical attribute '" + attr.name + "' has max <= 0");
    }
  }
}

std::size_t encoded_width(const Schema& schema) {
  std::size_t w = 0;
  for (const auto& attr : schema) w += attr.encoded_width();
  return w;
}

OutputLayout output_layout(const Schema& schema) {
  OutputLayout layout;
  std::size_t offset = 0;
  for (const auto& attr : schema) {
    const bool nominal = attr.kind == AttributeSchema::Kind::kNominal;
    layout.blocks.push_back(
        {nominal ? OutputBlock::Kind::kNominal : OutputBlock::Kind::kNumerical, offset, attr.encoded_width()});
    offset += attr.encoded_width();
  }
  return layout;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.id = id;
  out.schema = schema;
  out.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t r = indices[i];
    if (r >= size()) throw DimensionError("subset index out of range");
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(r));
    out.label.push_back(label[r]);
    out.protected_group.push_back(protected_group[r]);
    out.row_ids.push_back(row_ids[r]);
  }
  return out;
}

Schema fit_schema(const RawTable& raw, const std::vector<std::size_t>& indices) {
  Schema schema = raw.schema;
  for (std::size_t a = 0; a < schema.size(); ++a) {
    if (schema[a].kind != AttributeSchema::Kind::kNumerical) continue;
    double peak = 0.0;
    auto visit = [&](std::size_t r) { peak = std::max(peak, raw.rows[r][a]); };
    if (indices.empty()) {
      for (std::size_t r = 0; r < raw.size(); ++r) visit(r);
    } else {
      for (std::size_t r : indices) visit(r);
    }
    if (!(peak > 0.0)) throw SchemaError("numerical attribute '" + schema[a].name + "' has max <= 0");
    schema[a].max = peak;
  }
  validate_schema(schema);
  return schema;
}

Dataset encode(const RawTable& raw, const Schema& schema, std::size_t* clamped) {
  validate_schema(schema);
  if (schema.size() != raw.schema.size()) throw SchemaError("schema attribute count differs from raw table");
  Dataset data;
  data.id = raw.id;
  data.schema = schema;
  data.features = Matrix::Zero(static_cast<Eigen::Index>(raw.size()), static_cast<Eigen::Index>(encoded_width(schema)));
  data.label = raw.label;
  data.protected_group = raw.protected_group;
  data.row_ids = raw.row_ids;
  std::size_t clamp_count = 0;
  for (std::size_t r = 0; r < raw.size(); ++r) {
    const auto& row = raw.rows[r];
    Eigen::Index col = 0;
    for (std::size_t a = 0; a < schema.size(); ++a) {
      const auto& attr = schema[a];
      if (attr.kind == AttributeSchema::Kind::kNumerical) {
        double v = row[a] / attr.max;
        if (v < 0.0 || v > 1.0) {
          v = std::clamp(v, 0.0, 1.0);
          ++clamp_count;
        }
        data.features(static_cast<Eigen::Index>(r), col) = v;
        col += 1;
      } else {
        const auto index = static_cast<std::size_t>(row[a]);
        if (row[a] < 0.0 || index >= attr.values.size()) {
          throw SchemaError("row " + std::to_string(raw.row_ids[r]) + ": nominal index out of range for '" +
                            attr.name + "'");
        }
        data.features(static_cast<Eigen::Index>(r), col + static_cast<Eigen::Index>(index)) = 1.0;
        col += static_cast<Eigen::Index>(attr.values.size());
      }
    }
  }
  if (clamped != nullptr) *clamped = clamp_count;
  return data;
}

std::string decode_nominal(const Dataset& data, std::size_t row, std::size_t attribute) {
  if (attribute >= data.schema.size() || data.schema[attribute].kind != AttributeSchema::Kind::kNominal) {
    throw SchemaError("decode_nominal: attribute is not nominal");
  }
  const auto layout = output_layout(data.schema);
  const auto& block = layout.blocks[attribute];
  const auto r = static_cast<Eigen::Index>(row);
  Eigen::Index hot = -1;
  for (std::size_t j = 0; j < block.width; ++j) {
    if (data.features(r, static_cast<Eigen::Index>(block.offset + j)) == 1.0) {
      if (hot >= 0) throw SchemaError("decode_nominal: more than one hot entry");
      hot = static_cast<Eigen::Index>(j);
    }
  }
  if (hot < 0) throw SchemaError("decode_nominal: no hot entry");
  return data.schema[attribute].values[static_cast<std::size_t>(hot)];
}

double DatasetStats::negatives_per_positive() const {
  return positives == 0 ? 0.0 : static_cast<double>(negatives) / static_cast<double>(positives);
}

DatasetStats stats(const RawTable& raw) {
  DatasetStats s;
  s.instances = raw.size();
  s.attributes = raw.schema.size();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    (raw.label[i] ? s.positives : s.negatives) += 1;
    (raw.protected_group[i] ? s.protected_count : s.unprotected_count) += 1;
  }
  return s;
}

}  // namespace fairnn
