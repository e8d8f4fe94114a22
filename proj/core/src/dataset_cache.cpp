#include "fairnn/dataset_cache.hpp"

#include <sstream>

#include <json.hpp>

#include "fairnn/csv.hpp"

namespace fairnn {

std::string serialize_cache(const RawTable& table) {
  nlohmann::ordered_json header;
  header["dataset"] = to_string(table.id);
  header["attributes"] = nlohmann::ordered_json::array();
  for (const auto& attr : table.schema) {
    nlohmann::ordered_json a;
    a["name"] = attr.name;
    if (attr.kind == AttributeSchema::Kind::kNominal) {
      a["kind"] = "nominal";
      a["values"] = attr.values;
    } else {
      a["kind"] = "numerical";
    }
    header["attributes"].push_back(std::move(a));
  }
  header["rows"] = table.size();

  std::string out = "FAIRNN-CACHE " + std::to_string(kCacheFormatVersion) + "\n";
  out += header.dump() + "\n";
  std::vector<std::string> names{"row_id", "label", "group"};
  for (const auto& attr : table.schema) names.push_back(attr.name);
  out += csv_row(names);
  for (std::size_t r = 0; r < table.size(); ++r) {
    std::vector<std::string> fields{std::to_string(table.row_ids[r]), std::to_string(table.label[r]),
                                    std::to_string(table.protected_group[r])};
    for (std::size_t a = 0; a < table.schema.size(); ++a) {
      const double v = table.rows[r][a];
      fields.push_back(table.schema[a].kind == AttributeSchema::Kind::kNominal
                           ? std::to_string(static_cast<long long>(v))
                           : format_double(v));
    }
    out += csv_row(fields);
  }
  return out;
}

RawTable deserialize_cache(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("FAIRNN-CACHE ", 0) != 0) throw SchemaError("not a fairnn cache file");
  if (line != "FAIRNN-CACHE " + std::to_string(kCacheFormatVersion)) {
    throw SchemaError("unsupported cache version: " + line);
  }
  if (!std::getline(in, line)) throw SchemaError("cache: missing schema header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("cache: bad schema header: ") + e.what());
  }
  RawTable table;
  table.id = parse_dataset_id(header.at("dataset").get<std::string>());
  for (const auto& a : header.at("attributes")) {
    AttributeSchema attr;
    attr.name = a.at("name").get<std::string>();
    if (a.at("kind").get<std::string>() == "nominal") {
      attr.kind = AttributeSchema::Kind::kNominal;
      attr.values = a.at("values").get<std::vector<std::string>>();
    }
    table.schema.push_back(std::move(attr));
  }
  const auto expected_rows = header.at("rows").get<std::size_t>();
  if (!std::getline(in, line)) throw SchemaError("cache: missing column header");
  const std::size_t n_fields = table.schema.size() + 3;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != n_fields) throw SchemaError("cache: malformed row " + std::to_string(table.size()));
    table.row_ids.push_back(static_cast<std::size_t>(parse_double(fields[0])));
    table.label.push_back(static_cast<std::uint8_t>(parse_double(fields[1])));
    table.protected_group.push_back(static_cast<std::uint8_t>(parse_double(fields[2])));
    std::vector<double> row;
    for (std::size_t a = 0; a < table.schema.size(); ++a) row.push_back(parse_double(fields[a + 3]));
    table.rows.push_back(std::move(row));
  }
  if (table.size() != expected_rows) {
    throw SchemaError("cache: header declares " + std::to_string(expected_rows) + " rows, found " +
                      std::to_string(table.size()));
  }
  return table;
}

void write_cache(const std::filesystem::path& path, const RawTable& table) { write_file(path, serialize_cache(table)); }

RawTable read_cache(const std::filesystem::path& path) { return deserialize_cache(read_file(path)); }

}  // namespace fairnn
