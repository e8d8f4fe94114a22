#include "fairnn/loaders.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

namespace fairnn {
namespace {

using Kind = AttributeSchema::Kind;

AttributeSchema numerical(std::string name) { return {std::move(name), Kind::kNumerical, {}, 1.0}; }
AttributeSchema nominal(std::string name, std::vector<std::string> values) {
  return {std::move(name), Kind::kNominal, std::move(values), 1.0};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string_view unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    fields.emplace_back(unquote(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

double parse_number(const std::string& field, const std::string& attr, std::size_t row_id) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw SchemaError("row " + std::to_string(row_id) + ": attribute '" + attr + "' is not numeric: '" + field + "'");
  }
  return v;
}

// Encodes the attribute fields of one record into a raw row.
std::vector<double> encode_fields(const Schema& schema, const std::vector<std::string>& fields, std::size_t row_id) {
  std::vector<double> row(schema.size());
  for (std::size_t a = 0; a < schema.size(); ++a) {
    const auto& attr = schema[a];
    if (attr.kind == Kind::kNumerical) {
      row[a] = parse_number(fields[a], attr.name, row_id);
    } else {
      const auto index = attr.value_index(fields[a]);
      if (!index) {
        throw SchemaError("row " + std::to_string(row_id) + ": unknown value '" + fields[a] + "' for attribute '" +
                          attr.name + "'");
      }
      row[a] = static_cast<double>(*index);
    }
  }
  return row;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return in;
}

void require_rows(const RawTable& table, const std::string& what) {
  if (table.size() == 0) throw IoError(what + ": no usable records");
}

}  // namespace

Schema adult_schema() {
  return {
      numerical("age"),
      nominal("workclass", {"Private", "Self-emp-not-inc", "Self-emp-inc", "Federal-gov", "Local-gov", "State-gov",
                            "Without-pay", "Never-worked"}),
      numerical("fnlwgt"),
      nominal("education", {"Bachelors", "Some-college", "11th", "HS-grad", "Prof-school", "Assoc-acdm", "Assoc-voc",
                            "9th", "7th-8th", "12th", "Masters", "1st-4th", "10th", "Doctorate", "5th-6th",
                            "Preschool"}),
      numerical("education-num"),
      nominal("marital-status", {"Married-civ-spouse", "Divorced", "Never-married", "Separated", "Widowed",
                                 "Married-spouse-absent", "Married-AF-spouse"}),
      nominal("occupation", {"Tech-support", "Craft-repair", "Other-service", "Sales", "Exec-managerial",
                             "Prof-specialty", "Handlers-cleaners", "Machine-op-inspct", "Adm-clerical",
                             "Farming-fishing", "Transport-moving", "Priv-house-serv", "Protective-serv",
                             "Armed-Forces"}),
      nominal("relationship", {"Wife", "Own-child", "Husband", "Not-in-family", "Other-relative", "Unmarried"}),
      nominal("race", {"White", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other", "Black"}),
      nominal("sex", {"Female", "Male"}),
      numerical("capital-gain"),
      numerical("capital-loss"),
      numerical("hours-per-week"),
      nominal("native-country",
              {"United-States", "Cambodia", "England", "Puerto-Rico", "Canada", "Germany", "Outlying-US(Guam-USVI-etc)",
               "India", "Japan", "Greece", "South", "China", "Cuba", "Iran", "Honduras", "Philippines", "Italy",
               "Poland", "Jamaica", "Vietnam", "Mexico", "Portugal", "Ireland", "France", "Dominican-Republic", "Laos",
               "Ecuador", "Taiwan", "Haiti", "Columbia", "Hungary", "Guatemala", "Nicaragua", "Scotland", "Thailand",
               "Yugoslavia", "El-Salvador", "Trinadad&Tobago", "Peru", "Hong", "Holand-Netherlands"}),
  };
}

Schema bank_schema() {
  return {
      numerical("age"),
      nominal("job", {"admin.", "unknown", "unemployed", "management", "housemaid", "entrepreneur", "student",
                      "blue-collar", "self-employed", "retired", "technician", "services"}),
      nominal("marital", {"married", "divorced", "single"}),
      nominal("education", {"unknown", "secondary", "primary", "tertiary"}),
      nominal("default", {"yes", "no"}),
      numerical("balance"),
      nominal("housing", {"yes", "no"}),
      nominal("loan", {"yes", "no"}),
      nominal("contact", {"unknown", "telephone", "cellular"}),
      numerical("day"),
      nominal("month", {"jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"}),
      numerical("duration"),
      numerical("campaign"),
      numerical("pdays"),
      numerical("previous"),
      nominal("poutcome", {"unknown", "other", "failure", "success"}),
  };
}

RawTable parse_adult(std::istream& in, std::size_t first_row_id) {
  RawTable table;
  table.id = DatasetId::kAdult;
  table.schema = adult_schema();
  const std::size_t sex = 9;
  std::set<std::vector<std::string>> seen;
  std::string line;
  std::size_t row_id = first_row_id;
  while (std::getline(in, line)) {
    const std::size_t this_row = row_id++;
    const auto view = trim(line);
    if (view.empty() || view.front() == '|') continue;  // blank lines and the test-file banner
    auto fields = split(view, ',');
    if (fields.size() != table.schema.size() + 1) {
      throw SchemaError("row " + std::to_string(this_row) + ": expected 15 fields, got " +
                        std::to_string(fields.size()));
    }
    bool missing = false;
    for (const auto& f : fields) missing = missing || f == "?";
    if (missing) continue;
    std::string& label = fields.back();
    if (!label.empty() && label.back() == '.') label.pop_back();
    if (label != ">50K" && label != "<=50K") {
      throw SchemaError("row " + std::to_string(this_row) + ": unknown income label '" + label + "'");
    }
    if (!seen.insert(fields).second) continue;  // exact duplicate record
    table.rows.push_back(encode_fields(table.schema, fields, this_row));
    table.label.push_back(label == ">50K" ? 1 : 0);
    table.protected_group.push_back(fields[sex] == "Female" ? 1 : 0);
    table.row_ids.push_back(this_row);
  }
  return table;
}

RawTable load_adult(const std::vector<std::filesystem::path>& paths) {
  if (paths.empty()) throw IoError("load_adult: no input files");
  // Parse the concatenation so duplicate removal spans files.
  std::stringstream merged;
  for (const auto& p : paths) {
    auto in = open_or_throw(p);
    if (in.peek() != std::ifstream::traits_type::eof()) merged << in.rdbuf();
    merged << '\n';
  }
  RawTable table = parse_adult(merged);
  require_rows(table, "adult");
  return table;
}

RawTable load_adult(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files{path / "adult.data"};
    if (std::filesystem::exists(path / "adult.test")) files.push_back(path / "adult.test");
    return load_adult(files);
  }
  return load_adult(std::vector<std::filesystem::path>{path});
}

RawTable parse_bank(std::istream& in, const BankFilter& filter) {
  RawTable table;
  table.id = DatasetId::kBank;
  table.schema = bank_schema();
  const std::size_t job = 1;
  const std::size_t marital = 2;
  const std::size_t education = 3;
  std::string line;
  std::size_t row_id = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    const std::size_t this_row = row_id++;
    const auto view = trim(line);
    if (view.empty()) continue;
    auto fields = split(view, ';');
    if (!header_seen) {
      header_seen = true;
      if (!fields.empty() && fields[0] == "age") continue;
    }
    if (fields.size() != table.schema.size() + 1) {
      throw SchemaError("row " + std::to_string(this_row) + ": expected 17 fields, got " +
                        std::to_string(fields.size()));
    }
    if (filter.drop_unknown_job && fields[job] == "unknown") continue;
    if (filter.drop_unknown_education && fields[education] == "unknown") continue;
    const std::string& y = fields.back();
    if (y != "yes" && y != "no") {
      throw SchemaError("row " + std::to_string(this_row) + ": unknown subscription label '" + y + "'");
    }
    table.rows.push_back(encode_fields(table.schema, fields, this_row));
    table.label.push_back(y == "yes" ? 1 : 0);
    table.protected_group.push_back(fields[marital] == "married" ? 1 : 0);
    table.row_ids.push_back(this_row);
  }
  return table;
}

RawTable load_bank(const std::filesystem::path& path, const BankFilter& filter) {
  auto in = open_or_throw(path);
  RawTable table = parse_bank(in, filter);
  require_rows(table, "bank");
  return table;
}

RawTable load_raw(DatasetId id, const std::filesystem::path& path) {
  if (id == DatasetId::kAdult) return load_adult(path);
  if (std::filesystem::is_directory(path)) return load_bank(path / "bank-full.csv");
  return load_bank(path);
}

}  // namespace fairnn
