#pragma once

#include <filesystem>
#include <istream>
#include <vector>

#include "fairnn/dataset.hpp"

namespace fairnn {

/// Declared UCI attribute vocabularies.
Schema adult_schema();
Schema bank_schema();

/// Reads UCI Adult records (comma-separated) from one or more files, e.g. adult.data and adult.test.
/// Drops records with a "?" field and exact duplicate records; ">50K" is positive; female is protected.
RawTable load_adult(const std::vector<std::filesystem::path>& paths);
RawTable load_adult(const std::filesystem::path& path);
RawTable parse_adult(std::istream& in, std::size_t first_row_id = 0);

/// Options for the Bank Marketing filter.
struct BankFilter {
  bool drop_unknown_job = true;
  bool drop_unknown_education = true;
};

/// Reads UCI bank-full.csv (semicolon-separated, quoted). "yes" is positive; married is protected,
/// single/divorced unprotected.
RawTable load_bank(const std::filesystem::path& path, const BankFilter& filter = {});
RawTable parse_bank(std::istream& in, const BankFilter& filter = {});

/// Dispatches on dataset id. For Adult, `path` may be a directory holding adult.data/adult.test
/// or a single file.
RawTable load_raw(DatasetId id, const std::filesystem::path& path);

}  // namespace fairnn
