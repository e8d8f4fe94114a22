#pragma once

#include <filesystem>
#include <string>

#include "fairnn/dataset.hpp"

namespace fairnn {

inline constexpr int kCacheFormatVersion = 1;

/// Text cache of a cleaned RawTable.
///
///   FAIRNN-CACHE 1
///   {"dataset":...,"attributes":[...],"rows":N}     (one JSON line)
///   row_id,label,group,<attr_1>,...,<attr_n>        (header)
///   one line per record; nominal cells are vocabulary indices,
///   numerical cells shortest round-trip decimals
///
/// Serialization is byte-for-byte deterministic.
std::string serialize_cache(const RawTable& table);
RawTable deserialize_cache(const std::string& text);

void write_cache(const std::filesystem::path& path, const RawTable& table);
RawTable read_cache(const std::filesystem::path& path);

}  // namespace fairnn
