#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace fairnn::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kNumeric = 3 };

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "3", "0..9" (inclusive) or "0,2,5"; ranges and lists may be mixed ("0..2,7").
std::vector<std::uint64_t> parse_seeds(const std::string& text);
/// Comma-separated doubles.
std::vector<double> parse_list(const std::string& text);

/// Flat key=value text; '#' starts a comment, blank lines ignored.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// --cache when given, else $FAIRNN_CACHE_DIR/<dataset>.cache, else ./cache/<dataset>.cache.
std::filesystem::path resolve_cache_path(const std::string& flag, const std::string& dataset);

}  // namespace fairnn::cli
