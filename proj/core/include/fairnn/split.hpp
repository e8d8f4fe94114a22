#pragma once

#include <cstdint>
#include <vector>

namespace fairnn {

/// Disjoint train/validation/test index sets over a dataset.
struct SplitSpec {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
};

/// Random 50/50 train/test partition, then 20% of the training half held out for
/// validation. Not stratified. Throws ConfigError when n < 10.
SplitSpec split(std::size_t n_instances, std::uint64_t seed);

/// True when every index in [0, n) appears in exactly one set.
bool is_partition(const SplitSpec& spec, std::size_t n_instances);

}  // namespace fairnn
