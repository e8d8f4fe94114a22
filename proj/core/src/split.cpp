#include "fairnn/split.hpp"

#include <algorithm>
#include <string>

#include "fairnn/error.hpp"
#include "fairnn/rng.hpp"

namespace fairnn {

SplitSpec split(std::size_t n_instances, std::uint64_t seed) {
  if (n_instances < 10) throw ConfigError("split: need at least 10 instances, got " + std::to_string(n_instances));
  Rng rng = Rng::stream(seed, 0x5117);
  const auto order = rng.permutation(n_instances);
  const std::size_t n_test = n_instances / 2;
  const std::size_t n_train_all = n_instances - n_test;
  const std::size_t n_val = n_train_all / 5;

  SplitSpec spec;
  spec.seed = seed;
  spec.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  spec.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test),
                         order.begin() + static_cast<std::ptrdiff_t>(n_test + n_val));
  spec.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test + n_val), order.end());
  // Sorted sets make downstream subsets independent of the permutation order.
  std::sort(spec.train.begin(), spec.train.end());
  std::sort(spec.validation.begin(), spec.validation.end());
  std::sort(spec.test.begin(), spec.test.end());
  return spec;
}

bool is_partition(const SplitSpec& spec, std::size_t n_instances) {
  std::vector<int> hits(n_instances, 0);
  for (const auto* set : {&spec.train, &spec.validation, &spec.test}) {
    for (std::size_t i : *set) {
      if (i >= n_instances) return false;
      ++hits[i];
    }
  }
  return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

}  // namespace fairnn
