#include "fairnn/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace fairnn {

std::string to_string(Community c) {
  switch (c) {
    case Community::kProtectedPositive: return "s+";
    case Community::kProtectedNegative: return "s-";
    case Community::kUnprotectedPositive: return "sbar+";
    case Community::kUnprotectedNegative: return "sbar-";
  }
  return "?";
}

Community community_of(std::uint8_t protected_group, std::uint8_t label) {
  if (protected_group) return label ? Community::kProtectedPositive : Community::kProtectedNegative;
  return label ? Community::kUnprotectedPositive : Community::kUnprotectedNegative;
}

bool is_positive(Community c) {
  return c == Community::kProtectedPositive || c == Community::kUnprotectedPositive;
}

std::size_t CommunityCounts::group_size(Community c) const {
  const bool prot = c == Community::kProtectedPositive || c == Community::kProtectedNegative;
  return prot ? (*this)[Community::kProtectedPositive] + (*this)[Community::kProtectedNegative]
              : (*this)[Community::kUnprotectedPositive] + (*this)[Community::kUnprotectedNegative];
}

std::size_t CommunityCounts::class_size(Community c) const {
  return is_positive(c) ? (*this)[Community::kProtectedPositive] + (*this)[Community::kUnprotectedPositive]
                        : (*this)[Community::kProtectedNegative] + (*this)[Community::kUnprotectedNegative];
}

CommunityCounts count_communities(std::span<const std::uint8_t> protected_group, std::span<const std::uint8_t> label) {
  if (protected_group.size() != label.size()) throw DimensionError("count_communities: length mismatch");
  CommunityCounts counts;
  for (std::size_t i = 0; i < label.size(); ++i) {
    ++counts.count[static_cast<std::size_t>(community_of(protected_group[i], label[i]))];
  }
  counts.total = label.size();
  return counts;
}

std::size_t expected_community_size(std::size_t group_size, std::size_t class_size, std::size_t total) {
  if (total == 0) return 0;
  const double k = static_cast<double>(group_size) * static_cast<double>(class_size) / static_cast<double>(total);
  return static_cast<std::size_t>(std::llround(k));
}

std::string to_string(PreferentialKRule rule) {
  return rule == PreferentialKRule::kExpectedSize ? "expected" : "deficit";
}

PreferentialKRule parse_k_rule(const std::string& name) {
  if (name == "expected") return PreferentialKRule::kExpectedSize;
  if (name == "deficit") return PreferentialKRule::kDeficit;
  throw ConfigError("unknown preferential k rule '" + name + "' (expected or deficit)");
}

std::array<std::size_t, 4> preferential_k(const CommunityCounts& counts, PreferentialKRule rule) {
  std::array<std::size_t, 4> k{};
  for (Community c : kCommunities) {
    const std::size_t present = counts[c];
    const std::size_t expected = expected_community_size(counts.group_size(c), counts.class_size(c), counts.total);
    std::size_t value = expected;
    if (rule == PreferentialKRule::kDeficit) value = expected > present ? expected - present : present - expected;
    k[static_cast<std::size_t>(c)] = std::min(value, present);
  }
  return k;
}

ResampleOutcome resample_communities(std::span<const std::uint8_t> protected_group, std::span<const std::uint8_t> label,
                                     std::span<const double> scores, const std::array<std::size_t, 4>& k) {
  const std::size_t n = label.size();
  if (protected_group.size() != n || scores.size() != n) throw DimensionError("resample: length mismatch");
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) throw ConfigError("resample: scores must lie in [0, 1]");
  }

  std::array<std::vector<std::size_t>, 4> members;
  for (std::size_t i = 0; i < n; ++i) {
    members[static_cast<std::size_t>(community_of(protected_group[i], label[i]))].push_back(i);
  }

  ResampleOutcome out;
  std::vector<bool> removed(n, false);
  std::vector<std::size_t> duplicated;
  for (Community c : kCommunities) {
    auto& rows = members[static_cast<std::size_t>(c)];
    if (rows.empty()) {
      out.warnings.push_back("community " + to_string(c) + " is empty; skipped");
      continue;
    }
    std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(scores[a] - 0.5) < std::abs(scores[b] - 0.5);
    });
    const std::size_t take = std::min(k[static_cast<std::size_t>(c)], rows.size());
    for (std::size_t j = 0; j < take; ++j) {
      if (is_positive(c)) {
        duplicated.push_back(rows[j]);
      } else {
        removed[rows[j]] = true;
      }
    }
    out.moved[static_cast<std::size_t>(c)] = take;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) out.indices.push_back(i);
  }
  out.indices.insert(out.indices.end(), duplicated.begin(), duplicated.end());
  return out;
}

Dataset preferential_sample(const Dataset& train, std::span<const double> scores, PreferentialKRule rule,
                            std::vector<std::string>* warnings) {
  const auto counts = count_communities(train.protected_group, train.label);
  const auto k = preferential_k(counts, rule);
  auto outcome = resample_communities(train.protected_group, train.label, scores, k);
  if (warnings != nullptr) *warnings = std::move(outcome.warnings);
  return train.subset(outcome.indices);
}

}  // namespace fairnn
