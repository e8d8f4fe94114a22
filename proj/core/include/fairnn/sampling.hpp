#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fairnn/dataset.hpp"

namespace fairnn {

/// The four (group, class) cells. Index order: s+, s-, s̄+, s̄-.
enum class Community : std::size_t { kProtectedPositive = 0, kProtectedNegative, kUnprotectedPositive, kUnprotectedNegative };

inline constexpr std::array<Community, 4> kCommunities{Community::kProtectedPositive, Community::kProtectedNegative,
                                                       Community::kUnprotectedPositive,
                                                       Community::kUnprotectedNegative};

std::string to_string(Community c);
Community community_of(std::uint8_t protected_group, std::uint8_t label);
bool is_positive(Community c);

struct CommunityCounts {
  std::array<std::size_t, 4> count{};
  std::size_t total = 0;
  std::size_t operator[](Community c) const { return count[static_cast<std::size_t>(c)]; }
  std::size_t group_size(Community c) const;  // |v|: instances sharing c's group
  std::size_t class_size(Community c) const;  // |l|: instances sharing c's label
};

CommunityCounts count_communities(std::span<const std::uint8_t> protected_group, std::span<const std::uint8_t> label);

/// |v| * |l| / |D| rounded to the nearest integer.
std::size_t expected_community_size(std::size_t group_size, std::size_t class_size, std::size_t total);

/// How many instances each community gains (positives) or loses (negatives).
enum class PreferentialKRule {
  kExpectedSize,  // k = |v||l|/|D|, the formula read literally
  kDeficit,       // k = | |v||l|/|D| - |community| |
};

std::string to_string(PreferentialKRule rule);
PreferentialKRule parse_k_rule(const std::string& name);

/// Per-community k, capped at the community size.
std::array<std::size_t, 4> preferential_k(const CommunityCounts& counts, PreferentialKRule rule);

struct ResampleOutcome {
  std::vector<std::size_t> indices;     // rows of the input forming the resampled set
  std::array<std::size_t, 4> moved{};   // instances duplicated (positives) or removed (negatives)
  std::vector<std::string> warnings;
};

/// Duplicates the k positives and drops the k negatives of each community closest to the
/// decision boundary (smallest |score - 0.5|, ties by ascending row position).
ResampleOutcome resample_communities(std::span<const std::uint8_t> protected_group, std::span<const std::uint8_t> label,
                                     std::span<const double> scores, const std::array<std::size_t, 4>& k);

/// Full preferential sampling of a training set given the current classifier scores.
Dataset preferential_sample(const Dataset& train, std::span<const double> scores,
                            PreferentialKRule rule = PreferentialKRule::kDeficit,
                            std::vector<std::string>* warnings = nullptr);

}  // namespace fairnn
