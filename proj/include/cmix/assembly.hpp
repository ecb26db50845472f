#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmix/rng.hpp"

namespace cmix {

/// One translation direction of a joint-training corpus.
struct Direction {
  std::string name;
  std::string source_path;
  std::string target_path;
  std::string proxy;  ///< "[2xx]", prepended to every source line
  std::optional<std::size_t> sample;
};

/// True for "[2xx]" with a lowercase two-letter code.
bool valid_proxy(std::string_view token);
inline std::string proxy_for(std::string_view iso) { return "[2" + std::string(iso) + "]"; }

/// k distinct indices of 0..n-1 drawn uniformly, ascending. Throws when k > n.
std::vector<std::size_t> undersample_indices(std::size_t n, std::size_t k, std::uint64_t seed);

template <typename T>
std::vector<T> undersample(const std::vector<T>& corpus, std::size_t k, std::uint64_t seed) {
  std::vector<T> out;
  out.reserve(k);
  for (std::size_t i : undersample_indices(corpus.size(), k, seed)) out.push_back(corpus[i]);
  return out;
}

struct DirectionSummary {
  std::string name;
  std::string proxy;
  std::size_t lines_in = 0;
  std::size_t lines_out = 0;
};

struct JointCorpus {
  std::vector<std::string> source;
  std::vector<std::string> target;
  std::vector<DirectionSummary> directions;
};

/// Undersamples each direction (seed derived from `seed` and the direction's
/// position), prefixes source lines with the proxy token and concatenates in
/// listed order. With `shuffle`, the joined lines get one seeded permutation.
JointCorpus assemble_joint(const std::vector<Direction>& directions, std::uint64_t seed,
                           bool shuffle = false);

void write_joint(const JointCorpus& corpus, const std::string& source_path,
                 const std::string& target_path);

/// A monolingual-side corpus paired with English; `source` holds the
/// non-English side.
struct CorpusPaths {
  std::string source;
  std::string target;
  /// Lines kept per direction; nullopt means "all".
  std::optional<std::size_t> sample;
};

inline constexpr std::string_view kRecipeNames[] = {"zcmt", "rcmt_roman", "rcmt_roman_devan"};

struct RecipeConfig {
  std::string recipe;
  std::optional<std::uint64_t> seed;
  bool shuffle = false;
  /// Keyed by corpus name: hi_c, hi_cr, hi_crn, bn, bn_r.
  std::map<std::string, CorpusPaths> corpora;
};

/// Reads an INI file with a [recipe] section (name, optional seed and
/// shuffle) and one section per corpus with source, target and sample
/// ("all" or a line count). Relative paths resolve against the file's directory.
RecipeConfig load_recipe_config(const std::string& path);

/// zcmt: hi_c, hi_cr and bn, bn_r both ways plus hi_crn->en (9 directions).
/// rcmt_roman: hi_cr both ways plus hi_crn->en (3).
/// rcmt_roman_devan: rcmt_roman plus hi_c both ways (5).
/// Throws naming the first corpus the recipe needs but the config lacks.
std::vector<Direction> recipe_directions(const RecipeConfig& config);

}  // namespace cmix
