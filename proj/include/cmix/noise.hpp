#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cmix/rng.hpp"
#include "cmix/variant.hpp"

namespace cmix {

enum class NoiseType : unsigned char { Switch, Omission, Typo, Shuffle };
inline constexpr std::array<NoiseType, 4> kNoiseTypes = {NoiseType::Switch, NoiseType::Omission,
                                                         NoiseType::Typo, NoiseType::Shuffle};
const char* noise_type_name(NoiseType t);

enum class NoiseEligibility : unsigned char {
  TransliteratedMatrix,  ///< romanized matrix-language tokens only
  AllLatin,              ///< any non-neutral token made of ASCII letters
};

struct NoiseSpec {
  double rate_switch = 0.30;
  double rate_omission = 0.12;
  double rate_typo = 0.12;
  double rate_shuffle = 0.06;
  std::size_t min_len_switch = 4;
  std::size_t min_len_omission = 4;
  std::size_t min_len_typo = 3;
  std::size_t min_len_shuffle = 4;
  NoiseEligibility eligibility = NoiseEligibility::TransliteratedMatrix;
  std::uint64_t seed = 0;

  double rate(NoiseType t) const;
  double total_rate() const { return rate_switch + rate_omission + rate_typo + rate_shuffle; }
  /// Throws cmix::Error when a rate is outside [0,1], the sum exceeds 1, or a
  /// minimum length is below what the perturbation needs.
  void validate() const;

  /// Sets rates from "switch=0.30,omission=0.12,typo=0.12,shuffle=0.06".
  /// Omitted types become 0. The result is validated.
  static NoiseSpec parse_rates(std::string_view text, std::uint64_t seed = 0);
};

/// Lowercase QWERTY neighbor sets.
class KeyboardAdjacency {
 public:
  /// The table in data/qwerty_adjacency.tsv.
  static const KeyboardAdjacency& qwerty();
  static KeyboardAdjacency parse(std::string_view text, const std::string& source_name);

  /// Neighbors of a lowercase key; empty when the key is not in the table.
  std::string_view neighbors(char key) const;

 private:
  std::unordered_map<char, std::string> keys_;
};

// Each perturbation returns nullopt when its preconditions fail. Lengths
// and positions count code points.

/// Swaps the characters at position and position+1; 1 <= position <= |word|-3.
std::optional<std::string> perturb_switch(std::string_view word, std::size_t position);
/// Deletes each interior vowel with probability 1/2; if none went, deletes one interior character.
std::optional<std::string> perturb_omission(std::string_view word, Rng& rng);
/// Replaces the letter at `position` with a random keyboard neighbor, keeping its case.
std::optional<std::string> perturb_typo(std::string_view word, std::size_t position, Rng& rng,
                                        const KeyboardAdjacency& keys = KeyboardAdjacency::qwerty());
/// Uniformly permutes the interior, redrawing identity permutations up to 10 times.
std::optional<std::string> perturb_shuffle(std::string_view word, Rng& rng);

struct NoiseReport {
  std::size_t tokens = 0;
  std::size_t eligible = 0;
  std::array<std::size_t, 4> drawn{};
  std::array<std::size_t, 4> applied{};
  std::array<std::size_t, 4> fallback{};

  std::size_t perturbed() const;
  void merge(const NoiseReport& other);
  /// TSV "type<TAB>rate<TAB>drawn<TAB>applied<TAB>fallback<TAB>applied_fraction".
  void write(std::ostream& out, const NoiseSpec& spec) const;
};

bool noise_eligible(const TaggedToken& token, NoiseEligibility eligibility);

/// Draws a perturbation for every eligible token of `variant`, in place.
/// Token k uses an rng seeded from (seed, pair id, variant ordinal, k).
void inject_noise(CMVariant& variant, const NoiseSpec& spec, NoiseReport& report);
NoiseReport inject_noise(std::vector<CMRecord>& corpus, const NoiseSpec& spec);

}  // namespace cmix
