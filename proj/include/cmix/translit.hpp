#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cmix {

/// Ordered Devanagari -> Latin rewrite rules applied longest-match-first.
class TranslitScheme {
 public:
  struct Rule {
    std::u32string pattern;
    std::string replacement;
    /// Bare consonant whose replacement ends in the inherent "a".
    bool inherent_vowel = false;
  };

  /// The table shipped in data/devanagari.tsv.
  static TranslitScheme default_devanagari();
  /// "pattern<TAB>replacement" rows; '#' lines and blank lines are skipped.
  static TranslitScheme load(const std::string& path);
  static TranslitScheme parse(std::istream& in, const std::string& source_name = "<scheme>");

  /// Validates: non-empty unique patterns, replacements of ASCII letters only.
  explicit TranslitScheme(std::vector<Rule> rules, bool schwa_deletion = true);

  bool schwa_deletion() const { return schwa_deletion_; }
  void set_schwa_deletion(bool on) { schwa_deletion_ = on; }
  std::size_t size() const { return rules_.size(); }
  const std::vector<Rule>& rules() const { return rules_; }

  /// Rule indices starting with `first`, longest pattern first, ties in file order.
  const std::vector<std::size_t>* candidates(char32_t first) const;

 private:
  std::vector<Rule> rules_;
  std::unordered_map<char32_t, std::vector<std::size_t>> by_first_;
  bool schwa_deletion_ = true;
};

/// Exact-token romanizations consulted before the rule table.
struct OverrideMap {
  std::unordered_map<std::string, std::string> entries;
  /// Keys that appeared more than once (the last row wins).
  std::size_t duplicates = 0;

  const std::string* find(const std::string& token) const;
};

/// Reads "devanagari<TAB>roman" rows; keys are NFC-normalized. Blank lines and
/// lines starting with '#' are skipped.
OverrideMap load_override_map(const std::string& path);

struct TranslitStats {
  std::size_t tokens = 0;
  std::size_t overridden = 0;
  /// Devanagari code points with no rule; they pass through unchanged.
  std::size_t unknown_codepoints = 0;
  /// Outputs containing anything other than ASCII letters.
  std::size_t non_ascii_outputs = 0;
};

bool is_devanagari(char32_t c);

/// Greedy longest-match transliteration. Non-Devanagari code points pass
/// through; with schwa deletion on, the inherent "a" of a word-final bare
/// consonant is dropped unless that consonant is the whole word.
std::string transliterate(std::string_view token, const TranslitScheme& scheme,
                          const OverrideMap* overrides = nullptr, TranslitStats* stats = nullptr);

}  // namespace cmix
