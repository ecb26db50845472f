#pragma once

#include <set>
#include <string>

namespace cmix {

/// POS tags whose words may be switched into the embedded language.
class InclusionList {
 public:
  /// Nouns, adjectives and quantifiers in both the Penn and the Indian-language tagsets.
  static InclusionList defaults();
  /// One tag per line; '#' starts a comment; blank lines ignored.
  static InclusionList load(const std::string& path);

  explicit InclusionList(std::set<std::string> tags);

  bool contains(const std::string& tag) const { return tags_.count(tag) != 0; }
  const std::set<std::string>& tags() const { return tags_; }

 private:
  std::set<std::string> tags_;
};

}  // namespace cmix
