#include "cmix/inclusion.hpp"

#include "cmix/corpus.hpp"
#include "cmix/error.hpp"

namespace cmix {

InclusionList::InclusionList(std::set<std::string> tags) : tags_(std::move(tags)) {
  if (tags_.empty()) throw Error("inclusion list must not be empty");
}

InclusionList InclusionList::defaults() {
  return InclusionList({"NN", "NNS", "NNP", "NNPS", "JJ", "JJR", "JJS", "QF"});
}

InclusionList InclusionList::load(const std::string& path) {
  std::set<std::string> tags;
  for (std::string line : read_lines(path)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t");
    tags.insert(line.substr(first, last - first + 1));
  }
  if (tags.empty()) throw Error(path + ": inclusion list is empty");
  return InclusionList(std::move(tags));
}

}  // namespace cmix
