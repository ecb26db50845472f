#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cmix/corpus.hpp"
#include "cmix/io.hpp"

namespace cmix::testing {

inline ParallelPair make_pair(std::size_t id, const std::string& src, const std::string& tgt) {
  ParallelPair p;
  p.id = id;
  p.source = normalize_and_tokenize(src, LangTag::matrix("de"));
  p.target = normalize_and_tokenize(tgt, LangTag::embedded("en"));
  p.source.id = p.target.id = id;
  return p;
}

/// "word/TAG word/TAG ..." as a matrix-language sentence.
inline Sentence tagged(const std::string& spec, const std::string& lang = "hi") {
  Sentence s;
  std::istringstream in(spec);
  std::string item;
  while (in >> item) {
    const auto slash = item.rfind('/');
    TaggedToken t;
    t.surface = item.substr(0, slash);
    t.pos = item.substr(slash + 1);
    t.lang = is_punctuation_token(t.surface) ? LangTag::neutral() : LangTag::matrix(lang);
    s.tokens.push_back(std::move(t));
  }
  return s;
}

/// Fresh directory under the build tree, emptied on creation.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(CMIX_TEST_SCRATCH) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(CMIX_FIXTURE_DIR) / name;
}

}  // namespace cmix::testing
