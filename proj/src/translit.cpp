#include "cmix/translit.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "cmix/corpus.hpp"
#include "cmix/data_tables.hpp"
#include "cmix/error.hpp"

namespace cmix {

namespace {

bool is_consonant(char32_t c) { return (c >= 0x0915 && c <= 0x0939) || (c >= 0x0958 && c <= 0x095F); }

bool ascii_letters(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z');
  });
}

bool bare_consonant(const std::u32string& p) {
  if (p.size() == 1) return is_consonant(p[0]);
  return p.size() == 2 && is_consonant(p[0]) && p[1] == 0x093C;
}

}  // namespace

bool is_devanagari(char32_t c) { return c >= 0x0900 && c <= 0x097F; }

TranslitScheme::TranslitScheme(std::vector<Rule> rules, bool schwa_deletion)
    : rules_(std::move(rules)), schwa_deletion_(schwa_deletion) {
  std::set<std::u32string> seen;
  for (std::size_t k = 0; k < rules_.size(); ++k) {
    auto& r = rules_[k];
    if (r.pattern.empty()) throw Error("translit rule " + std::to_string(k + 1) + ": empty pattern");
    if (!seen.insert(r.pattern).second) {
      throw Error("translit rule " + std::to_string(k + 1) + ": duplicate pattern '" + to_utf8(r.pattern) + "'");
    }
    if (!ascii_letters(r.replacement)) {
      throw Error("translit rule " + std::to_string(k + 1) + ": replacement '" + r.replacement +
                  "' is not ASCII letters");
    }
    r.inherent_vowel = bare_consonant(r.pattern) && !r.replacement.empty() && r.replacement.back() == 'a';
    by_first_[r.pattern[0]].push_back(k);
  }
  for (auto& [first, idx] : by_first_) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return rules_[a].pattern.size() > rules_[b].pattern.size();
    });
  }
}

const std::vector<std::size_t>* TranslitScheme::candidates(char32_t first) const {
  const auto it = by_first_.find(first);
  return it == by_first_.end() ? nullptr : &it->second;
}

TranslitScheme TranslitScheme::parse(std::istream& in, const std::string& source_name) {
  std::vector<Rule> rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(source_name, line_no, "expected pattern<TAB>replacement");
    }
    const std::string pattern = line.substr(0, tab);
    if (!is_valid_utf8(pattern)) throw ParseError(source_name, line_no, "invalid UTF-8");
    Rule r;
    r.pattern = to_u32(nfc(pattern));
    r.replacement = line.substr(tab + 1);
    if (r.pattern.empty()) throw ParseError(source_name, line_no, "empty pattern");
    rules.push_back(std::move(r));
  }
  try {
    return TranslitScheme(std::move(rules));
  } catch (const Error& e) {
    throw Error(source_name + ": " + e.what());
  }
}

TranslitScheme TranslitScheme::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  return parse(in, path);
}

TranslitScheme TranslitScheme::default_devanagari() {
  std::istringstream in{std::string(data::devanagari_table())};
  return parse(in, "data/devanagari.tsv");
}

const std::string* OverrideMap::find(const std::string& token) const {
  const auto it = entries.find(token);
  return it == entries.end() ? nullptr : &it->second;
}

OverrideMap load_override_map(const std::string& path) {
  OverrideMap map;
  const auto lines = read_lines(path);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto& line = lines[k];
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(path, k + 1, "expected devanagari<TAB>roman");
    }
    const std::string key = line.substr(0, tab);
    if (!is_valid_utf8(key) || !is_valid_utf8(line.substr(tab + 1))) {
      throw ParseError(path, k + 1, "invalid UTF-8");
    }
    auto [it, inserted] = map.entries.insert_or_assign(nfc(key), line.substr(tab + 1));
    if (!inserted) ++map.duplicates;
  }
  return map;
}

std::string transliterate(std::string_view token, const TranslitScheme& scheme,
                          const OverrideMap* overrides, TranslitStats* stats) {
  if (stats) ++stats->tokens;
  const std::string normalized = nfc(token);
  std::string out;
  if (overrides) {
    if (const auto* hit = overrides->find(normalized)) {
      if (stats) {
        ++stats->overridden;
        if (!ascii_letters(*hit) || hit->empty()) ++stats->non_ascii_outputs;
      }
      return *hit;
    }
  }

  const std::u32string text = to_u32(normalized);
  std::size_t pos = 0;
  std::size_t matches = 0;
  bool last_was_inherent = false;
  while (pos < text.size()) {
    const char32_t c = text[pos];
    const TranslitScheme::Rule* hit = nullptr;
    if (const auto* idx = scheme.candidates(c)) {
      for (std::size_t k : *idx) {
        const auto& r = scheme.rules()[k];
        if (text.compare(pos, r.pattern.size(), r.pattern) == 0) {
          hit = &r;
          break;
        }
      }
    }
    if (hit) {
      out += hit->replacement;
      pos += hit->pattern.size();
      last_was_inherent = hit->inherent_vowel;
      ++matches;
    } else {
      if (stats && is_devanagari(c)) ++stats->unknown_codepoints;
      out += to_utf8(std::u32string_view(&text[pos], 1));
      ++pos;
      last_was_inherent = false;
    }
  }
  if (scheme.schwa_deletion() && last_was_inherent && matches > 1) out.pop_back();
  if (stats && (out.empty() || !ascii_letters(out))) {
    bool has_devanagari = false;
    for (char32_t ch : text) has_devanagari = has_devanagari || is_devanagari(ch);
    if (has_devanagari) ++stats->non_ascii_outputs;
  }
  return out;
}

}  // namespace cmix
