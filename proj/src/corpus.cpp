#include "cmix/corpus.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cmix/error.hpp"

namespace cmix {

LangTag LangTag::matrix(std::string iso) { return {Lang::Matrix, std::move(iso)}; }
LangTag LangTag::embedded(std::string iso) { return {Lang::Embedded, std::move(iso)}; }

std::string LangTag::label() const {
  switch (kind) {
    case Lang::Neutral:
      return "O";
    case Lang::Matrix:
    case Lang::Embedded:
      return code;
    case Lang::Unset:
      break;
  }
  return "?";
}

std::string Sentence::text() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i].surface;
  }
  return out;
}

std::vector<std::string> Sentence::surfaces() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

bool is_valid_utf8(std::string_view s) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const int32_t n = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < n) {
    UChar32 c;
    U8_NEXT(p, i, n, c);
    if (c < 0) return false;
  }
  return true;
}

std::u32string to_u32(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const int32_t n = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < n) {
    UChar32 c;
    U8_NEXT(p, i, n, c);
    if (c < 0) throw Error("invalid UTF-8 sequence");
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

std::string to_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t c : s) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool err = false;
    U8_APPEND(buf, len, U8_MAX_LENGTH, static_cast<UChar32>(c), err);
    if (err) throw Error("code point not encodable as UTF-8");
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(len));
  }
  return out;
}

std::size_t codepoint_count(std::string_view s) {
  std::size_t count = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++count;
  return count;
}

std::string nfc(std::string_view s) {
  if (!is_valid_utf8(s)) throw Error("invalid UTF-8 sequence");
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(std::string("ICU NFC unavailable: ") + u_errorName(status));
  const icu::UnicodeString in = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  if (norm->isNormalized(in, status) && U_SUCCESS(status)) return std::string(s);
  status = U_ZERO_ERROR;
  const icu::UnicodeString normalized = norm->normalize(in, status);
  if (U_FAILURE(status)) throw Error(std::string("NFC normalization failed: ") + u_errorName(status));
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

bool is_punctuation(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
           (c >= 0x7B && c <= 0x7E);
  }
  return c == 0x0964;
}

bool is_punctuation_token(std::string_view token) {
  if (token.empty() || !is_valid_utf8(token)) return false;
  for (char32_t c : to_u32(token))
    if (!is_punctuation(c)) return false;
  return true;
}

Sentence normalize_and_tokenize(std::string_view raw, const LangTag& lang, std::size_t line_no) {
  if (!is_valid_utf8(raw)) throw ParseError("<input>", line_no, "invalid UTF-8");
  const std::u32string text = to_u32(nfc(raw));

  Sentence s;
  s.id = line_no == 0 ? 0 : line_no - 1;
  std::u32string word;
  auto flush = [&] {
    if (word.empty()) return;
    s.tokens.push_back({to_utf8(word), lang, std::nullopt, false});
    word.clear();
  };
  for (char32_t c : text) {
    if (u_isUWhiteSpace(static_cast<UChar32>(c))) {
      flush();
    } else if (is_punctuation(c)) {
      flush();
      s.tokens.push_back({to_utf8(std::u32string(1, c)), LangTag::neutral(), std::nullopt, false});
    } else {
      word.push_back(c);
    }
  }
  flush();
  return s;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw IoError(path, "read failure");
  return lines;
}

std::vector<Sentence> load_plain(const std::string& path, const LangTag& lang) {
  const auto lines = read_lines(path);
  std::vector<Sentence> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      out.push_back(normalize_and_tokenize(lines[i], lang, i + 1));
    } catch (const ParseError&) {
      throw ParseError(path, i + 1, "invalid UTF-8");
    }
    out.back().id = i;
  }
  return out;
}

std::vector<ParallelPair> zip_pairs(std::vector<Sentence> sources, std::vector<Sentence> targets) {
  if (sources.size() != targets.size()) {
    throw Error("line-count mismatch: source has " + std::to_string(sources.size()) +
                " sentences, target has " + std::to_string(targets.size()));
  }
  std::vector<ParallelPair> pairs(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    pairs[i].id = i;
    pairs[i].source = std::move(sources[i]);
    pairs[i].target = std::move(targets[i]);
    pairs[i].source.id = i;
    pairs[i].target.id = i;
  }
  return pairs;
}

std::vector<ParallelPair> load_parallel(const std::string& src_path, const std::string& tgt_path,
                                        const LangTag& src_lang, const LangTag& tgt_lang) {
  auto src = load_plain(src_path, src_lang);
  auto tgt = load_plain(tgt_path, tgt_lang);
  if (src.size() != tgt.size()) {
    throw Error("line-count mismatch: " + src_path + " has " + std::to_string(src.size()) +
                " lines, " + tgt_path + " has " + std::to_string(tgt.size()));
  }
  return zip_pairs(std::move(src), std::move(tgt));
}

std::vector<Sentence> parse_tagged(std::istream& in, const LangTag& lang,
                                   const std::string& source_name) {
  std::vector<Sentence> out;
  Sentence current;
  bool pending = false;
  std::string line;
  std::size_t line_no = 0;
  auto emit = [&] {
    current.id = out.size();
    out.push_back(std::move(current));
    current = Sentence{};
    pending = false;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      emit();
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(source_name, line_no, "expected 2 tab-separated columns");
    }
    std::string token = line.substr(0, tab);
    std::string pos = line.substr(tab + 1);
    if (!is_valid_utf8(token) || !is_valid_utf8(pos)) {
      throw ParseError(source_name, line_no, "invalid UTF-8");
    }
    token = nfc(token);
    if (token.empty() || pos.empty()) throw ParseError(source_name, line_no, "empty column");
    for (char32_t c : to_u32(token)) {
      if (u_isUWhiteSpace(static_cast<UChar32>(c))) {
        throw ParseError(source_name, line_no, "token contains whitespace");
      }
    }
    const LangTag tag = is_punctuation_token(token) ? LangTag::neutral() : lang;
    current.tokens.push_back({std::move(token), tag, std::move(pos), false});
    pending = true;
  }
  if (pending) emit();
  return out;
}

std::vector<Sentence> load_tagged(const std::string& path, const LangTag& lang) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  return parse_tagged(in, lang, path);
}

void write_plain(std::ostream& out, const std::vector<Sentence>& sentences) {
  for (const auto& s : sentences) out << s.text() << '\n';
}

void write_tagged(std::ostream& out, const std::vector<Sentence>& sentences) {
  for (const auto& s : sentences) {
    for (const auto& t : s.tokens) {
      if (!t.pos) throw Error("sentence " + std::to_string(s.id) + ": token without POS tag");
      out << t.surface << '\t' << *t.pos << '\n';
    }
    out << '\n';
  }
}

std::string lang_tag_line(const Sentence& s) {
  std::string out;
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    if (i) out += ' ';
    out += s.tokens[i].lang.label();
  }
  return out;
}

void apply_lang_tags(Sentence& s, std::string_view line, const LangTag& matrix,
                     const LangTag& embedded, std::size_t line_no) {
  std::istringstream in{std::string(line)};
  std::vector<std::string> labels;
  for (std::string label; in >> label;) labels.push_back(label);
  if (labels.size() != s.tokens.size()) {
    throw ParseError("<lang-tags>", line_no,
                     "expected " + std::to_string(s.tokens.size()) + " tags, got " +
                         std::to_string(labels.size()));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == "O") {
      s.tokens[i].lang = LangTag::neutral();
    } else if (labels[i] == matrix.code) {
      s.tokens[i].lang = matrix;
    } else if (labels[i] == embedded.code) {
      s.tokens[i].lang = embedded;
    } else {
      throw ParseError("<lang-tags>", line_no, "unknown language tag '" + labels[i] + "'");
    }
  }
}

void write_lang_tags(std::ostream& out, const std::vector<Sentence>& sentences) {
  for (const auto& s : sentences) out << lang_tag_line(s) << '\n';
}

}  // namespace cmix
