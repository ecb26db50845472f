#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cmix {

/// Language role of a token. `Unset` marks a token that was never tagged.
enum class Lang : unsigned char { Unset, Matrix, Embedded, Neutral };

/// Language tag: a role plus the ISO 639-1 code for matrix/embedded tokens.
struct LangTag {
  Lang kind = Lang::Unset;
  std::string code;

  static LangTag matrix(std::string iso);
  static LangTag embedded(std::string iso);
  static LangTag neutral() { return {Lang::Neutral, {}}; }

  bool is_set() const { return kind != Lang::Unset; }
  /// Sidecar label: the ISO code, or "O" for neutral tokens.
  std::string label() const;

  friend bool operator==(const LangTag&, const LangTag&) = default;
};

struct TaggedToken {
  std::string surface;
  LangTag lang;
  std::optional<std::string> pos;
  bool transliterated = false;

  friend bool operator==(const TaggedToken&, const TaggedToken&) = default;
};

struct Sentence {
  std::size_t id = 0;
  std::vector<TaggedToken> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  /// Surfaces joined by single spaces.
  std::string text() const;
  std::vector<std::string> surfaces() const;
};

struct ParallelPair {
  std::size_t id = 0;
  Sentence source;
  Sentence target;
};

// --- Unicode helpers -------------------------------------------------------

bool is_valid_utf8(std::string_view s);
/// NFC-normalizes valid UTF-8; throws cmix::Error on invalid input.
std::string nfc(std::string_view s);
std::u32string to_u32(std::string_view s);
std::string to_utf8(std::u32string_view s);
std::size_t codepoint_count(std::string_view s);
/// ASCII punctuation plus the Devanagari danda (U+0964).
bool is_punctuation(char32_t c);
/// True when every code point of a non-empty token is punctuation.
bool is_punctuation_token(std::string_view token);

// --- Tokenization and readers ----------------------------------------------

/// NFC-normalizes `raw`, splits on Unicode whitespace and splits every
/// punctuation code point into its own NEUTRAL token. Other tokens get `lang`.
/// Throws ParseError (with `line_no`) on invalid UTF-8.
Sentence normalize_and_tokenize(std::string_view raw, const LangTag& lang,
                                std::size_t line_no = 0);

/// Reads all lines of a text file, LF-terminated, stripping a trailing CR.
std::vector<std::string> read_lines(const std::string& path);

std::vector<Sentence> load_plain(const std::string& path, const LangTag& lang);

/// Zips two plain files line by line; ids are 0..n-1.
std::vector<ParallelPair> load_parallel(const std::string& src_path, const std::string& tgt_path,
                                        const LangTag& src_lang, const LangTag& tgt_lang);

/// Reads "token<TAB>POS" rows; a blank line terminates each sentence.
std::vector<Sentence> load_tagged(const std::string& path, const LangTag& lang);
std::vector<Sentence> parse_tagged(std::istream& in, const LangTag& lang,
                                   const std::string& source_name = "<stream>");

void write_plain(std::ostream& out, const std::vector<Sentence>& sentences);
void write_tagged(std::ostream& out, const std::vector<Sentence>& sentences);

/// Space-separated sidecar labels for one sentence.
std::string lang_tag_line(const Sentence& s);
/// Applies a sidecar line to `s`; labels must match `matrix`, `embedded` or "O".
void apply_lang_tags(Sentence& s, std::string_view line, const LangTag& matrix,
                     const LangTag& embedded, std::size_t line_no = 0);
void write_lang_tags(std::ostream& out, const std::vector<Sentence>& sentences);

/// Pairs source sentences (e.g. from a tagged file) with a plain target file.
std::vector<ParallelPair> zip_pairs(std::vector<Sentence> sources, std::vector<Sentence> targets);

}  // namespace cmix
