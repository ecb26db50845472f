#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cmix/corpus.hpp"

namespace cmix {

/// One code-mixed rendering of a source sentence.
struct CMVariant {
  std::size_t pair_id = 0;
  /// Position of this subset in the pair's sampled subset list.
  std::size_t ordinal = 0;
  /// Switched source indices, ascending.
  std::vector<std::size_t> switched;
  std::vector<TaggedToken> cm_tokens;
  double cmi = 0.0;
  double spf = 0.0;
  std::optional<double> ppl;

  std::string text() const;
};

struct CMRecord {
  CMVariant variant;
  Sentence target;
};

/// Header line of the code-mixed corpus TSV.
inline constexpr const char* kCmTsvHeader = "id\tvariant\tcm_source\ttarget\tlang_tags\tcmi\tspf\tppl";

void write_cm_tsv_header(std::ostream& out);
void write_cm_tsv_row(std::ostream& out, const CMRecord& record);
void write_cm_tsv(std::ostream& out, const std::vector<CMRecord>& records);

/// Reads a code-mixed corpus TSV. Switched indices are recovered from the
/// embedded-language positions; matrix tokens made only of ASCII letters are
/// marked as transliterated.
std::vector<CMRecord> read_cm_tsv(const std::string& path, const LangTag& matrix,
                                  const LangTag& embedded);

}  // namespace cmix
