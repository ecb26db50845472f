#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "cmix/corpus.hpp"
#include "cmix/variant.hpp"

namespace cmix {

/// Code-Mixing Index in percent: 100 * (1 - w_max / (n - u)), 0 when every token is neutral.
double cmi(const std::vector<TaggedToken>& tokens);
inline double cmi(const Sentence& s) { return cmi(s.tokens); }

/// Switch Point Fraction: language changes between consecutive non-neutral
/// tokens, divided by (non-neutral count - 1). Neutral tokens are transparent.
double spf(const std::vector<TaggedToken>& tokens);
inline double spf(const Sentence& s) { return spf(s.tokens); }

struct BleuResult {
  double score = 0.0;                  ///< 0..100
  std::array<double, 4> precisions{};  ///< clipped n-gram precisions, 0..1
  double brevity_penalty = 0.0;
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;

  /// "BLEU = 31.25 (60.0/40.0/25.0/12.5, BP=1.000)"
  std::string summary() const;
};

/// Corpus-level BLEU with a single reference per hypothesis and no smoothing.
BleuResult bleu(const std::vector<Sentence>& hypotheses, const std::vector<Sentence>& references,
                int max_order = 4);

struct CorpusStats {
  std::size_t sentences = 0;
  std::size_t unique_sentences = 0;
  double mean_cmi = 0.0;
  double mean_spf = 0.0;
  std::size_t matrix_tokens = 0;
  std::size_t embedded_tokens = 0;
  std::size_t target_tokens = 0;
  double token_mean = 0.0;
  double token_median = 0.0;
  std::size_t token_max = 0;
  double char_mean = 0.0;
  double char_median = 0.0;
  std::size_t char_max = 0;
};

/// Single-pass accumulator; medians are taken at finish().
class CorpusStatsBuilder {
 public:
  void add(const CMVariant& variant, const Sentence& target);
  CorpusStats finish() const;

 private:
  std::vector<std::size_t> token_lengths_;
  std::vector<std::size_t> char_lengths_;
  std::vector<std::string> lines_;
  double cmi_sum_ = 0.0;
  double spf_sum_ = 0.0;
  std::size_t matrix_ = 0;
  std::size_t embedded_ = 0;
  std::size_t target_ = 0;
};

CorpusStats corpus_stats(const std::vector<CMRecord>& corpus);

/// TSV header and value row followed by a readable summary block.
void write_stats_report(std::ostream& out, const CorpusStats& stats, const std::string& label);

}  // namespace cmix
