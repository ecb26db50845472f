#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cmix/corpus.hpp"
#include "cmix/inclusion.hpp"

namespace cmix {

class Vocabulary {
 public:
  std::uint32_t intern(const std::string& word);
  std::optional<std::uint32_t> find(std::string_view word) const;
  const std::string& word(std::uint32_t id) const { return words_[id]; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> words_;
};

/// Lexical translation probabilities t(target | source).
///
/// Rows are indexed by source word id; row 0 is the NULL source word. Each row
/// stores its target ids in ascending order and sums to 1.
class TranslationTable {
 public:
  static constexpr std::uint32_t kNull = 0;
  static constexpr std::string_view kNullWord = "<null>";

  TranslationTable() = default;
  TranslationTable(Vocabulary source, Vocabulary target, std::vector<std::size_t> row_offsets,
                   std::vector<std::uint32_t> columns, std::vector<double> probs);

  /// t(target | source); 0 for unknown words or pruned entries.
  double prob(std::string_view target, std::string_view source) const;
  double null_prob(std::string_view target) const;
  double prob_ids(std::uint32_t target, std::uint32_t source) const;

  const Vocabulary& source_vocab() const { return source_; }
  const Vocabulary& target_vocab() const { return target_; }
  std::size_t rows() const { return row_offsets_.empty() ? 0 : row_offsets_.size() - 1; }
  std::size_t entries() const { return probs_.size(); }
  double row_sum(std::uint32_t source) const;

  /// Source id of a word, or nullopt when out of vocabulary. Id 0 is NULL.
  std::optional<std::uint32_t> source_id(std::string_view word) const;
  std::optional<std::uint32_t> target_id(std::string_view word) const;

  /// TSV "source<TAB>target<TAB>prob", by source word then descending probability.
  void dump(std::ostream& out) const;

 private:
  Vocabulary source_;
  Vocabulary target_;
  std::vector<std::size_t> row_offsets_;
  std::vector<std::uint32_t> columns_;
  std::vector<double> probs_;
};

struct TrainingTrace {
  /// Corpus log-likelihood under the parameters entering each iteration,
  /// followed by the likelihood under the final parameters.
  std::vector<double> log_likelihood;
};

/// Probabilities below this are pruned after each M-step.
inline constexpr double kPruneFloor = 1e-12;

/// IBM Model 1 EM with a NULL source word and uniform initialization over
/// co-occurring target words.
TranslationTable train_ibm1(const std::vector<ParallelPair>& pairs, int iterations,
                            unsigned threads = 1, TrainingTrace* trace = nullptr);

/// Model 1 EM with the diagonal alignment prior
/// p(i | j, m, n) proportional to exp(-tension * |i/m - j/n|) for real positions.
TranslationTable train_diagonal(const std::vector<ParallelPair>& pairs, int iterations,
                                double tension, unsigned threads = 1,
                                TrainingTrace* trace = nullptr);

/// Alignment prior of source position i (0 = NULL, 1..m real) for target
/// position j (1..n). Without a tension the prior is uniform.
double alignment_prior(std::size_t i, std::size_t j, std::size_t m, std::size_t n,
                       std::optional<double> tension);

/// Corpus log-likelihood sum_j log sum_i p(i|j) t(e_j|f_i).
double log_likelihood(const TranslationTable& table, const std::vector<ParallelPair>& pairs,
                      std::optional<double> tension = std::nullopt);

struct Link {
  std::size_t src = 0;
  std::size_t tgt = 0;
  friend auto operator<=>(const Link&, const Link&) = default;
};

/// Set of (source index, target index) links for one sentence pair.
class AlignmentLinks {
 public:
  AlignmentLinks() = default;
  AlignmentLinks(std::initializer_list<Link> links);

  void insert(Link link);
  bool contains(Link link) const;
  std::size_t size() const { return links_.size(); }
  bool empty() const { return links_.empty(); }
  auto begin() const { return links_.begin(); }
  auto end() const { return links_.end(); }

  AlignmentLinks transposed() const;
  bool subset_of(const AlignmentLinks& other) const;

  friend bool operator==(const AlignmentLinks&, const AlignmentLinks&) = default;

 private:
  std::vector<Link> links_;  // sorted, unique
};

/// Each target position links to its best source position; NULL wins ties
/// and zero-probability positions produce no link.
AlignmentLinks viterbi_align(const TranslationTable& table, const ParallelPair& pair,
                             std::optional<double> tension = std::nullopt);

/// Intersection of forward and (already transposed) backward links.
AlignmentLinks symmetrize(const AlignmentLinks& forward, const AlignmentLinks& backward);

/// Swaps source and target sides.
std::vector<ParallelPair> reversed(const std::vector<ParallelPair>& pairs);

struct AlignerSettings {
  int iterations = 5;
  /// Diagonal tension; nullopt trains plain Model 1.
  std::optional<double> tension = 4.0;
  unsigned threads = 1;
};

/// Trains both directions and returns intersected links, one set per pair.
/// Pairs with an empty side get an empty link set and are left out of training.
std::vector<AlignmentLinks> align_symmetric(const std::vector<ParallelPair>& pairs,
                                            const AlignerSettings& settings,
                                            TranslationTable* forward_table = nullptr);

// --- Pharaoh format ----------------------------------------------------------

std::string to_pharaoh(const AlignmentLinks& links);
AlignmentLinks parse_pharaoh(std::string_view line, std::size_t line_no = 0);
std::vector<AlignmentLinks> load_pharaoh(const std::string& path);

// --- Substitution tables -----------------------------------------------------

struct SubstitutionEntry {
  std::string source;
  std::string target;
  std::string pos;
  friend bool operator==(const SubstitutionEntry&, const SubstitutionEntry&) = default;
};

/// One-to-one source->target word map for one sentence, keyed by source index.
struct SubstitutionTable {
  std::size_t id = 0;
  std::map<std::size_t, SubstitutionEntry> entries;

  bool contains(std::size_t index) const { return entries.count(index) != 0; }
  friend bool operator==(const SubstitutionTable&, const SubstitutionTable&) = default;
};

/// Keeps source index i iff its only link (i, j) is also the only link on j
/// and pos(source_i) is in the inclusion list. Throws if any source token lacks a POS tag.
SubstitutionTable extract_substitution_table(const ParallelPair& pair, const AlignmentLinks& links,
                                             const InclusionList& inclusion);

std::string to_jsonl(const SubstitutionTable& table);
SubstitutionTable parse_substitution_jsonl(std::string_view line, std::size_t line_no = 0);
std::vector<SubstitutionTable> load_substitution_tables(const std::string& path);

}  // namespace cmix
