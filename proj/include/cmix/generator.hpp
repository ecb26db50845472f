#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cmix/aligner.hpp"
#include "cmix/corpus.hpp"
#include "cmix/inclusion.hpp"
#include "cmix/rng.hpp"
#include "cmix/variant.hpp"

namespace cmix {

/// Windows are inclusive. CMI is in percent, SPF a fraction.
struct FilterSpec {
  double cmi_lo = 20.0;
  double cmi_hi = 40.0;
  double spf_lo = 0.35;
  double spf_hi = 0.55;
  std::optional<double> ppl_max;
  std::size_t cap = 5;

  /// Windows that accept every variant.
  static FilterSpec permissive(std::size_t cap);
  /// Throws cmix::Error naming the first violated constraint.
  void validate() const;
};

/// Fluency score (perplexity; lower is better) for a candidate variant.
class FluencyScorer {
 public:
  virtual ~FluencyScorer() = default;
  virtual double score(const CMVariant& variant) const = 0;
};

/// Largest candidate count the subset sampler accepts.
inline constexpr std::size_t kMaxCandidates = 120;

/// Ascending indices of tokens whose POS tag is in the inclusion list.
std::vector<std::size_t> select_candidates(const Sentence& sentence, const InclusionList& inclusion);

/// Subset sizes used for r candidates:
/// r <= 4: 1..r; 5 <= r <= 7: r-3..r; r >= 8: ceil(0.6r)..floor(0.7r).
std::vector<std::size_t> combination_sizes(std::size_t r);

/// Sum of C(r, k) over combination_sizes(r). Throws std::overflow_error past 64 bits.
std::uint64_t count_variants(std::size_t r);
unsigned __int128 count_variants_wide(std::size_t r);

unsigned __int128 binomial(std::size_t n, std::size_t k);

/// The rank-th k-subset of {0..r-1} in lexicographic order.
std::vector<std::size_t> unrank_combination(std::size_t r, std::size_t k, unsigned __int128 rank);

/// Uniform draws over the allowed-size subset family of r items: a global
/// rank is drawn, which picks k with weight C(r, k), then the subset is unranked.
class SubsetSampler {
 public:
  explicit SubsetSampler(std::size_t r);
  /// Positions in 0..r-1, ascending.
  std::vector<std::size_t> draw(Rng& rng) const;
  unsigned __int128 family_size() const { return total_; }

 private:
  std::size_t r_;
  std::vector<std::size_t> sizes_;
  unsigned __int128 total_ = 0;
};

/// All allowed subsets (sizes ascending, lexicographic within size) when the
/// family has at most `cap` members, else `cap` distinct uniform samples in
/// the same canonical order. Elements are taken from `candidates`.
std::vector<std::vector<std::size_t>> sample_subsets(const std::vector<std::size_t>& candidates,
                                                     std::size_t cap, std::uint64_t seed);

/// Replaces the tokens at `subset` with their substitution targets, tagged `embedded`.
CMVariant substitute(const ParallelPair& pair, const SubstitutionTable& table,
                     const std::vector<std::size_t>& subset, const LangTag& embedded);

/// Keeps variants inside the CMI/SPF windows (and under ppl_max when set),
/// then the `cap` best by perplexity, smaller switched set, lexicographic
/// switched set. Survivors keep their input order.
std::vector<CMVariant> filter_variants(std::vector<CMVariant> variants, const FilterSpec& spec,
                                       const FluencyScorer* scorer = nullptr);

struct GeneratorSettings {
  FilterSpec filter;
  /// Upper bound on subsets sampled per pair before filtering.
  std::size_t sample_cap = 64;
  std::uint64_t seed = 0;
  LangTag embedded = LangTag::embedded("en");
  unsigned threads = 1;
};

struct GenerationReport {
  std::size_t pairs = 0;
  std::size_t pairs_without_candidates = 0;
  std::size_t pairs_without_survivors = 0;
  std::size_t pairs_oversized = 0;
  std::size_t variants_sampled = 0;
  std::size_t variants_emitted = 0;
};

using VariantSink = std::function<void(const CMVariant&, const Sentence&)>;

/// select_candidates -> sample_subsets -> substitute -> filter_variants for
/// each pair, emitting survivors in pair order. `tables` are matched by id;
/// pairs without a table have no candidates.
GenerationReport generate_cm_corpus(const std::vector<ParallelPair>& pairs,
                                    const std::vector<SubstitutionTable>& tables,
                                    const InclusionList& inclusion,
                                    const GeneratorSettings& settings,
                                    const FluencyScorer* scorer, const VariantSink& sink);

}  // namespace cmix
