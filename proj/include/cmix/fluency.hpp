#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cmix/generator.hpp"

namespace cmix {

/// Interpolated maximum-likelihood n-gram model.
///
/// Training words seen once are mapped to "<unk>". Sentences are padded
/// with order-1 "<s>" symbols and end with "</s>", which is predicted.
/// When a history was never seen, its weight is spread over the lower
/// orders in proportion to their own weights.
class NgramLM {
 public:
  static constexpr std::string_view kUnk = "<unk>";
  static constexpr std::string_view kBos = "<s>";
  static constexpr std::string_view kEos = "</s>";

  /// Weights for `order`, unigram first: (0.5, 0.3, 0.2) for trigrams,
  /// uniform for any other order.
  static std::vector<double> default_lambdas(int order);

  static NgramLM train(const std::vector<std::vector<std::string>>& corpus, int order = 3);
  static NgramLM train(const std::vector<std::vector<std::string>>& corpus, int order,
                       std::vector<double> lambdas);

  int order() const { return order_; }
  const std::vector<double>& lambdas() const { return lambdas_; }
  /// Predictable symbols: in-vocabulary words, "<unk>" and "</s>".
  std::size_t vocab_size() const { return words_.size() - 1; }
  bool in_vocab(std::string_view word) const;

  /// P(word | history); history is the preceding words, "<s>" allowed.
  double prob(std::string_view word, const std::vector<std::string>& history) const;
  double perplexity(const std::vector<std::string>& sentence) const;

  void save(const std::string& path) const;
  static NgramLM load(const std::string& path);

  friend bool operator==(const NgramLM&, const NgramLM&) = default;

 private:
  using Key = std::string;  // packed little-endian uint32 ids

  std::uint32_t id_of(std::string_view word) const;
  double prob_ids(const std::uint32_t* context, std::size_t context_len, std::uint32_t word) const;
  void rebuild_index();

  int order_ = 0;
  std::vector<double> lambdas_;
  std::vector<std::string> words_;  // 0 = <unk>, 1 = </s>, 2 = <s>
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::map<Key, std::uint64_t>> ngrams_;    // per order k-1: count(history, word)
  std::vector<std::map<Key, std::uint64_t>> contexts_;  // per order k-1: count(history, *)
};

inline std::vector<std::string> variant_words(const CMVariant& v) {
  std::vector<std::string> words;
  words.reserve(v.cm_tokens.size());
  for (const auto& t : v.cm_tokens) words.push_back(t.surface);
  return words;
}

/// Perplexity of the code-mixed tokens under an n-gram model.
class LmScorer : public FluencyScorer {
 public:
  explicit LmScorer(const NgramLM& lm) : lm_(lm) {}
  double score(const CMVariant& variant) const override;

 private:
  const NgramLM& lm_;
};

/// Perplexities read from a "id<TAB>variant<TAB>ppl" file. Asking for a
/// variant the file does not list is an error.
class ExternalScorer : public FluencyScorer {
 public:
  static ExternalScorer load(const std::string& path);
  explicit ExternalScorer(std::map<std::pair<std::size_t, std::size_t>, double> scores)
      : scores_(std::move(scores)) {}

  double score(const CMVariant& variant) const override;
  std::size_t size() const { return scores_.size(); }

 private:
  std::map<std::pair<std::size_t, std::size_t>, double> scores_;
};

}  // namespace cmix
