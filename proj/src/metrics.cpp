#include "cmix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "cmix/error.hpp"

namespace cmix {

namespace {

void require_tagged(const std::vector<TaggedToken>& tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!tokens[i].lang.is_set()) throw Error("token " + std::to_string(i) + " has no language tag");
  }
}

std::string language_key(const LangTag& tag) {
  return (tag.kind == Lang::Matrix ? "m:" : "e:") + tag.code;
}

}  // namespace

double cmi(const std::vector<TaggedToken>& tokens) {
  require_tagged(tokens);
  std::map<std::string, std::size_t> per_language;
  std::size_t neutral = 0;
  for (const auto& t : tokens) {
    if (t.lang.kind == Lang::Neutral) {
      ++neutral;
    } else {
      ++per_language[language_key(t.lang)];
    }
  }
  const std::size_t n = tokens.size();
  if (n == neutral) return 0.0;
  std::size_t w_max = 0;
  for (const auto& [lang, count] : per_language) w_max = std::max(w_max, count);
  const std::size_t content = n - neutral;
  return 100.0 * static_cast<double>(content - w_max) / static_cast<double>(content);
}

double spf(const std::vector<TaggedToken>& tokens) {
  require_tagged(tokens);
  std::size_t length = 0;
  std::size_t switches = 0;
  const LangTag* previous = nullptr;
  for (const auto& t : tokens) {
    if (t.lang.kind == Lang::Neutral) continue;
    if (previous && !(*previous == t.lang)) ++switches;
    previous = &t.lang;
    ++length;
  }
  if (length < 2) return 0.0;
  return static_cast<double>(switches) / static_cast<double>(length - 1);
}

std::string BleuResult::summary() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "BLEU = %.2f (%.1f/%.1f/%.1f/%.1f, BP=%.3f)", score,
                precisions[0] * 100.0, precisions[1] * 100.0, precisions[2] * 100.0,
                precisions[3] * 100.0, brevity_penalty);
  return buf;
}

namespace {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

NgramCounts count_ngrams(const std::vector<TaggedToken>& tokens, std::size_t order) {
  NgramCounts counts;
  if (tokens.size() < order) return counts;
  for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
    std::string key;
    for (std::size_t k = 0; k < order; ++k) {
      if (k) key += '\x1f';
      key += tokens[i + k].surface;
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

BleuResult bleu(const std::vector<Sentence>& hypotheses, const std::vector<Sentence>& references,
                int max_order) {
  if (hypotheses.empty()) throw Error("bleu: empty corpus");
  if (hypotheses.size() != references.size()) {
    throw Error("bleu: " + std::to_string(hypotheses.size()) + " hypotheses but " +
                std::to_string(references.size()) + " references");
  }
  if (max_order < 1 || max_order > 4) throw Error("bleu: max_order must be in 1..4");

  std::array<std::size_t, 4> matches{};
  std::array<std::size_t, 4> totals{};
  BleuResult result;
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const auto& hyp = hypotheses[s].tokens;
    const auto& ref = references[s].tokens;
    result.hyp_length += hyp.size();
    result.ref_length += ref.size();
    for (int n = 1; n <= max_order; ++n) {
      const auto h = count_ngrams(hyp, static_cast<std::size_t>(n));
      const auto r = count_ngrams(ref, static_cast<std::size_t>(n));
      for (const auto& [gram, count] : h) {
        totals[n - 1] += count;
        if (const auto it = r.find(gram); it != r.end()) matches[n - 1] += std::min(count, it->second);
      }
    }
  }

  double log_sum = 0.0;
  bool zero = false;
  for (int n = 0; n < max_order; ++n) {
    result.precisions[n] =
        totals[n] == 0 ? 0.0 : static_cast<double>(matches[n]) / static_cast<double>(totals[n]);
    if (matches[n] == 0) {
      zero = true;
    } else {
      log_sum += std::log(result.precisions[n]);
    }
  }
  const double c = static_cast<double>(result.hyp_length);
  const double r = static_cast<double>(result.ref_length);
  if (result.hyp_length == 0) {
    result.brevity_penalty = 0.0;
  } else {
    result.brevity_penalty = c < r ? std::exp(1.0 - r / c) : 1.0;
  }
  if (!zero && result.hyp_length > 0) {
    result.score = 100.0 * result.brevity_penalty * std::exp(log_sum / max_order);
  }
  return result;
}

void CorpusStatsBuilder::add(const CMVariant& variant, const Sentence& target) {
  cmi_sum_ += variant.cmi;
  spf_sum_ += variant.spf;
  for (const auto& t : variant.cm_tokens) {
    if (t.lang.kind == Lang::Matrix) ++matrix_;
    if (t.lang.kind == Lang::Embedded) ++embedded_;
  }
  target_ += target.size();
  std::string line = variant.text();
  token_lengths_.push_back(variant.cm_tokens.size());
  char_lengths_.push_back(codepoint_count(line));
  lines_.push_back(std::move(line));
}

namespace {

double mean_of(const std::vector<std::size_t>& v) {
  if (v.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t x : v) sum += static_cast<double>(x);
  return sum / static_cast<double>(v.size());
}

double median_of(std::vector<std::size_t> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  if (v.size() % 2 == 1) return static_cast<double>(v[mid]);
  return (static_cast<double>(v[mid - 1]) + static_cast<double>(v[mid])) / 2.0;
}

}  // namespace

CorpusStats CorpusStatsBuilder::finish() const {
  CorpusStats s;
  s.sentences = lines_.size();
  s.unique_sentences = std::unordered_set<std::string>(lines_.begin(), lines_.end()).size();
  if (s.sentences > 0) {
    s.mean_cmi = cmi_sum_ / static_cast<double>(s.sentences);
    s.mean_spf = spf_sum_ / static_cast<double>(s.sentences);
  }
  s.matrix_tokens = matrix_;
  s.embedded_tokens = embedded_;
  s.target_tokens = target_;
  s.token_mean = mean_of(token_lengths_);
  s.token_median = median_of(token_lengths_);
  s.char_mean = mean_of(char_lengths_);
  s.char_median = median_of(char_lengths_);
  for (std::size_t x : token_lengths_) s.token_max = std::max(s.token_max, x);
  for (std::size_t x : char_lengths_) s.char_max = std::max(s.char_max, x);
  return s;
}

CorpusStats corpus_stats(const std::vector<CMRecord>& corpus) {
  CorpusStatsBuilder b;
  for (const auto& r : corpus) b.add(r.variant, r.target);
  return b.finish();
}

void write_stats_report(std::ostream& out, const CorpusStats& s, const std::string& label) {
  char row[512];
  std::snprintf(row, sizeof row, "%s\t%zu\t%zu\t%.2f\t%.2f\t%zu\t%zu\t%zu\t%.2f\t%.1f\t%.2f\t%.1f\n",
                label.c_str(), s.sentences, s.unique_sentences, s.mean_cmi, s.mean_spf * 100.0,
                s.matrix_tokens, s.embedded_tokens, s.target_tokens, s.token_mean, s.token_median,
                s.char_mean, s.char_median);
  out << "corpus\tsent\tunique\tcmi\tspf_pct\tmatrix_src_tokens\tembedded_src_tokens\ttgt_tokens"
         "\ttoken_mean\ttoken_median\tchar_mean\tchar_median\n"
      << row << '\n';
  char summary[1024];
  std::snprintf(summary, sizeof summary,
                "# %s\n"
                "#   sentences:        %zu (%zu unique)\n"
                "#   mean CMI:         %.2f\n"
                "#   mean SPF:         %.2f%%\n"
                "#   source tokens:    %zu matrix, %zu embedded\n"
                "#   target tokens:    %zu\n"
                "#   tokens/sentence:  mean %.2f, median %.1f, max %zu\n"
                "#   chars/sentence:   mean %.2f, median %.1f, max %zu\n",
                label.c_str(), s.sentences, s.unique_sentences, s.mean_cmi, s.mean_spf * 100.0,
                s.matrix_tokens, s.embedded_tokens, s.target_tokens, s.token_mean, s.token_median,
                s.token_max, s.char_mean, s.char_median, s.char_max);
  out << summary;
}

}  // namespace cmix
