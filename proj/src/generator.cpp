#include "cmix/generator.hpp"

#include <algorithm>
#include <exception>
#include <set>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "cmix/error.hpp"
#include "cmix/metrics.hpp"

namespace cmix {

FilterSpec FilterSpec::permissive(std::size_t cap) {
  FilterSpec f;
  f.cmi_lo = 0.0;
  f.cmi_hi = 100.0;
  f.spf_lo = 0.0;
  f.spf_hi = 1.0;
  f.cap = cap;
  return f;
}

void FilterSpec::validate() const {
  if (cmi_lo > cmi_hi) throw Error("cmi window inverted");
  if (spf_lo > spf_hi) throw Error("spf window inverted");
  if (cap < 1) throw Error("variant cap must be at least 1");
  if (ppl_max && !(*ppl_max > 0.0)) throw Error("ppl threshold must be positive");
}

std::vector<std::size_t> select_candidates(const Sentence& sentence, const InclusionList& inclusion) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    const auto& t = sentence.tokens[i];
    if (!t.pos) {
      throw Error("sentence " + std::to_string(sentence.id) + ": token " + std::to_string(i) +
                  " has no POS tag");
    }
    if (inclusion.contains(*t.pos)) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> combination_sizes(std::size_t r) {
  std::size_t lo = 1;
  std::size_t hi = r;
  if (r == 0) return {};
  if (r >= 5 && r <= 7) {
    lo = r - 3;
  } else if (r >= 8) {
    lo = (6 * r + 9) / 10;  // ceil(0.6 r)
    hi = (7 * r) / 10;      // floor(0.7 r)
  }
  std::vector<std::size_t> out;
  for (std::size_t k = lo; k <= hi; ++k) out.push_back(k);
  return out;
}

unsigned __int128 binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  if (n > kMaxCandidates) throw std::overflow_error("binomial: n exceeds " + std::to_string(kMaxCandidates));
  static const auto table = [] {
    std::vector<std::vector<unsigned __int128>> t(kMaxCandidates + 1);
    for (std::size_t i = 0; i <= kMaxCandidates; ++i) {
      t[i].assign(i + 1, 1);
      for (std::size_t j = 1; j < i; ++j) t[i][j] = t[i - 1][j - 1] + t[i - 1][j];
    }
    return t;
  }();
  return table[n][k];
}

unsigned __int128 count_variants_wide(std::size_t r) {
  unsigned __int128 total = 0;
  for (std::size_t k : combination_sizes(r)) total += binomial(r, k);
  return total;
}

std::uint64_t count_variants(std::size_t r) {
  const unsigned __int128 total = count_variants_wide(r);
  if (total > UINT64_MAX) throw std::overflow_error("count_variants: exceeds 64 bits");
  return static_cast<std::uint64_t>(total);
}

std::vector<std::size_t> unrank_combination(std::size_t r, std::size_t k, unsigned __int128 rank) {
  if (k > r || rank >= binomial(r, k)) throw Error("unrank_combination: rank out of range");
  std::vector<std::size_t> out;
  out.reserve(k);
  std::size_t next = 0;
  for (std::size_t pos = 0; pos < k; ++pos) {
    for (std::size_t c = next;; ++c) {
      const unsigned __int128 block = binomial(r - 1 - c, k - 1 - pos);
      if (rank < block) {
        out.push_back(c);
        next = c + 1;
        break;
      }
      rank -= block;
    }
  }
  return out;
}

SubsetSampler::SubsetSampler(std::size_t r) : r_(r), sizes_(combination_sizes(r)) {
  if (r > kMaxCandidates) throw Error("too many candidates: " + std::to_string(r));
  total_ = count_variants_wide(r);
}

std::vector<std::size_t> SubsetSampler::draw(Rng& rng) const {
  if (total_ == 0) return {};
  unsigned __int128 rank = rng.below_wide(total_);
  for (std::size_t k : sizes_) {
    const unsigned __int128 block = binomial(r_, k);
    if (rank < block) return unrank_combination(r_, k, rank);
    rank -= block;
  }
  throw Error("SubsetSampler: rank outside family");  // unreachable
}

namespace {

bool canonical_less(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace

std::vector<std::vector<std::size_t>> sample_subsets(const std::vector<std::size_t>& candidates,
                                                     std::size_t cap, std::uint64_t seed) {
  const std::size_t r = candidates.size();
  if (r > kMaxCandidates) throw Error("too many candidates: " + std::to_string(r));
  std::vector<std::vector<std::size_t>> positions;

  if (count_variants_wide(r) <= cap) {
    for (std::size_t k : combination_sizes(r)) {
      const auto n = static_cast<std::size_t>(binomial(r, k));
      for (std::size_t rank = 0; rank < n; ++rank) positions.push_back(unrank_combination(r, k, rank));
    }
  } else {
    const SubsetSampler sampler(r);
    Rng rng(seed);
    std::set<std::vector<std::size_t>> seen;
    while (positions.size() < cap) {
      auto s = sampler.draw(rng);
      if (seen.insert(s).second) positions.push_back(std::move(s));
    }
    std::sort(positions.begin(), positions.end(), canonical_less);
  }

  std::vector<std::vector<std::size_t>> out;
  out.reserve(positions.size());
  for (const auto& p : positions) {
    std::vector<std::size_t> subset;
    subset.reserve(p.size());
    for (std::size_t idx : p) subset.push_back(candidates[idx]);
    out.push_back(std::move(subset));
  }
  return out;
}

CMVariant substitute(const ParallelPair& pair, const SubstitutionTable& table,
                     const std::vector<std::size_t>& subset, const LangTag& embedded) {
  if (subset.empty()) throw Error("pair " + std::to_string(pair.id) + ": empty switch set");
  CMVariant v;
  v.pair_id = pair.id;
  v.switched = subset;
  std::sort(v.switched.begin(), v.switched.end());
  if (std::adjacent_find(v.switched.begin(), v.switched.end()) != v.switched.end()) {
    throw Error("pair " + std::to_string(pair.id) + ": duplicate index in switch set");
  }
  v.cm_tokens = pair.source.tokens;
  for (std::size_t idx : v.switched) {
    const auto it = table.entries.find(idx);
    if (it == table.entries.end()) {
      throw Error("pair " + std::to_string(pair.id) + ": index " + std::to_string(idx) +
                  " not in substitution table");
    }
    if (idx >= v.cm_tokens.size() || v.cm_tokens[idx].surface != it->second.source) {
      throw Error("pair " + std::to_string(pair.id) + ": substitution table does not match source at index " +
                  std::to_string(idx));
    }
    auto& tok = v.cm_tokens[idx];
    tok.surface = it->second.target;
    tok.lang = embedded;
    tok.transliterated = false;
  }
  v.cmi = cmi(v.cm_tokens);
  v.spf = spf(v.cm_tokens);
  return v;
}

std::vector<CMVariant> filter_variants(std::vector<CMVariant> variants, const FilterSpec& spec,
                                       const FluencyScorer* scorer) {
  spec.validate();
  if (spec.ppl_max && !scorer) throw Error("ppl threshold set without a fluency scorer");

  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < variants.size(); ++k) {
    auto& v = variants[k];
    if (v.cmi < spec.cmi_lo || v.cmi > spec.cmi_hi) continue;
    if (v.spf < spec.spf_lo || v.spf > spec.spf_hi) continue;
    if (scorer) v.ppl = scorer->score(v);
    if (spec.ppl_max && *v.ppl > *spec.ppl_max) continue;
    kept.push_back(k);
  }

  if (kept.size() > spec.cap) {
    auto ranked = kept;
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
      const auto& va = variants[a];
      const auto& vb = variants[b];
      if (va.ppl && vb.ppl && *va.ppl != *vb.ppl) return *va.ppl < *vb.ppl;
      return canonical_less(va.switched, vb.switched);
    });
    ranked.resize(spec.cap);
    std::sort(ranked.begin(), ranked.end());
    kept = std::move(ranked);
  }

  std::vector<CMVariant> out;
  out.reserve(kept.size());
  for (std::size_t k : kept) out.push_back(std::move(variants[k]));
  return out;
}

namespace {

struct PairResult {
  std::vector<CMVariant> variants;
  std::size_t sampled = 0;
  bool no_candidates = false;
  bool oversized = false;
};

PairResult generate_one(const ParallelPair& pair, const SubstitutionTable* table,
                        const InclusionList& inclusion, const GeneratorSettings& settings,
                        const FluencyScorer* scorer) {
  PairResult res;
  std::vector<std::size_t> candidates;
  if (table) {
    for (std::size_t idx : select_candidates(pair.source, inclusion))
      if (table->contains(idx)) candidates.push_back(idx);
  }
  if (candidates.empty()) {
    res.no_candidates = true;
    return res;
  }
  if (candidates.size() > kMaxCandidates) {
    res.oversized = true;
    return res;
  }
  const auto subsets = sample_subsets(candidates, settings.sample_cap,
                                      derive_seed({settings.seed, static_cast<std::uint64_t>(pair.id)}));
  std::vector<CMVariant> variants;
  variants.reserve(subsets.size());
  for (std::size_t k = 0; k < subsets.size(); ++k) {
    auto v = substitute(pair, *table, subsets[k], settings.embedded);
    v.ordinal = k;
    variants.push_back(std::move(v));
  }
  res.sampled = variants.size();
  res.variants = filter_variants(std::move(variants), settings.filter, scorer);
  return res;
}

}  // namespace

GenerationReport generate_cm_corpus(const std::vector<ParallelPair>& pairs,
                                    const std::vector<SubstitutionTable>& tables,
                                    const InclusionList& inclusion,
                                    const GeneratorSettings& settings,
                                    const FluencyScorer* scorer, const VariantSink& sink) {
  settings.filter.validate();
  if (settings.sample_cap < 1) throw Error("sample cap must be at least 1");
  if (settings.filter.ppl_max && !scorer) throw Error("ppl threshold set without a fluency scorer");

  std::unordered_map<std::size_t, const SubstitutionTable*> by_id;
  for (const auto& t : tables) by_id[t.id] = &t;
  auto table_for = [&](std::size_t id) -> const SubstitutionTable* {
    const auto it = by_id.find(id);
    return it == by_id.end() ? nullptr : it->second;
  };

  GenerationReport report;
  const unsigned workers = std::max(1U, settings.threads);
  constexpr std::size_t kBatch = 4096;
  std::vector<PairResult> batch;
  for (std::size_t start = 0; start < pairs.size(); start += kBatch) {
    const std::size_t end = std::min(pairs.size(), start + kBatch);
    batch.assign(end - start, PairResult{});
    auto work = [&](std::size_t from, std::size_t to) {
      for (std::size_t p = from; p < to; ++p)
        batch[p - start] = generate_one(pairs[p], table_for(pairs[p].id), inclusion, settings, scorer);
    };
    if (workers == 1) {
      work(start, end);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(workers);
      const std::size_t chunk = (end - start + workers - 1) / workers;
      for (unsigned w = 0; w < workers; ++w) {
        const std::size_t b = std::min(end, start + w * chunk);
        const std::size_t e = std::min(end, b + chunk);
        if (b >= e) continue;
        pool.emplace_back([&, w, b, e] {
          try {
            work(b, e);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
    }
    for (std::size_t p = start; p < end; ++p) {
      const auto& res = batch[p - start];
      ++report.pairs;
      report.variants_sampled += res.sampled;
      if (res.no_candidates) ++report.pairs_without_candidates;
      if (res.oversized) ++report.pairs_oversized;
      if (!res.no_candidates && !res.oversized && res.variants.empty()) ++report.pairs_without_survivors;
      for (const auto& v : res.variants) {
        sink(v, pairs[p].target);
        ++report.variants_emitted;
      }
    }
  }
  return report;
}

}  // namespace cmix
