#include "cmix/fluency.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cmix/corpus.hpp"
#include "cmix/error.hpp"
#include "cmix/io.hpp"

namespace cmix {

namespace {

constexpr char kMagic[] = "CMLM1";
constexpr std::uint32_t kUnkId = 0;
constexpr std::uint32_t kEosId = 1;
constexpr std::uint32_t kBosId = 2;

void append_id(std::string& key, std::uint32_t id) {
  for (int b = 0; b < 4; ++b) key.push_back(static_cast<char>((id >> (8 * b)) & 0xff));
}

std::string pack(const std::uint32_t* ids, std::size_t n) {
  std::string key;
  key.reserve(4 * n);
  for (std::size_t i = 0; i < n; ++i) append_id(key, ids[i]);
  return key;
}

template <typename Map>
std::uint64_t lookup(const Map& m, const std::string& key) {
  const auto it = m.find(key);
  return it == m.end() ? 0 : it->second;
}

// Little-endian binary helpers for the model file.
void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}
void put_str(std::ostream& out, const std::string& s) {
  put_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}
void put_f64(std::ostream& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  put_u64(out, bits);
}

class Reader {
 public:
  Reader(std::string data, std::string path) : data_(std::move(data)), path_(std::move(path)) {}

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double d;
    std::memcpy(&d, &bits, sizeof d);
    return d;
  }
  std::string str() {
    const std::uint64_t n = u64();
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string raw(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::uint64_t n) const {
    if (n > data_.size() - pos_) throw Error(path_ + ": truncated language model file");
  }
  std::string data_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<double> NgramLM::default_lambdas(int order) {
  if (order < 1) throw Error("n-gram order must be at least 1");
  if (order == 3) return {0.5, 0.3, 0.2};
  return std::vector<double>(static_cast<std::size_t>(order), 1.0 / order);
}

NgramLM NgramLM::train(const std::vector<std::vector<std::string>>& corpus, int order) {
  return train(corpus, order, default_lambdas(order));
}

NgramLM NgramLM::train(const std::vector<std::vector<std::string>>& corpus, int order,
                       std::vector<double> lambdas) {
  if (order < 1) throw Error("n-gram order must be at least 1");
  if (corpus.empty()) throw Error("cannot train a language model on an empty corpus");
  if (lambdas.size() != static_cast<std::size_t>(order)) {
    throw Error("expected " + std::to_string(order) + " interpolation weights");
  }
  for (double l : lambdas) {
    if (!(l > 0.0)) throw Error("interpolation weights must be positive");
  }
  if (std::abs(std::accumulate(lambdas.begin(), lambdas.end(), 0.0) - 1.0) > 1e-9) {
    throw Error("interpolation weights must sum to 1");
  }

  std::map<std::string, std::uint64_t> freq;
  for (const auto& s : corpus) {
    for (const auto& w : s) ++freq[w];
  }

  NgramLM lm;
  lm.order_ = order;
  lm.lambdas_ = std::move(lambdas);
  lm.words_ = {std::string(kUnk), std::string(kEos), std::string(kBos)};
  for (const auto& [w, c] : freq) {
    if (c >= 2 && w != kUnk && w != kEos && w != kBos) lm.words_.push_back(w);
  }
  lm.rebuild_index();
  lm.ngrams_.assign(order, {});
  lm.contexts_.assign(order, {});

  const std::size_t pad = static_cast<std::size_t>(order - 1);
  std::vector<std::uint32_t> ids;
  for (const auto& s : corpus) {
    ids.assign(pad, kBosId);
    for (const auto& w : s) ids.push_back(lm.id_of(w));
    ids.push_back(kEosId);
    for (std::size_t t = pad; t < ids.size(); ++t) {
      for (std::size_t k = 1; k <= static_cast<std::size_t>(order); ++k) {
        const std::uint32_t* h = ids.data() + t - (k - 1);
        ++lm.contexts_[k - 1][pack(h, k - 1)];
        ++lm.ngrams_[k - 1][pack(h, k)];
      }
    }
  }

  // Without singletons the unknown symbol still needs unigram mass.
  std::string unk_key;
  append_id(unk_key, kUnkId);
  if (lm.ngrams_[0].count(unk_key) == 0) {
    lm.ngrams_[0][unk_key] = 1;
    ++lm.contexts_[0][std::string()];
  }
  return lm;
}

void NgramLM::rebuild_index() {
  ids_.clear();
  for (std::uint32_t i = 0; i < words_.size(); ++i) ids_.emplace(words_[i], i);
}

std::uint32_t NgramLM::id_of(std::string_view word) const {
  const auto it = ids_.find(std::string(word));
  if (it == ids_.end() || it->second == kBosId) return kUnkId;
  return it->second;
}

bool NgramLM::in_vocab(std::string_view word) const {
  const auto it = ids_.find(std::string(word));
  return it != ids_.end() && it->second != kBosId;
}

double NgramLM::prob_ids(const std::uint32_t* context, std::size_t context_len,
                         std::uint32_t word) const {
  double mass = 0.0;
  double weight = 0.0;
  std::string key;
  for (std::size_t k = 1; k <= static_cast<std::size_t>(order_); ++k) {
    if (k - 1 > context_len) break;
    key = pack(context + context_len - (k - 1), k - 1);
    const std::uint64_t ch = lookup(contexts_[k - 1], key);
    if (ch == 0) continue;
    append_id(key, word);
    const std::uint64_t chw = lookup(ngrams_[k - 1], key);
    mass += lambdas_[k - 1] * static_cast<double>(chw) / static_cast<double>(ch);
    weight += lambdas_[k - 1];
  }
  return mass / weight;
}

double NgramLM::prob(std::string_view word, const std::vector<std::string>& history) const {
  if (word == kBos) throw Error("\"<s>\" is never predicted");
  const std::size_t pad = static_cast<std::size_t>(order_ - 1);
  std::vector<std::uint32_t> ctx(pad, kBosId);
  for (const auto& h : history) ctx.push_back(h == kBos ? kBosId : id_of(h));
  const std::size_t len = std::min(ctx.size(), pad);
  return prob_ids(ctx.data() + ctx.size() - len, len, id_of(word));
}

double NgramLM::perplexity(const std::vector<std::string>& sentence) const {
  if (sentence.empty()) throw Error("perplexity of an empty sentence is undefined");
  const std::size_t pad = static_cast<std::size_t>(order_ - 1);
  std::vector<std::uint32_t> ids(pad, kBosId);
  for (const auto& w : sentence) ids.push_back(id_of(w));
  ids.push_back(kEosId);
  double log_sum = 0.0;
  for (std::size_t t = pad; t < ids.size(); ++t) {
    log_sum += std::log(prob_ids(ids.data() + t - pad, pad, ids[t]));
  }
  const double n = static_cast<double>(ids.size() - pad);
  return std::exp(-log_sum / n);
}

void NgramLM::save(const std::string& path) const {
  std::ostringstream out;
  out.write(kMagic, 5);
  put_u64(out, static_cast<std::uint64_t>(order_));
  for (double l : lambdas_) put_f64(out, l);
  put_u64(out, words_.size());
  for (const auto& w : words_) put_str(out, w);
  for (int k = 0; k < order_; ++k) {
    for (const auto* table : {&contexts_[k], &ngrams_[k]}) {
      put_u64(out, table->size());
      for (const auto& [key, count] : *table) {
        put_str(out, key);
        put_u64(out, count);
      }
    }
  }
  write_file_atomic(path, out.str());
}

NgramLM NgramLM::load(const std::string& path) {
  Reader in(read_file(path), path);
  if (in.raw(5) != std::string(kMagic, 5)) throw Error(path + ": not a CMLM1 language model");
  NgramLM lm;
  const std::uint64_t order = in.u64();
  if (order < 1 || order > 16) throw Error(path + ": bad n-gram order");
  lm.order_ = static_cast<int>(order);
  for (std::uint64_t k = 0; k < order; ++k) lm.lambdas_.push_back(in.f64());
  const std::uint64_t nwords = in.u64();
  if (nwords < 3) throw Error(path + ": vocabulary is missing reserved symbols");
  for (std::uint64_t i = 0; i < nwords; ++i) lm.words_.push_back(in.str());
  lm.rebuild_index();
  lm.ngrams_.assign(order, {});
  lm.contexts_.assign(order, {});
  for (std::uint64_t k = 0; k < order; ++k) {
    for (auto* table : {&lm.contexts_[k], &lm.ngrams_[k]}) {
      const std::uint64_t n = in.u64();
      for (std::uint64_t i = 0; i < n; ++i) {
        std::string key = in.str();
        (*table)[std::move(key)] = in.u64();
      }
    }
  }
  if (!in.done()) throw Error(path + ": trailing bytes after language model");
  return lm;
}

double LmScorer::score(const CMVariant& variant) const { return lm_.perplexity(variant_words(variant)); }

ExternalScorer ExternalScorer::load(const std::string& path) {
  std::map<std::pair<std::size_t, std::size_t>, double> scores;
  const auto lines = read_lines(path);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto& line = lines[k];
    if (line.empty()) continue;
    if (k == 0 && line.rfind("id\t", 0) == 0) continue;  // header
    std::istringstream fields(line);
    std::string a, b, c, extra;
    if (!std::getline(fields, a, '\t') || !std::getline(fields, b, '\t') ||
        !std::getline(fields, c, '\t') || std::getline(fields, extra, '\t')) {
      throw ParseError(path, k + 1, "expected id<TAB>variant<TAB>ppl");
    }
    try {
      std::size_t used_a = 0, used_b = 0, used_c = 0;
      const auto id = std::stoull(a, &used_a);
      const auto ordinal = std::stoull(b, &used_b);
      const double ppl = std::stod(c, &used_c);
      if (used_a != a.size() || used_b != b.size() || used_c != c.size()) throw std::invalid_argument("");
      if (!(ppl > 0.0) || !std::isfinite(ppl)) throw ParseError(path, k + 1, "ppl must be positive and finite");
      if (!scores.emplace(std::make_pair(id, ordinal), ppl).second) {
        throw ParseError(path, k + 1, "duplicate entry for " + a + "/" + b);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      throw ParseError(path, k + 1, "bad number");
    }
  }
  return ExternalScorer(std::move(scores));
}

double ExternalScorer::score(const CMVariant& variant) const {
  const auto it = scores_.find({variant.pair_id, variant.ordinal});
  if (it == scores_.end()) {
    throw Error("no external score for pair " + std::to_string(variant.pair_id) + " variant " +
                std::to_string(variant.ordinal));
  }
  return it->second;
}

}  // namespace cmix
