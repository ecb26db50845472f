#include "cmix/aligner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "cmix/error.hpp"

namespace cmix {

std::uint32_t Vocabulary::intern(const std::string& word) {
  const auto [it, inserted] = ids_.try_emplace(word, static_cast<std::uint32_t>(words_.size()));
  if (inserted) words_.push_back(word);
  return it->second;
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view word) const {
  const auto it = ids_.find(std::string(word));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

TranslationTable::TranslationTable(Vocabulary source, Vocabulary target,
                                   std::vector<std::size_t> row_offsets,
                                   std::vector<std::uint32_t> columns, std::vector<double> probs)
    : source_(std::move(source)),
      target_(std::move(target)),
      row_offsets_(std::move(row_offsets)),
      columns_(std::move(columns)),
      probs_(std::move(probs)) {}

double TranslationTable::prob_ids(std::uint32_t target, std::uint32_t source) const {
  if (source + 1 >= row_offsets_.size()) return 0.0;
  const auto first = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[source]);
  const auto last = columns_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[source + 1]);
  const auto it = std::lower_bound(first, last, target);
  if (it == last || *it != target) return 0.0;
  return probs_[static_cast<std::size_t>(it - columns_.begin())];
}

std::optional<std::uint32_t> TranslationTable::source_id(std::string_view word) const {
  return source_.find(word);
}

std::optional<std::uint32_t> TranslationTable::target_id(std::string_view word) const {
  return target_.find(word);
}

double TranslationTable::prob(std::string_view target, std::string_view source) const {
  const auto f = source_.find(source);
  const auto e = target_.find(target);
  if (!f || !e) return 0.0;
  return prob_ids(*e, *f);
}

double TranslationTable::null_prob(std::string_view target) const {
  const auto e = target_.find(target);
  return e ? prob_ids(*e, kNull) : 0.0;
}

double TranslationTable::row_sum(std::uint32_t source) const {
  double sum = 0.0;
  for (std::size_t k = row_offsets_[source]; k < row_offsets_[source + 1]; ++k) sum += probs_[k];
  return sum;
}

void TranslationTable::dump(std::ostream& out) const {
  std::vector<std::uint32_t> order(rows());
  std::iota(order.begin(), order.end(), 0U);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return source_.word(a) < source_.word(b); });
  std::ostringstream line;
  line.precision(17);
  for (std::uint32_t f : order) {
    std::vector<std::size_t> slots(row_offsets_[f + 1] - row_offsets_[f]);
    std::iota(slots.begin(), slots.end(), row_offsets_[f]);
    std::sort(slots.begin(), slots.end(), [&](std::size_t a, std::size_t b) {
      if (probs_[a] != probs_[b]) return probs_[a] > probs_[b];
      return target_.word(columns_[a]) < target_.word(columns_[b]);
    });
    for (std::size_t k : slots) {
      out << source_.word(f) << '\t' << target_.word(columns_[k]) << '\t' << probs_[k] << '\n';
    }
  }
}

double alignment_prior(std::size_t i, std::size_t j, std::size_t m, std::size_t n,
                       std::optional<double> tension) {
  const double uniform = 1.0 / static_cast<double>(m + 1);
  if (!tension || i == 0) return uniform;
  const double jn = static_cast<double>(j) / static_cast<double>(n);
  double z = 0.0;
  for (std::size_t k = 1; k <= m; ++k)
    z += std::exp(-*tension * std::abs(static_cast<double>(k) / static_cast<double>(m) - jn));
  const double h = std::exp(-*tension * std::abs(static_cast<double>(i) / static_cast<double>(m) - jn));
  return (static_cast<double>(m) / static_cast<double>(m + 1)) * h / z;
}

namespace {

struct EncodedPair {
  std::vector<std::uint32_t> source;  // without NULL
  std::vector<std::uint32_t> target;
};

struct Sparse {
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> columns;

  std::size_t slot(std::uint32_t f, std::uint32_t e) const {
    const auto first = columns.begin() + static_cast<std::ptrdiff_t>(offsets[f]);
    const auto last = columns.begin() + static_cast<std::ptrdiff_t>(offsets[f + 1]);
    const auto it = std::lower_bound(first, last, e);
    if (it == last || *it != e) return SIZE_MAX;
    return static_cast<std::size_t>(it - columns.begin());
  }
};

void validate(const std::vector<ParallelPair>& pairs, int iterations) {
  if (pairs.empty()) throw Error("aligner: empty corpus");
  if (iterations <= 0) throw Error("aligner: iterations must be positive");
  for (const auto& p : pairs) {
    if (p.source.empty() || p.target.empty()) {
      throw Error("aligner: pair " + std::to_string(p.id) + " has an empty side");
    }
  }
}

// Per-pair prior matrix, row j (0-based target) x column i (0 = NULL).
std::vector<double> prior_matrix(std::size_t m, std::size_t n, std::optional<double> tension) {
  std::vector<double> prior((m + 1) * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= m; ++i) prior[j * (m + 1) + i] = alignment_prior(i, j + 1, m, n, tension);
  return prior;
}

class Trainer {
 public:
  Trainer(const std::vector<ParallelPair>& pairs, std::optional<double> tension, unsigned threads)
      : tension_(tension), threads_(std::max(1U, threads)) {
    source_.intern(std::string(TranslationTable::kNullWord));
    encoded_.reserve(pairs.size());
    for (const auto& p : pairs) {
      EncodedPair ep;
      for (const auto& t : p.source.tokens) ep.source.push_back(source_.intern(t.surface));
      for (const auto& t : p.target.tokens) ep.target.push_back(target_.intern(t.surface));
      encoded_.push_back(std::move(ep));
    }
    build_support();
  }

  TranslationTable run(int iterations, TrainingTrace* trace) {
    for (int it = 0; it < iterations; ++it) {
      std::vector<double> counts(probs_.size(), 0.0);
      const double ll = expectation(counts);
      if (trace) trace->log_likelihood.push_back(ll);
      maximization(counts);
    }
    if (trace) {
      std::vector<double> scratch(probs_.size(), 0.0);
      trace->log_likelihood.push_back(expectation(scratch));
    }
    return TranslationTable(source_, target_, sparse_.offsets, sparse_.columns, probs_);
  }

 private:
  void build_support() {
    std::vector<std::vector<std::uint32_t>> rows(source_.size());
    for (const auto& ep : encoded_) {
      for (std::uint32_t e : ep.target) rows[TranslationTable::kNull].push_back(e);
      for (std::uint32_t f : ep.source)
        rows[f].insert(rows[f].end(), ep.target.begin(), ep.target.end());
    }
    sparse_.offsets.assign(1, 0);
    for (auto& row : rows) {
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
      const double init = row.empty() ? 0.0 : 1.0 / static_cast<double>(row.size());
      for (std::uint32_t e : row) {
        sparse_.columns.push_back(e);
        probs_.push_back(init);
      }
      sparse_.offsets.push_back(sparse_.columns.size());
    }
  }

  double prob(std::uint32_t f, std::uint32_t e) const {
    const std::size_t k = sparse_.slot(f, e);
    return k == SIZE_MAX ? 0.0 : probs_[k];
  }

  double expect_range(std::size_t begin, std::size_t end, std::vector<double>& counts) const {
    double ll = 0.0;
    std::vector<double> weights;
    std::vector<std::size_t> slots;
    for (std::size_t p = begin; p < end; ++p) {
      const auto& ep = encoded_[p];
      const std::size_t m = ep.source.size();
      const std::size_t n = ep.target.size();
      const auto prior = prior_matrix(m, n, tension_);
      weights.resize(m + 1);
      slots.resize(m + 1);
      for (std::size_t j = 0; j < n; ++j) {
        const std::uint32_t e = ep.target[j];
        double z = 0.0;
        for (std::size_t i = 0; i <= m; ++i) {
          const std::uint32_t f = i == 0 ? TranslationTable::kNull : ep.source[i - 1];
          slots[i] = sparse_.slot(f, e);
          weights[i] = slots[i] == SIZE_MAX ? 0.0 : prior[j * (m + 1) + i] * probs_[slots[i]];
          z += weights[i];
        }
        if (z <= 0.0) continue;  // every candidate pruned
        ll += std::log(z);
        for (std::size_t i = 0; i <= m; ++i)
          if (slots[i] != SIZE_MAX) counts[slots[i]] += weights[i] / z;
      }
    }
    return ll;
  }

  double expectation(std::vector<double>& counts) const {
    const std::size_t total = encoded_.size();
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads_, total));
    if (workers <= 1) return expect_range(0, total, counts);

    // Contiguous chunks reduced in chunk order: deterministic for a fixed thread count.
    std::vector<std::vector<double>> partial(workers, std::vector<double>(counts.size(), 0.0));
    std::vector<double> lls(workers, 0.0);
    std::vector<std::thread> pool;
    const std::size_t chunk = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t b = std::min(total, w * chunk);
      const std::size_t e = std::min(total, b + chunk);
      pool.emplace_back([&, w, b, e] { lls[w] = expect_range(b, e, partial[w]); });
    }
    for (auto& t : pool) t.join();
    double ll = 0.0;
    for (unsigned w = 0; w < workers; ++w) {
      ll += lls[w];
      for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += partial[w][k];
    }
    return ll;
  }

  void maximization(const std::vector<double>& counts) {
    Sparse next;
    std::vector<double> next_probs;
    next.offsets.assign(1, 0);
    for (std::size_t f = 0; f + 1 < sparse_.offsets.size(); ++f) {
      const std::size_t b = sparse_.offsets[f];
      const std::size_t e = sparse_.offsets[f + 1];
      double total = 0.0;
      for (std::size_t k = b; k < e; ++k) total += counts[k];
      if (total > 0.0) {
        double kept = 0.0;
        const std::size_t row_start = next_probs.size();
        for (std::size_t k = b; k < e; ++k) {
          const double p = counts[k] / total;
          if (p < kPruneFloor) continue;
          next.columns.push_back(sparse_.columns[k]);
          next_probs.push_back(p);
          kept += p;
        }
        if (kept != 1.0)
          for (std::size_t k = row_start; k < next_probs.size(); ++k) next_probs[k] /= kept;
      } else {
        // Word never observed with mass: keep its previous distribution.
        for (std::size_t k = b; k < e; ++k) {
          next.columns.push_back(sparse_.columns[k]);
          next_probs.push_back(probs_[k]);
        }
      }
      next.offsets.push_back(next.columns.size());
    }
    sparse_ = std::move(next);
    probs_ = std::move(next_probs);
  }

  std::optional<double> tension_;
  unsigned threads_;
  Vocabulary source_;
  Vocabulary target_;
  std::vector<EncodedPair> encoded_;
  Sparse sparse_;
  std::vector<double> probs_;
};

}  // namespace

TranslationTable train_ibm1(const std::vector<ParallelPair>& pairs, int iterations,
                            unsigned threads, TrainingTrace* trace) {
  validate(pairs, iterations);
  return Trainer(pairs, std::nullopt, threads).run(iterations, trace);
}

TranslationTable train_diagonal(const std::vector<ParallelPair>& pairs, int iterations,
                                double tension, unsigned threads, TrainingTrace* trace) {
  if (!(tension > 0.0)) throw Error("aligner: tension must be positive");
  validate(pairs, iterations);
  return Trainer(pairs, tension, threads).run(iterations, trace);
}

double log_likelihood(const TranslationTable& table, const std::vector<ParallelPair>& pairs,
                      std::optional<double> tension) {
  double ll = 0.0;
  for (const auto& p : pairs) {
    const std::size_t m = p.source.size();
    const std::size_t n = p.target.size();
    for (std::size_t j = 0; j < n; ++j) {
      const auto& e = p.target.tokens[j].surface;
      double z = alignment_prior(0, j + 1, m, n, tension) * table.null_prob(e);
      for (std::size_t i = 1; i <= m; ++i)
        z += alignment_prior(i, j + 1, m, n, tension) * table.prob(e, p.source.tokens[i - 1].surface);
      if (z > 0.0) ll += std::log(z);
    }
  }
  return ll;
}

AlignmentLinks::AlignmentLinks(std::initializer_list<Link> links) {
  for (const Link& l : links) insert(l);
}

void AlignmentLinks::insert(Link link) {
  const auto it = std::lower_bound(links_.begin(), links_.end(), link);
  if (it == links_.end() || *it != link) links_.insert(it, link);
}

bool AlignmentLinks::contains(Link link) const {
  return std::binary_search(links_.begin(), links_.end(), link);
}

AlignmentLinks AlignmentLinks::transposed() const {
  AlignmentLinks out;
  for (const Link& l : links_) out.insert({l.tgt, l.src});
  return out;
}

bool AlignmentLinks::subset_of(const AlignmentLinks& other) const {
  return std::includes(other.links_.begin(), other.links_.end(), links_.begin(), links_.end());
}

AlignmentLinks viterbi_align(const TranslationTable& table, const ParallelPair& pair,
                             std::optional<double> tension) {
  AlignmentLinks links;
  const std::size_t m = pair.source.size();
  const std::size_t n = pair.target.size();
  if (m == 0 || n == 0) return links;

  std::vector<std::optional<std::uint32_t>> src_ids(m);
  for (std::size_t i = 0; i < m; ++i) src_ids[i] = table.source_id(pair.source.tokens[i].surface);

  for (std::size_t j = 0; j < n; ++j) {
    const auto e = table.target_id(pair.target.tokens[j].surface);
    if (!e) continue;
    double best = alignment_prior(0, j + 1, m, n, tension) * table.prob_ids(*e, TranslationTable::kNull);
    std::optional<std::size_t> best_i;  // nullopt = NULL
    for (std::size_t i = 0; i < m; ++i) {
      if (!src_ids[i]) continue;
      const double score = alignment_prior(i + 1, j + 1, m, n, tension) * table.prob_ids(*e, *src_ids[i]);
      if (score > best) {
        best = score;
        best_i = i;
      }
    }
    if (best_i && best > 0.0) links.insert({*best_i, j});
  }
  return links;
}

AlignmentLinks symmetrize(const AlignmentLinks& forward, const AlignmentLinks& backward) {
  AlignmentLinks out;
  for (const Link& l : forward)
    if (backward.contains(l)) out.insert(l);
  return out;
}

std::vector<ParallelPair> reversed(const std::vector<ParallelPair>& pairs) {
  std::vector<ParallelPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back({p.id, p.target, p.source});
  return out;
}

std::vector<AlignmentLinks> align_symmetric(const std::vector<ParallelPair>& pairs,
                                            const AlignerSettings& settings,
                                            TranslationTable* forward_table) {
  std::vector<ParallelPair> usable;
  for (const auto& p : pairs)
    if (!p.source.empty() && !p.target.empty()) usable.push_back(p);

  std::vector<AlignmentLinks> out(pairs.size());
  if (usable.empty()) return out;

  auto train = [&](const std::vector<ParallelPair>& corpus) {
    return settings.tension
               ? train_diagonal(corpus, settings.iterations, *settings.tension, settings.threads)
               : train_ibm1(corpus, settings.iterations, settings.threads);
  };
  const TranslationTable fwd = train(usable);
  const auto usable_rev = reversed(usable);
  const TranslationTable bwd = train(usable_rev);

  for (std::size_t k = 0; k < usable.size(); ++k) {
    const auto f = viterbi_align(fwd, usable[k], settings.tension);
    const auto b = viterbi_align(bwd, usable_rev[k], settings.tension).transposed();
    out[usable[k].id] = symmetrize(f, b);
  }
  if (forward_table) *forward_table = fwd;
  return out;
}

std::string to_pharaoh(const AlignmentLinks& links) {
  std::string out;
  for (const Link& l : links) {
    if (!out.empty()) out += ' ';
    out += std::to_string(l.src) + "-" + std::to_string(l.tgt);
  }
  return out;
}

AlignmentLinks parse_pharaoh(std::string_view line, std::size_t line_no) {
  AlignmentLinks links;
  std::istringstream in{std::string(line)};
  for (std::string item; in >> item;) {
    const auto dash = item.find('-');
    std::size_t i = 0;
    std::size_t j = 0;
    bool ok = dash != std::string::npos && dash > 0 && dash + 1 < item.size();
    if (ok) {
      try {
        std::size_t used = 0;
        i = std::stoul(item.substr(0, dash), &used);
        ok = used == dash;
        j = std::stoul(item.substr(dash + 1), &used);
        ok = ok && used == item.size() - dash - 1;
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) throw ParseError("<pharaoh>", line_no, "malformed link '" + item + "'");
    links.insert({i, j});
  }
  return links;
}

std::vector<AlignmentLinks> load_pharaoh(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<AlignmentLinks> out;
  out.reserve(lines.size());
  for (std::size_t k = 0; k < lines.size(); ++k) {
    try {
      out.push_back(parse_pharaoh(lines[k], k + 1));
    } catch (const ParseError& e) {
      throw ParseError(path, k + 1, e.reason());
    }
  }
  return out;
}

SubstitutionTable extract_substitution_table(const ParallelPair& pair, const AlignmentLinks& links,
                                             const InclusionList& inclusion) {
  const auto& src = pair.source.tokens;
  const auto& tgt = pair.target.tokens;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!src[i].pos) {
      throw Error("pair " + std::to_string(pair.id) + ": source token " + std::to_string(i) +
                  " has no POS tag");
    }
  }
  std::vector<std::size_t> per_src(src.size(), 0);
  std::vector<std::size_t> per_tgt(tgt.size(), 0);
  for (const Link& l : links) {
    if (l.src >= src.size() || l.tgt >= tgt.size()) {
      throw Error("pair " + std::to_string(pair.id) + ": link " + std::to_string(l.src) + "-" +
                  std::to_string(l.tgt) + " out of range");
    }
    ++per_src[l.src];
    ++per_tgt[l.tgt];
  }
  SubstitutionTable table;
  table.id = pair.id;
  for (const Link& l : links) {
    if (per_src[l.src] != 1 || per_tgt[l.tgt] != 1) continue;
    const auto& tok = src[l.src];
    if (!inclusion.contains(*tok.pos)) continue;
    table.entries.emplace(l.src, SubstitutionEntry{tok.surface, tgt[l.tgt].surface, *tok.pos});
  }
  return table;
}

std::string to_jsonl(const SubstitutionTable& table) {
  nlohmann::ordered_json j;
  j["id"] = table.id;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& [idx, e] : table.entries) {
    nlohmann::ordered_json entry;
    entry["src_idx"] = idx;
    entry["src"] = e.source;
    entry["tgt"] = e.target;
    entry["pos"] = e.pos;
    j["entries"].push_back(std::move(entry));
  }
  return j.dump();
}

SubstitutionTable parse_substitution_jsonl(std::string_view line, std::size_t line_no) {
  try {
    const auto j = nlohmann::json::parse(line);
    SubstitutionTable table;
    table.id = j.at("id").get<std::size_t>();
    for (const auto& entry : j.at("entries")) {
      const auto idx = entry.at("src_idx").get<std::size_t>();
      SubstitutionEntry e{entry.at("src").get<std::string>(), entry.at("tgt").get<std::string>(),
                          entry.at("pos").get<std::string>()};
      if (!table.entries.emplace(idx, std::move(e)).second) {
        throw ParseError("<substitutions>", line_no, "duplicate src_idx " + std::to_string(idx));
      }
    }
    return table;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("<substitutions>", line_no, e.what());
  }
}

std::vector<SubstitutionTable> load_substitution_tables(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<SubstitutionTable> out;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    try {
      out.push_back(parse_substitution_jsonl(lines[k], k + 1));
    } catch (const ParseError& e) {
      throw ParseError(path, k + 1, e.reason());
    }
  }
  return out;
}

}  // namespace cmix
