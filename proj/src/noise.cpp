#include "cmix/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <sstream>

#include "cmix/corpus.hpp"
#include "cmix/data_tables.hpp"
#include "cmix/error.hpp"

namespace cmix {

namespace {

bool is_ascii_letter(char32_t c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_vowel(char32_t c) {
  switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
    case 'A': case 'E': case 'I': case 'O': case 'U':
      return true;
    default:
      return false;
  }
}

bool typo_position_ok(const std::u32string& w, std::size_t pos, const KeyboardAdjacency& keys) {
  if (pos >= w.size() || !is_ascii_letter(w[pos])) return false;
  const char lower = static_cast<char>(w[pos] | 0x20);
  return !keys.neighbors(lower).empty();
}

}  // namespace

const char* noise_type_name(NoiseType t) {
  switch (t) {
    case NoiseType::Switch: return "switch";
    case NoiseType::Omission: return "omission";
    case NoiseType::Typo: return "typo";
    case NoiseType::Shuffle: return "shuffle";
  }
  return "?";
}

double NoiseSpec::rate(NoiseType t) const {
  switch (t) {
    case NoiseType::Switch: return rate_switch;
    case NoiseType::Omission: return rate_omission;
    case NoiseType::Typo: return rate_typo;
    case NoiseType::Shuffle: return rate_shuffle;
  }
  return 0.0;
}

void NoiseSpec::validate() const {
  for (NoiseType t : kNoiseTypes) {
    const double r = rate(t);
    if (!(r >= 0.0 && r <= 1.0)) {
      throw Error(std::string("noise rate for ") + noise_type_name(t) + " must be in [0,1]");
    }
  }
  // Rates are usually written with two decimals; allow for their rounding.
  if (total_rate() > 1.0 + 1e-9) {
    std::ostringstream msg;
    msg << "noise rates sum to " << total_rate() << ", more than 1";
    throw Error(msg.str());
  }
  if (min_len_switch < 4) throw Error("noise min length for switch must be at least 4");
  if (min_len_omission < 4) throw Error("noise min length for omission must be at least 4");
  if (min_len_typo < 1) throw Error("noise min length for typo must be at least 1");
  if (min_len_shuffle < 4) throw Error("noise min length for shuffle must be at least 4");
}

NoiseSpec NoiseSpec::parse_rates(std::string_view text, std::uint64_t seed) {
  NoiseSpec spec;
  spec.rate_switch = spec.rate_omission = spec.rate_typo = spec.rate_shuffle = 0.0;
  spec.seed = seed;
  std::set<std::string> seen;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string item(text.substr(start, comma - start));
    start = comma + 1;
    if (item.empty()) {
      if (comma == text.size()) break;
      throw Error("noise rates: empty item");
    }
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error("noise rates: expected type=rate, got '" + item + "'");
    const std::string name = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    double r = 0.0;
    std::size_t used = 0;
    try {
      r = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) throw Error("noise rates: bad number '" + value + "'");
    if (!seen.insert(name).second) throw Error("noise rates: '" + name + "' given twice");
    if (name == "switch") spec.rate_switch = r;
    else if (name == "omission") spec.rate_omission = r;
    else if (name == "typo") spec.rate_typo = r;
    else if (name == "shuffle") spec.rate_shuffle = r;
    else throw Error("noise rates: unknown type '" + name + "'");
  }
  spec.validate();
  return spec;
}

KeyboardAdjacency KeyboardAdjacency::parse(std::string_view text, const std::string& source_name) {
  KeyboardAdjacency adj;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line.size() < 3 || line[1] != '\t' || line[0] < 'a' || line[0] > 'z') {
      throw ParseError(source_name, line_no, "expected key<TAB>neighbors");
    }
    std::string neighbors = line.substr(2);
    for (char c : neighbors) {
      if (c < 'a' || c > 'z') throw ParseError(source_name, line_no, "neighbors must be lowercase letters");
    }
    adj.keys_[line[0]] = std::move(neighbors);
  }
  return adj;
}

const KeyboardAdjacency& KeyboardAdjacency::qwerty() {
  static const KeyboardAdjacency table = parse(data::qwerty_adjacency_table(), "data/qwerty_adjacency.tsv");
  return table;
}

std::string_view KeyboardAdjacency::neighbors(char key) const {
  const auto it = keys_.find(key);
  return it == keys_.end() ? std::string_view{} : std::string_view{it->second};
}

std::optional<std::string> perturb_switch(std::string_view word, std::size_t position) {
  std::u32string w = to_u32(word);
  if (w.size() < 4 || position < 1 || position + 3 > w.size()) return std::nullopt;
  std::swap(w[position], w[position + 1]);
  return to_utf8(w);
}

std::optional<std::string> perturb_omission(std::string_view word, Rng& rng) {
  const std::u32string w = to_u32(word);
  if (w.size() < 4) return std::nullopt;
  std::u32string out;
  out.push_back(w.front());
  bool deleted = false;
  for (std::size_t i = 1; i + 1 < w.size(); ++i) {
    if (is_vowel(w[i]) && rng.coin()) {
      deleted = true;
      continue;
    }
    out.push_back(w[i]);
  }
  out.push_back(w.back());
  if (!deleted) {
    out = w;
    out.erase(1 + rng.below(w.size() - 2), 1);
  }
  return to_utf8(out);
}

std::optional<std::string> perturb_typo(std::string_view word, std::size_t position, Rng& rng,
                                        const KeyboardAdjacency& keys) {
  std::u32string w = to_u32(word);
  if (w.size() < 3 || !typo_position_ok(w, position, keys)) return std::nullopt;
  const bool upper = w[position] >= 'A' && w[position] <= 'Z';
  const std::string_view options = keys.neighbors(static_cast<char>(w[position] | 0x20));
  char pick = options[rng.below(options.size())];
  if (upper) pick = static_cast<char>(pick - 'a' + 'A');
  w[position] = static_cast<char32_t>(pick);
  return to_utf8(w);
}

std::optional<std::string> perturb_shuffle(std::string_view word, Rng& rng) {
  const std::u32string w = to_u32(word);
  if (w.size() < 4) return std::nullopt;
  const std::u32string interior = w.substr(1, w.size() - 2);
  if (std::all_of(interior.begin(), interior.end(), [&](char32_t c) { return c == interior[0]; })) {
    return std::nullopt;
  }
  for (int attempt = 0; attempt < 10; ++attempt) {
    std::u32string p = interior;
    for (std::size_t i = p.size() - 1; i > 0; --i) std::swap(p[i], p[rng.below(i + 1)]);
    if (p != interior) {
      std::u32string out;
      out.push_back(w.front());
      out += p;
      out.push_back(w.back());
      return to_utf8(out);
    }
  }
  return std::nullopt;
}

std::size_t NoiseReport::perturbed() const {
  std::size_t n = 0;
  for (std::size_t a : applied) n += a;
  return n;
}

void NoiseReport::merge(const NoiseReport& other) {
  tokens += other.tokens;
  eligible += other.eligible;
  for (std::size_t k = 0; k < 4; ++k) {
    drawn[k] += other.drawn[k];
    applied[k] += other.applied[k];
    fallback[k] += other.fallback[k];
  }
}

void NoiseReport::write(std::ostream& out, const NoiseSpec& spec) const {
  out << "type\trate\tdrawn\tapplied\tfallback\tapplied_fraction\n";
  char buf[64];
  for (NoiseType t : kNoiseTypes) {
    const auto k = static_cast<std::size_t>(t);
    const double frac = eligible ? static_cast<double>(applied[k]) / static_cast<double>(eligible) : 0.0;
    std::snprintf(buf, sizeof buf, "%.4f\t", spec.rate(t));
    out << noise_type_name(t) << '\t' << buf << drawn[k] << '\t' << applied[k] << '\t' << fallback[k];
    std::snprintf(buf, sizeof buf, "\t%.6f\n", frac);
    out << buf;
  }
  const double total = eligible ? static_cast<double>(perturbed()) / static_cast<double>(eligible) : 0.0;
  std::snprintf(buf, sizeof buf, "%.6f", total);
  out << "# tokens=" << tokens << " eligible=" << eligible << " perturbed=" << perturbed()
      << " perturbed_fraction=" << buf << '\n';
}

bool noise_eligible(const TaggedToken& token, NoiseEligibility eligibility) {
  if (token.surface.empty()) return false;
  switch (eligibility) {
    case NoiseEligibility::TransliteratedMatrix:
      return token.lang.kind == Lang::Matrix && token.transliterated;
    case NoiseEligibility::AllLatin:
      if (token.lang.kind == Lang::Neutral) return false;
      return std::all_of(token.surface.begin(), token.surface.end(),
                         [](char c) { return is_ascii_letter(static_cast<unsigned char>(c)); });
  }
  return false;
}

void inject_noise(CMVariant& variant, const NoiseSpec& spec, NoiseReport& report) {
  const double t_switch = spec.rate_switch;
  const double t_omission = t_switch + spec.rate_omission;
  const double t_typo = t_omission + spec.rate_typo;
  const double t_shuffle = t_typo + spec.rate_shuffle;
  const KeyboardAdjacency& keys = KeyboardAdjacency::qwerty();

  for (std::size_t k = 0; k < variant.cm_tokens.size(); ++k) {
    TaggedToken& tok = variant.cm_tokens[k];
    ++report.tokens;
    if (!noise_eligible(tok, spec.eligibility)) continue;
    ++report.eligible;

    Rng rng(derive_seed({spec.seed, variant.pair_id, variant.ordinal, k}));
    const double u = rng.uniform01();
    NoiseType type;
    if (u < t_switch) type = NoiseType::Switch;
    else if (u < t_omission) type = NoiseType::Omission;
    else if (u < t_typo) type = NoiseType::Typo;
    else if (u < t_shuffle) type = NoiseType::Shuffle;
    else continue;

    const auto slot = static_cast<std::size_t>(type);
    ++report.drawn[slot];
    const std::u32string w = to_u32(tok.surface);
    std::optional<std::string> out;
    switch (type) {
      case NoiseType::Switch: {
        if (w.size() < spec.min_len_switch) break;
        std::vector<std::size_t> spots;
        for (std::size_t p = 1; p + 3 <= w.size(); ++p) {
          if (w[p] != w[p + 1]) spots.push_back(p);
        }
        if (!spots.empty()) out = perturb_switch(tok.surface, spots[rng.below(spots.size())]);
        break;
      }
      case NoiseType::Omission:
        if (w.size() >= spec.min_len_omission) out = perturb_omission(tok.surface, rng);
        break;
      case NoiseType::Typo: {
        if (w.size() < spec.min_len_typo) break;
        std::vector<std::size_t> spots;
        for (std::size_t p = 0; p < w.size(); ++p) {
          if (typo_position_ok(w, p, keys)) spots.push_back(p);
        }
        if (!spots.empty()) out = perturb_typo(tok.surface, spots[rng.below(spots.size())], rng, keys);
        break;
      }
      case NoiseType::Shuffle:
        if (w.size() >= spec.min_len_shuffle) out = perturb_shuffle(tok.surface, rng);
        break;
    }
    if (out && *out != tok.surface) {
      tok.surface = std::move(*out);
      ++report.applied[slot];
    } else {
      ++report.fallback[slot];
    }
  }
}

NoiseReport inject_noise(std::vector<CMRecord>& corpus, const NoiseSpec& spec) {
  spec.validate();
  NoiseReport report;
  for (auto& rec : corpus) inject_noise(rec.variant, spec, report);
  return report;
}

}  // namespace cmix
