#include "cmix/variant.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

#include "cmix/error.hpp"

namespace cmix {

std::string CMVariant::text() const {
  std::string out;
  for (std::size_t i = 0; i < cm_tokens.size(); ++i) {
    if (i) out += ' ';
    out += cm_tokens[i].surface;
  }
  return out;
}

void write_cm_tsv_header(std::ostream& out) { out << kCmTsvHeader << '\n'; }

void write_cm_tsv_row(std::ostream& out, const CMRecord& r) {
  const auto& v = r.variant;
  std::string tags;
  for (std::size_t i = 0; i < v.cm_tokens.size(); ++i) {
    if (i) tags += ' ';
    tags += v.cm_tokens[i].lang.label();
  }
  char nums[96];
  std::snprintf(nums, sizeof nums, "%.4f\t%.6f\t", v.cmi, v.spf);
  out << v.pair_id << '\t' << v.ordinal << '\t' << v.text() << '\t' << r.target.text() << '\t'
      << tags << '\t' << nums;
  if (v.ppl) {
    char ppl[48];
    std::snprintf(ppl, sizeof ppl, "%.6f", *v.ppl);
    out << ppl;
  }
  out << '\n';
}

void write_cm_tsv(std::ostream& out, const std::vector<CMRecord>& records) {
  write_cm_tsv_header(out);
  for (const auto& r : records) write_cm_tsv_row(out, r);
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return cols;
}

std::vector<std::string> split_spaces(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

bool ascii_letters_only(const std::string& s) {
  if (s.empty()) return false;
  for (unsigned char c : s)
    if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'))) return false;
  return true;
}

std::size_t parse_index(const std::string& s, const std::string& path, std::size_t line_no,
                        const char* field) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ParseError(path, line_no, std::string("bad ") + field + " '" + s + "'");
  }
}

double parse_double(const std::string& s, const std::string& path, std::size_t line_no,
                    const char* field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(path, line_no, std::string("bad ") + field + " '" + s + "'");
  }
}

}  // namespace

std::vector<CMRecord> read_cm_tsv(const std::string& path, const LangTag& matrix,
                                  const LangTag& embedded) {
  const auto lines = read_lines(path);
  std::vector<CMRecord> out;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const std::size_t line_no = k + 1;
    if (k == 0 && lines[k] == kCmTsvHeader) continue;
    if (lines[k].empty()) continue;
    const auto cols = split_tabs(lines[k]);
    if (cols.size() != 8) {
      throw ParseError(path, line_no, "expected 8 columns, got " + std::to_string(cols.size()));
    }
    CMRecord r;
    r.variant.pair_id = parse_index(cols[0], path, line_no, "id");
    r.variant.ordinal = parse_index(cols[1], path, line_no, "variant");
    const auto words = split_spaces(cols[2]);
    const auto labels = split_spaces(cols[4]);
    if (words.size() != labels.size()) {
      throw ParseError(path, line_no, "cm_source has " + std::to_string(words.size()) +
                                          " tokens but lang_tags has " + std::to_string(labels.size()));
    }
    for (std::size_t i = 0; i < words.size(); ++i) {
      TaggedToken t;
      t.surface = words[i];
      if (labels[i] == "O") {
        t.lang = LangTag::neutral();
      } else if (labels[i] == matrix.code) {
        t.lang = matrix;
        t.transliterated = ascii_letters_only(t.surface);
      } else if (labels[i] == embedded.code) {
        t.lang = embedded;
        r.variant.switched.push_back(i);
      } else {
        throw ParseError(path, line_no, "unknown language tag '" + labels[i] + "'");
      }
      r.variant.cm_tokens.push_back(std::move(t));
    }
    r.variant.cmi = parse_double(cols[5], path, line_no, "cmi");
    r.variant.spf = parse_double(cols[6], path, line_no, "spf");
    if (!cols[7].empty()) r.variant.ppl = parse_double(cols[7], path, line_no, "ppl");
    r.target = normalize_and_tokenize(cols[3], embedded, line_no);
    r.target.id = r.variant.pair_id;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace cmix
