#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cmix/error.hpp"
#include "cmix/metrics.hpp"
#include "test_util.hpp"

namespace cmix {
namespace {

const LangTag kHi = LangTag::matrix("hi");
const LangTag kEn = LangTag::embedded("en");

std::vector<TaggedToken> tokens(const std::string& spec) {
  // "word/hi word/en ./O"
  std::vector<TaggedToken> out;
  std::istringstream in(spec);
  std::string item;
  while (in >> item) {
    const auto slash = item.rfind('/');
    const std::string tag = item.substr(slash + 1);
    TaggedToken t;
    t.surface = item.substr(0, slash);
    t.lang = tag == "O" ? LangTag::neutral() : tag == "hi" ? kHi : tag == "en" ? kEn : LangTag{};
    out.push_back(t);
  }
  return out;
}

Sentence words(const std::string& text) { return normalize_and_tokenize(text, kEn); }

TEST(Cmi, WorkedExample) {
  EXPECT_DOUBLE_EQ(cmi(tokens("Yeh/hi security/en certificate/en trusted/en nahi/hi hai/hi ./O")), 50.0);
}

TEST(Cmi, MonolingualAndNeutralOnly) {
  EXPECT_DOUBLE_EQ(cmi(tokens("a/hi b/hi c/hi ./O")), 0.0);
  EXPECT_DOUBLE_EQ(cmi(tokens("./O ,/O")), 0.0);
  EXPECT_DOUBLE_EQ(cmi(std::vector<TaggedToken>{}), 0.0);
}

TEST(Cmi, UntaggedTokenIsAnError) { EXPECT_THROW(cmi(tokens("a/hi b/?")), Error); }

TEST(Cmi, StaysInRange) {
  EXPECT_DOUBLE_EQ(cmi(tokens("a/hi b/en")), 50.0);
  EXPECT_NEAR(cmi(tokens("a/hi b/en c/hi")), 100.0 / 3.0, 1e-12);
}

TEST(Spf, WorkedExample) {
  EXPECT_DOUBLE_EQ(spf(tokens("Yeh/hi security/en certificate/en trusted/en nahi/hi hai/hi ./O")), 0.4);
}

TEST(Spf, NeutralTokensAreTransparent) {
  EXPECT_DOUBLE_EQ(spf(tokens("a/hi ,/O b/en")), 1.0);
  EXPECT_DOUBLE_EQ(spf(tokens("a/hi ./O")), 0.0);
  EXPECT_DOUBLE_EQ(spf(tokens("a/hi b/hi c/hi")), 0.0);
  EXPECT_THROW(spf(tokens("a/hi b/x")), Error);
}

TEST(Bleu, IdentityIsHundred) {
  const std::vector<Sentence> s{words("the cat sat on the mat ."), words("a quick brown fox jumps")};
  const auto r = bleu(s, s);
  EXPECT_DOUBLE_EQ(r.score, 100.0);
  EXPECT_DOUBLE_EQ(r.brevity_penalty, 1.0);
}

TEST(Bleu, ClippedUnigramPrecision) {
  const auto r = bleu({words("the the the the the the the")}, {words("the cat is on the mat")});
  EXPECT_DOUBLE_EQ(r.precisions[0], 2.0 / 7.0);
  EXPECT_DOUBLE_EQ(r.score, 0.0);
}

TEST(Bleu, HandComputedPrecisions) {
  // p = 4/5, 3/4, 2/3, 1/2 and equal lengths: BLEU = (0.2)^(1/4).
  const auto r = bleu({words("a b c d e")}, {words("a b c d f")});
  EXPECT_DOUBLE_EQ(r.precisions[0], 0.8);
  EXPECT_DOUBLE_EQ(r.precisions[1], 0.75);
  EXPECT_NEAR(r.precisions[2], 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(r.precisions[3], 0.5);
  EXPECT_NEAR(r.score, 100.0 * std::pow(0.2, 0.25), 1e-9);
  EXPECT_EQ(r.summary(), "BLEU = 66.87 (80.0/75.0/66.7/50.0, BP=1.000)");
}

TEST(Bleu, BrevityPenalty) {
  const auto r = bleu({words("a b c d")}, {words("a b c d e f")});
  EXPECT_NEAR(r.brevity_penalty, std::exp(-0.5), 1e-12);
  EXPECT_NEAR(r.score, 100.0 * std::exp(-0.5), 1e-9);
  EXPECT_EQ(r.hyp_length, 4u);
  EXPECT_EQ(r.ref_length, 6u);
}

TEST(Bleu, CorpusLevelPoolsCounts) {
  const auto r = bleu({words("a b c d e"), words("x y z w")}, {words("a b c d f"), words("x y z w")});
  EXPECT_DOUBLE_EQ(r.precisions[0], 8.0 / 9.0);
  EXPECT_DOUBLE_EQ(r.precisions[3], 2.0 / 3.0);
}

TEST(Bleu, SizeMismatchIsAnError) { EXPECT_THROW(bleu({words("a")}, {}), Error); }

CMRecord record(const std::string& spec, const std::string& target) {
  CMRecord r;
  r.variant.cm_tokens = tokens(spec);
  r.variant.cmi = cmi(r.variant.cm_tokens);
  r.variant.spf = spf(r.variant.cm_tokens);
  r.target = words(target);
  return r;
}

TEST(CorpusStats, HandComputed) {
  const std::vector<CMRecord> corpus{
      record("Yeh/hi security/en certificate/en trusted/en nahi/hi hai/hi ./O",
             "This security certificate is not trusted ."),
      record("a/hi b/en", "a b"),
      record("a/hi b/en", "a b"),
  };
  const auto s = corpus_stats(corpus);
  EXPECT_EQ(s.sentences, 3u);
  EXPECT_EQ(s.unique_sentences, 2u);
  EXPECT_NEAR(s.mean_cmi, 50.0, 1e-12);
  EXPECT_NEAR(s.mean_spf, (0.4 + 1.0 + 1.0) / 3.0, 1e-12);
  EXPECT_EQ(s.matrix_tokens, 5u);
  EXPECT_EQ(s.embedded_tokens, 5u);
  EXPECT_EQ(s.target_tokens, 11u);
  EXPECT_NEAR(s.token_mean, 11.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(s.token_median, 2.0);
  EXPECT_EQ(s.token_max, 7u);
  EXPECT_EQ(s.char_max, 43u);
  EXPECT_DOUBLE_EQ(s.char_median, 3.0);
  EXPECT_LE(s.token_median, static_cast<double>(s.token_max));
}

TEST(CorpusStats, EvenCountMedianAveragesMiddles) {
  const auto s = corpus_stats({record("a/hi", "x"), record("a/hi b/en c/hi", "x")});
  EXPECT_DOUBLE_EQ(s.token_median, 2.0);
}

TEST(CorpusStats, ReportHasHeaderRowAndSummary) {
  std::ostringstream out;
  write_stats_report(out, corpus_stats({record("a/hi b/en", "a b")}), "demo");
  const std::string text = out.str();
  EXPECT_EQ(text.rfind("corpus\tsent\tunique\tcmi\tspf_pct", 0), 0u);
  EXPECT_NE(text.find("demo\t1\t1\t50.00\t100.00"), std::string::npos);
  EXPECT_NE(text.find("# demo"), std::string::npos);
}

}  // namespace
}  // namespace cmix
