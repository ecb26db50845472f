#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "cmix/corpus.hpp"
#include "cmix/error.hpp"
#include "cmix/noise.hpp"

namespace cmix {
namespace {

// Scans seeds until `f(rng)` yields `want`; the example output is reachable
// when some seed produces it.
template <typename F>
bool reachable(F f, const std::string& want, int seeds = 5000) {
  for (int s = 0; s < seeds; ++s) {
    Rng rng(static_cast<std::uint64_t>(s));
    const auto out = f(rng);
    if (out && *out == want) return true;
  }
  return false;
}

std::string sorted(std::string s) {
  std::sort(s.begin(), s.end());
  return s;
}

TEST(Perturb, SwitchExamples) {
  EXPECT_EQ(perturb_switch("transfer", 3), "trasnfer");
  EXPECT_EQ(perturb_switch("abcd", 1), "acbd");
  EXPECT_FALSE(perturb_switch("abcd", 2));  // would touch the last character
  EXPECT_FALSE(perturb_switch("abcd", 0));  // would touch the first
  EXPECT_FALSE(perturb_switch("abc", 1));
}

TEST(Perturb, OmissionExamples) {
  EXPECT_TRUE(reachable([](Rng& r) { return perturb_omission("amazing", r); }, "amzng"));
  Rng rng(1);
  for (int k = 0; k < 200; ++k) {
    const auto out = perturb_omission("bcdf", rng);
    ASSERT_TRUE(out);
    EXPECT_EQ(out->size(), 3u);
    EXPECT_EQ(out->front(), 'b');
    EXPECT_EQ(out->back(), 'f');
  }
  EXPECT_FALSE(perturb_omission("abc", rng));
}

TEST(Perturb, OmissionNeverTouchesEnds) {
  Rng rng(2);
  for (int k = 0; k < 500; ++k) {
    const auto out = perturb_omission("aeiouae", rng);
    ASSERT_TRUE(out);
    EXPECT_LT(out->size(), 7u);
    EXPECT_EQ(out->front(), 'a');
    EXPECT_EQ(out->back(), 'e');
  }
}

TEST(Perturb, TypoExamples) {
  EXPECT_TRUE(reachable([](Rng& r) { return perturb_typo("mobile", 2, r); }, "movile"));
  EXPECT_TRUE(reachable([](Rng& r) { return perturb_typo("cat", 0, r); }, "xat"));
  EXPECT_TRUE(reachable([](Rng& r) { return perturb_typo("Cat", 0, r); }, "Xat"));
  Rng rng(3);
  EXPECT_FALSE(perturb_typo("c4t", 1, rng));
  EXPECT_FALSE(perturb_typo("ab", 0, rng));
}

TEST(Perturb, TypoReplacesWithANeighbor) {
  const auto& keys = KeyboardAdjacency::qwerty();
  Rng rng(4);
  for (int k = 0; k < 500; ++k) {
    const auto out = perturb_typo("keyboard", 3, rng);
    ASSERT_TRUE(out);
    ASSERT_EQ(out->size(), 8u);
    for (std::size_t i = 0; i < 8; ++i) {
      if (i == 3) EXPECT_NE(keys.neighbors('b').find((*out)[i]), std::string_view::npos);
      else EXPECT_EQ((*out)[i], std::string("keyboard")[i]);
    }
  }
}

TEST(Perturb, ShuffleExamples) {
  EXPECT_TRUE(reachable([](Rng& r) { return perturb_shuffle("laptop", r); }, "loptap"));
  Rng rng(5);
  EXPECT_FALSE(perturb_shuffle("aaaa", rng));
  EXPECT_FALSE(perturb_shuffle("abc", rng));
  for (int k = 0; k < 500; ++k) {
    const auto out = perturb_shuffle("keyboard", rng);
    ASSERT_TRUE(out);
    EXPECT_NE(*out, "keyboard");
    EXPECT_EQ(out->front(), 'k');
    EXPECT_EQ(out->back(), 'd');
    EXPECT_EQ(sorted(*out), sorted("keyboard"));
  }
}

TEST(Perturb, ShuffleCoversAllInteriorPermutations) {
  Rng rng(6);
  std::set<std::string> seen;
  for (int k = 0; k < 2000; ++k) seen.insert(*perturb_shuffle("abcdef", rng));
  EXPECT_EQ(seen.size(), 23u);  // 4! minus the identity
}

TEST(Perturb, CountsCodePointsNotBytes) {
  EXPECT_EQ(perturb_switch("नमस्ते", 1), "नसम्ते");
}

TEST(Keyboard, TableIsSymmetricAndComplete) {
  const auto& keys = KeyboardAdjacency::qwerty();
  for (char c = 'a'; c <= 'z'; ++c) {
    ASSERT_FALSE(keys.neighbors(c).empty()) << c;
    for (char n : keys.neighbors(c)) EXPECT_NE(keys.neighbors(n).find(c), std::string_view::npos) << c << n;
  }
  EXPECT_TRUE(keys.neighbors('7').empty());
  EXPECT_THROW(KeyboardAdjacency::parse("a\tS\n", "t"), ParseError);
}

TEST(NoiseSpec, ParseRates) {
  const auto s = NoiseSpec::parse_rates("switch=0.30,omission=0.12,typo=0.12,shuffle=0.06", 9);
  EXPECT_DOUBLE_EQ(s.rate(NoiseType::Switch), 0.30);
  EXPECT_DOUBLE_EQ(s.rate(NoiseType::Shuffle), 0.06);
  EXPECT_NEAR(s.total_rate(), 0.60, 1e-12);
  EXPECT_EQ(s.seed, 9u);
  const auto partial = NoiseSpec::parse_rates("typo=0.5");
  EXPECT_DOUBLE_EQ(partial.rate(NoiseType::Switch), 0.0);
  EXPECT_DOUBLE_EQ(partial.rate(NoiseType::Typo), 0.5);
  EXPECT_THROW(NoiseSpec::parse_rates("switch=0.1,switch=0.2"), Error);
  EXPECT_THROW(NoiseSpec::parse_rates("swap=0.1"), Error);
  EXPECT_THROW(NoiseSpec::parse_rates("switch=abc"), Error);
  EXPECT_THROW(NoiseSpec::parse_rates("switch=-0.1"), Error);
}

TEST(NoiseSpec, SumAboveOneIsRejected) {
  try {
    NoiseSpec::parse_rates("switch=0.6,omission=0.3,typo=0.2,shuffle=0.1");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("1.2"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(NoiseSpec::parse_rates("switch=0.7,omission=0.3"));
  NoiseSpec s;
  s.min_len_switch = 3;
  EXPECT_THROW(s.validate(), Error);
}

TaggedToken token(const std::string& surface, Lang kind, bool translit) {
  TaggedToken t;
  t.surface = surface;
  t.lang = kind == Lang::Matrix ? LangTag::matrix("hi")
           : kind == Lang::Embedded ? LangTag::embedded("en")
                                    : LangTag::neutral();
  t.transliterated = translit;
  return t;
}

CMVariant sample_variant(std::size_t id) {
  CMVariant v;
  v.pair_id = id;
  v.cm_tokens = {token("Yehhh", Lang::Matrix, true), token("security", Lang::Embedded, false),
                 token("certificate", Lang::Embedded, false), token("trusted", Lang::Embedded, false),
                 token("nahin", Lang::Matrix, true), token("hai", Lang::Matrix, true),
                 token("सुरक्षा", Lang::Matrix, false), token(".", Lang::Neutral, false)};
  return v;
}

TEST(InjectNoise, ZeroRatesAreIdentity) {
  NoiseSpec spec = NoiseSpec::parse_rates("switch=0");
  NoiseReport report;
  for (std::size_t id = 0; id < 100; ++id) {
    CMVariant v = sample_variant(id);
    inject_noise(v, spec, report);
    EXPECT_EQ(v.cm_tokens, sample_variant(id).cm_tokens);
  }
  EXPECT_EQ(report.perturbed(), 0u);
  EXPECT_EQ(report.eligible, 300u);
}

TEST(InjectNoise, OnlyEligibleTokensChange) {
  NoiseSpec spec = NoiseSpec::parse_rates("shuffle=1", 3);
  NoiseReport report;
  for (std::size_t id = 0; id < 200; ++id) {
    CMVariant v = sample_variant(id);
    const CMVariant before = v;
    inject_noise(v, spec, report);
    for (std::size_t k = 0; k < v.cm_tokens.size(); ++k) {
      if (k == 0 || k == 4) continue;
      EXPECT_EQ(v.cm_tokens[k], before.cm_tokens[k]) << k;
    }
    EXPECT_NE(v.cm_tokens[4].surface, "nahin");
    EXPECT_EQ(sorted(v.cm_tokens[4].surface), sorted("nahin"));
  }
  EXPECT_EQ(report.tokens, 1600u);
  EXPECT_EQ(report.eligible, 600u);
  // "hai" is too short to shuffle, so every draw on it falls back.
  EXPECT_EQ(report.applied[3] + report.fallback[3], 600u);
  EXPECT_GE(report.fallback[3], 200u);
}

TEST(InjectNoise, AllLatinEligibilityIncludesEmbeddedWords) {
  EXPECT_TRUE(noise_eligible(token("security", Lang::Embedded, false), NoiseEligibility::AllLatin));
  EXPECT_FALSE(noise_eligible(token("security", Lang::Embedded, false), NoiseEligibility::TransliteratedMatrix));
  EXPECT_FALSE(noise_eligible(token("सुरक्षा", Lang::Matrix, false), NoiseEligibility::AllLatin));
  EXPECT_FALSE(noise_eligible(token("abc", Lang::Neutral, false), NoiseEligibility::AllLatin));
  EXPECT_FALSE(noise_eligible(token("", Lang::Matrix, true), NoiseEligibility::TransliteratedMatrix));
}

TEST(InjectNoise, DeterministicPerSeed) {
  const NoiseSpec a = NoiseSpec::parse_rates("switch=0.3,omission=0.12,typo=0.12,shuffle=0.06", 11);
  const NoiseSpec b = NoiseSpec::parse_rates("switch=0.3,omission=0.12,typo=0.12,shuffle=0.06", 12);
  std::vector<CMRecord> x, y, z;
  for (std::size_t id = 0; id < 300; ++id) {
    CMRecord r;
    r.variant = sample_variant(id);
    x.push_back(r);
  }
  y = x;
  z = x;
  const auto rx = inject_noise(x, a);
  const auto ry = inject_noise(y, a);
  inject_noise(z, b);
  bool differs = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i].variant.cm_tokens, y[i].variant.cm_tokens);
    differs = differs || x[i].variant.cm_tokens != z[i].variant.cm_tokens;
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(rx.applied, ry.applied);
}

TEST(InjectNoise, ReportFormat) {
  NoiseReport r;
  r.tokens = 10;
  r.eligible = 4;
  r.drawn = {2, 1, 0, 0};
  r.applied = {1, 1, 0, 0};
  r.fallback = {1, 0, 0, 0};
  std::ostringstream out;
  r.write(out, NoiseSpec{});
  EXPECT_EQ(out.str(),
            "type\trate\tdrawn\tapplied\tfallback\tapplied_fraction\n"
            "switch\t0.3000\t2\t1\t1\t0.250000\n"
            "omission\t0.1200\t1\t1\t0\t0.250000\n"
            "typo\t0.1200\t0\t0\t0\t0.000000\n"
            "shuffle\t0.0600\t0\t0\t0\t0.000000\n"
            "# tokens=10 eligible=4 perturbed=2 perturbed_fraction=0.500000\n");
}

}  // namespace
}  // namespace cmix
