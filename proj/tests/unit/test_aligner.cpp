#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "cmix/aligner.hpp"
#include "cmix/error.hpp"
#include "cmix/inclusion.hpp"
#include "oracle_em.hpp"
#include "test_util.hpp"

namespace cmix {
namespace {

using testing::make_pair;
using testing::OracleEm;
using testing::toy_corpus;


TEST(Ibm1, ToyCorpusMatchesBruteForceOracle) {
  const auto pairs = toy_corpus();
  TrainingTrace trace;
  const auto table = train_ibm1(pairs, 10, 1, &trace);
  const OracleEm oracle(pairs, 10, std::nullopt);

  ASSERT_EQ(trace.log_likelihood.size(), oracle.lls.size());
  for (std::size_t k = 0; k < oracle.lls.size(); ++k)
    EXPECT_NEAR(trace.log_likelihood[k], oracle.lls[k], 1e-9) << "iteration " << k;
  for (const auto& [fe, p] : oracle.t) {
    const double got = fe.first == "<null>" ? table.null_prob(fe.second) : table.prob(fe.second, fe.first);
    EXPECT_NEAR(got, p, 1e-9) << fe.first << " -> " << fe.second;
  }
}

TEST(Ibm1, ToyCorpusFrozenValues) {
  // Computed independently with a dictionary-based EM script.
  TrainingTrace trace;
  const auto table = train_ibm1(toy_corpus(), 10, 1, &trace);
  EXPECT_NEAR(table.prob("the", "das"), 0.976907730908029, 1e-12);
  EXPECT_GE(table.prob("the", "das"), 0.9);
  EXPECT_NEAR(trace.log_likelihood.front(), -6.445526, 1e-6);
  EXPECT_NEAR(trace.log_likelihood.back(), -5.010976, 1e-6);
}

TEST(Ibm1, LogLikelihoodNeverDecreases) {
  TrainingTrace trace;
  train_ibm1(toy_corpus(), 10, 1, &trace);
  for (std::size_t k = 1; k < trace.log_likelihood.size(); ++k)
    EXPECT_GE(trace.log_likelihood[k], trace.log_likelihood[k - 1] - 1e-12);
}

TEST(Ibm1, TraceAgreesWithStandaloneLikelihood) {
  const auto pairs = toy_corpus();
  TrainingTrace trace;
  const auto table = train_ibm1(pairs, 4, 1, &trace);
  EXPECT_NEAR(log_likelihood(table, pairs), trace.log_likelihood.back(), 1e-12);
}

TEST(Ibm1, SinglePairGrowsTowardOne) {
  const std::vector<ParallelPair> pairs{make_pair(0, "haus", "house")};
  double last = 0.0;
  for (int iters = 1; iters <= 5; ++iters) {
    const double p = train_ibm1(pairs, iters).prob("house", "haus");
    EXPECT_GE(p, 0.5);
    EXPECT_GE(p, last);
    last = p;
  }
}

TEST(Ibm1, RowsSumToOne) {
  const auto pairs = toy_corpus();
  const auto table = train_ibm1(pairs, 7);
  for (std::uint32_t f = 0; f < table.rows(); ++f) EXPECT_NEAR(table.row_sum(f), 1.0, 1e-6);
}

TEST(Ibm1, RejectsBadInput) {
  EXPECT_THROW(train_ibm1({}, 5), Error);
  EXPECT_THROW(train_ibm1(toy_corpus(), 0), Error);
  EXPECT_THROW(train_ibm1({make_pair(0, "", "x")}, 5), Error);
}

TEST(Ibm1, RepeatedTrainingIsBitwiseIdentical) {
  const auto pairs = toy_corpus();
  std::ostringstream a, b;
  train_ibm1(pairs, 6).dump(a);
  train_ibm1(pairs, 6).dump(b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Ibm1, ThreadedEStepIsDeterministic) {
  std::vector<ParallelPair> pairs;
  for (std::size_t k = 0; k < 60; ++k) {
    const auto base = toy_corpus();
    auto p = base[k % 3];
    p.id = k;
    pairs.push_back(p);
  }
  std::ostringstream a, b;
  const auto t4 = train_ibm1(pairs, 5, 4);
  t4.dump(a);
  train_ibm1(pairs, 5, 4).dump(b);
  EXPECT_EQ(a.str(), b.str());
  const auto t1 = train_ibm1(pairs, 5, 1);
  EXPECT_NEAR(t4.prob("the", "das"), t1.prob("the", "das"), 1e-12);
}

TEST(Diagonal, ToyCorpusMatchesBruteForceOracle) {
  const auto pairs = toy_corpus();
  TrainingTrace trace;
  const auto table = train_diagonal(pairs, 10, 4.0, 1, &trace);
  const OracleEm oracle(pairs, 10, 4.0);
  ASSERT_EQ(trace.log_likelihood.size(), oracle.lls.size());
  for (std::size_t k = 0; k < oracle.lls.size(); ++k) EXPECT_NEAR(trace.log_likelihood[k], oracle.lls[k], 1e-9);
  EXPECT_NEAR(table.prob("the", "das"), oracle.t.at({"das", "the"}), 1e-9);
  EXPECT_GE(table.prob("the", "das"), 0.9);
}

TEST(Diagonal, VanishingTensionRecoversModelOne) {
  const auto pairs = toy_corpus();
  const auto ibm1 = train_ibm1(pairs, 8);
  const auto diag = train_diagonal(pairs, 8, 1e-13);
  for (const char* f : {"das", "haus", "buch", "ein"})
    for (const char* e : {"the", "house", "book", "a"}) EXPECT_NEAR(diag.prob(e, f), ibm1.prob(e, f), 1e-9);
}

TEST(Diagonal, RejectsNonPositiveTension) {
  EXPECT_THROW(train_diagonal(toy_corpus(), 5, -1.0), Error);
  EXPECT_THROW(train_diagonal(toy_corpus(), 5, 0.0), Error);
}

TEST(Diagonal, PriorIsADistributionOverPositions) {
  for (std::size_t m : {1, 3, 7})
    for (std::size_t n : {1, 4, 9})
      for (std::size_t j = 1; j <= n; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i <= m; ++i) sum += alignment_prior(i, j, m, n, 4.0);
        EXPECT_NEAR(sum, 1.0, 1e-12);
      }
}

TEST(Viterbi, ToyPairLinksDiagonal) {
  const auto table = train_ibm1(toy_corpus(), 10);
  const auto links = viterbi_align(table, make_pair(0, "das haus", "the house"));
  EXPECT_EQ(links, (AlignmentLinks{{0, 0}, {1, 1}}));
}

TEST(Viterbi, OutOfVocabularySourceGivesNoLinks) {
  const auto table = train_ibm1(toy_corpus(), 10);
  EXPECT_TRUE(viterbi_align(table, make_pair(9, "zug bahn", "the house")).empty());
}

TEST(Viterbi, TieGoesToSmallerSourceIndex) {
  const std::vector<ParallelPair> pairs{make_pair(0, "a b", "x"), make_pair(1, "c", "y")};
  const auto table = train_ibm1(pairs, 3);
  ASSERT_EQ(table.prob("x", "a"), table.prob("x", "b"));
  EXPECT_EQ(viterbi_align(table, pairs[0]), (AlignmentLinks{{0, 0}}));
}

TEST(Symmetrize, IsIntersection) {
  const AlignmentLinks f{{0, 0}, {1, 1}};
  EXPECT_EQ(symmetrize(f, AlignmentLinks{{0, 0}}), (AlignmentLinks{{0, 0}}));
  EXPECT_EQ(symmetrize(f, f), f);
  EXPECT_TRUE(symmetrize(f, AlignmentLinks{{2, 2}}).empty());
}

TEST(Symmetrize, ResultIsSubsetOfBothInputs) {
  const AlignmentLinks f{{0, 0}, {1, 2}, {2, 1}, {3, 3}};
  const AlignmentLinks b{{0, 0}, {1, 1}, {2, 1}, {3, 4}};
  const auto s = symmetrize(f, b);
  EXPECT_TRUE(s.subset_of(f));
  EXPECT_TRUE(s.subset_of(b));
}

TEST(AlignSymmetric, FixtureRecoversWorkedExampleLinks) {
  const auto src = load_tagged(testing::fixture("source.tagged").string(), LangTag::matrix("hi"));
  const auto tgt = load_plain(testing::fixture("target.en").string(), LangTag::embedded("en"));
  const auto pairs = zip_pairs(src, tgt);
  TranslationTable fwd;
  const auto links = align_symmetric(pairs, AlignerSettings{}, &fwd);
  ASSERT_EQ(links.size(), pairs.size());
  EXPECT_TRUE(links[0].contains({1, 1}));
  EXPECT_TRUE(links[0].contains({2, 2}));
  EXPECT_TRUE(links[0].contains({3, 5}));
  for (std::uint32_t f = 0; f < fwd.rows(); ++f) EXPECT_NEAR(fwd.row_sum(f), 1.0, 1e-6);
}

TEST(AlignSymmetric, SkipsPairsWithAnEmptySide) {
  auto pairs = toy_corpus();
  pairs.push_back(make_pair(3, "", "the"));
  const auto links = align_symmetric(pairs, AlignerSettings{});
  ASSERT_EQ(links.size(), 4u);
  EXPECT_TRUE(links[3].empty());
}

TEST(Pharaoh, RoundTrip) {
  const AlignmentLinks links{{0, 0}, {2, 1}, {1, 3}};
  EXPECT_EQ(to_pharaoh(links), "0-0 1-3 2-1");
  EXPECT_EQ(parse_pharaoh(to_pharaoh(links)), links);
  EXPECT_TRUE(parse_pharaoh("").empty());
  EXPECT_THROW(parse_pharaoh("0-"), ParseError);
  EXPECT_THROW(parse_pharaoh("a-1"), ParseError);
}

ParallelPair worked_example() {
  ParallelPair p;
  p.source = testing::tagged("यह/DEM सुरक्षा/NN प्रमाणपत्र/NN विश्वशनीय/JJ नहीं/NEG है/VAUX ।/SYM");
  p.target = normalize_and_tokenize("This security certificate is not trusted .", LangTag::embedded("en"));
  return p;
}

TEST(SubstitutionTable, KeepsOneToOneIncludedWords) {
  const auto pair = worked_example();
  const AlignmentLinks links{{0, 0}, {1, 1}, {2, 2}, {3, 5}, {4, 4}, {5, 3}, {6, 6}};
  const auto table = extract_substitution_table(pair, links, InclusionList::defaults());
  ASSERT_EQ(table.entries.size(), 3u);
  EXPECT_EQ(table.entries.at(1).target, "security");
  EXPECT_EQ(table.entries.at(1).source, "सुरक्षा");
  EXPECT_EQ(table.entries.at(2).target, "certificate");
  EXPECT_EQ(table.entries.at(3).target, "trusted");
  EXPECT_EQ(table.entries.at(3).pos, "JJ");
}

TEST(SubstitutionTable, DropsOneToManyAndManyToOne) {
  const auto pair = worked_example();
  const auto one_to_many = extract_substitution_table(pair, {{1, 1}, {1, 2}, {2, 3}}, InclusionList::defaults());
  EXPECT_FALSE(one_to_many.contains(1));
  const auto many_to_one = extract_substitution_table(pair, {{1, 1}, {2, 1}}, InclusionList::defaults());
  EXPECT_TRUE(many_to_one.entries.empty());
}

TEST(SubstitutionTable, ExcludesVerbs) {
  ParallelPair p;
  p.source = testing::tagged("वह/PRP खेल/VM रहा/VAUX है/VAUX");
  p.target = normalize_and_tokenize("he is playing", LangTag::embedded("en"));
  const auto table = extract_substitution_table(p, {{1, 2}}, InclusionList::defaults());
  EXPECT_TRUE(table.entries.empty());
}

TEST(SubstitutionTable, MissingPosIsAnError) {
  auto pair = worked_example();
  pair.source.tokens[2].pos.reset();
  EXPECT_THROW(extract_substitution_table(pair, {{1, 1}}, InclusionList::defaults()), Error);
}

TEST(SubstitutionTable, EntriesAreBijective) {
  const auto src = load_tagged(testing::fixture("source.tagged").string(), LangTag::matrix("hi"));
  const auto tgt = load_plain(testing::fixture("target.en").string(), LangTag::embedded("en"));
  const auto pairs = zip_pairs(src, tgt);
  const auto links = align_symmetric(pairs, AlignerSettings{});
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto table = extract_substitution_table(pairs[k], links[k], InclusionList::defaults());
    std::set<std::size_t> used_targets;
    for (const auto& [i, entry] : table.entries) {
      std::vector<std::size_t> js;
      for (const auto& l : links[k])
        if (l.src == i) js.push_back(l.tgt);
      ASSERT_EQ(js.size(), 1u);
      std::size_t sharing = 0;
      for (const auto& l : links[k]) sharing += l.tgt == js[0];
      EXPECT_EQ(sharing, 1u);
      EXPECT_TRUE(used_targets.insert(js[0]).second);
      EXPECT_EQ(entry.target, pairs[k].target.tokens[js[0]].surface);
      EXPECT_TRUE(InclusionList::defaults().contains(entry.pos));
    }
  }
}

TEST(SubstitutionTable, JsonlRoundTrip) {
  const auto pair = worked_example();
  auto table = extract_substitution_table(pair, {{1, 1}, {2, 2}, {3, 5}}, InclusionList::defaults());
  table.id = 17;
  const std::string line = to_jsonl(table);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_EQ(parse_substitution_jsonl(line), table);
  EXPECT_THROW(parse_substitution_jsonl("{\"id\": 1}"), ParseError);
}

}  // namespace
}  // namespace cmix
