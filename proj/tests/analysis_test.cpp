// Copyright 2026 The Concept Forge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "concept_forge/analysis.hpp"
#include "concept_forge/error.hpp"
#include "test_util.hpp"

namespace concept_forge {
namespace {

using testing::make_scene;

std::vector<ConceptVector> all_vectors(const BlockLayout& layout) {
  std::vector<ConceptVector> out;
  std::vector<std::size_t> choice(layout.block_count(), 0);
  while (true) {
    out.push_back(ConceptVector::from_choices(layout, choice));
    std::size_t b = 0;
    while (b < choice.size() && ++choice[b] == layout.sizes[b]) choice[b++] = 0;
    if (b == choice.size()) break;
  }
  return out;
}

class AnalysisTest : public ::testing::Test {
 protected:
  Lexicon lex = build_lexicon(OntologyConfig::clevr_default());
  BlockLayout layout = BlockLayout::from_lexicon(lex);

  ConceptVector vec(std::vector<std::string> words) const {
    Scene s = make_scene(lex, 0, {{words, {0.5, 0.5}}});
    return concept_vector(s.objects[0], lex);
  }
};

TEST_F(AnalysisTest, LayoutOfDefaultVocabulary) {
  EXPECT_EQ(layout.sizes, (std::vector<std::size_t>{8, 3, 2, 2}));
  EXPECT_EQ(layout.width(), 15u);
  EXPECT_EQ(layout.offset(2), 11u);
  EXPECT_EQ(all_vectors(layout).size(), 96u);
}

TEST_F(AnalysisTest, VectorsMustBeOneHot) {
  std::vector<std::uint8_t> bits(15, 0);
  EXPECT_THROW(ConceptVector(layout, bits), ShapeError);
  EXPECT_THROW(ConceptVector(layout, std::vector<std::uint8_t>(14, 0)), ShapeError);
  std::vector<std::size_t> bad{8, 0, 0, 0};
  EXPECT_THROW(ConceptVector::from_choices(layout, bad), ShapeError);
}

TEST_F(AnalysisTest, DistanceExamples) {
  auto a = vec({"red", "cube", "large", "metal"});
  EXPECT_EQ(semantic_distance(a, a), 0.0);
  EXPECT_EQ(semantic_distance(a, vec({"blue", "cube", "large", "metal"})), 1.0);
  EXPECT_EQ(semantic_distance(a, vec({"blue", "sphere", "small", "rubber"})), 4.0);
  ConceptVector other(BlockLayout{{2, 2}}, {1, 0, 0, 1});
  EXPECT_THROW(semantic_distance(a, other), ShapeError);
}

TEST_F(AnalysisTest, MinusAndPlus) {
  auto red_large = vec({"red", "cube", "large", "metal"});
  auto blue_large = vec({"blue", "cube", "large", "metal"});
  Template t = concept_minus(red_large, blue_large);
  EXPECT_FALSE(t.blank(0));
  EXPECT_TRUE(t.blank(1));
  EXPECT_TRUE(t.blank(2));
  EXPECT_TRUE(t.blank(3));
  EXPECT_TRUE(concept_minus(red_large, red_large).all_blank());
  auto disjoint = vec({"blue", "sphere", "small", "rubber"});
  EXPECT_EQ(concept_minus(red_large, disjoint).bits(), red_large.bits());
  EXPECT_EQ(concept_plus(concept_minus(red_large, red_large), disjoint), disjoint);
  EXPECT_EQ(concept_plus(t, vec({"green", "ball", "small", "matte"})),
            vec({"red", "ball", "small", "matte"}));
}

TEST_F(AnalysisTest, ExhaustiveRoundTripAndMetricAxioms) {
  auto all = all_vectors(layout);
  for (const auto& a : all) {
    EXPECT_EQ(semantic_distance(a, a), 0.0);
    for (const auto& b : all) {
      ASSERT_EQ(concept_plus(concept_minus(a, b), b), a);
      double d = semantic_distance(a, b);
      ASSERT_EQ(d, semantic_distance(b, a));
      ASSERT_EQ(d == 0.0, a == b);
      std::size_t differing = 0;
      for (std::size_t blk = 0; blk < layout.block_count(); ++blk) {
        differing += a.choice(blk) != b.choice(blk);
      }
      ASSERT_EQ(d, static_cast<double>(differing));
    }
  }
  // triangle inequality over a stride of triples
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = 0; j < all.size(); ++j) {
      for (std::size_t k = 0; k < all.size(); k += 5) {
        ASSERT_LE(semantic_distance(all[i], all[k]),
                  semantic_distance(all[i], all[j]) + semantic_distance(all[j], all[k]));
      }
    }
  }
}

// "large red metal cube" minus "large red metal sphere" plus "small blue
// rubber sphere" should retrieve a small blue rubber cube.
TEST_F(AnalysisTest, AnalogyRetrievesConstructedTarget) {
  std::vector<ConceptVector> pool = {
      vec({"blue", "sphere", "small", "rubber"}), vec({"blue", "cube", "large", "rubber"}),
      vec({"blue", "cube", "small", "rubber"}), vec({"red", "cube", "small", "rubber"}),
      vec({"blue", "cube", "small", "rubber"})};
  auto k0 = vec({"red", "cube", "large", "metal"});
  auto k_sub = vec({"red", "sphere", "large", "metal"});
  auto k_add = vec({"blue", "sphere", "small", "rubber"});
  AnalogyResult r = analogy_retrieve(pool, k0, k_sub, k_add);
  EXPECT_EQ(r.index, 2u);
  EXPECT_EQ(r.distance, 0.0);
  std::vector<ConceptVector> without = {k_sub, pool[1]};
  r = analogy_retrieve(without, k0, k_sub, k_add);
  EXPECT_EQ(r.index, 1u);
  EXPECT_EQ(r.distance, 1.0);
  EXPECT_THROW(analogy_retrieve(std::span<const ConceptVector>{}, k0, k_sub, k_add),
               ArgumentError);
}

TEST_F(AnalysisTest, AnalogyIsPermutationEquivariant) {
  auto all = all_vectors(layout);
  std::vector<ConceptVector> pool(all.begin(), all.begin() + 40);
  auto k0 = all[50];
  auto k_sub = all[70];
  auto k_add = all[3];
  ConceptVector target = concept_plus(concept_minus(k0, k_sub), k_add);
  double best = 1e9;
  for (const auto& p : pool) best = std::min(best, semantic_distance(p, target));
  std::size_t first = 0;
  std::size_t last = 0;
  for (std::size_t i = pool.size(); i-- > 0;) {
    if (semantic_distance(pool[i], target) == best) first = i;
  }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (semantic_distance(pool[i], target) == best) last = i;
  }
  AnalogyResult base = analogy_retrieve(pool, k0, k_sub, k_add);
  EXPECT_EQ(base.distance, best);
  EXPECT_EQ(base.index, first);
  std::vector<ConceptVector> reversed(pool.rbegin(), pool.rend());
  AnalogyResult rev = analogy_retrieve(reversed, k0, k_sub, k_add);
  EXPECT_EQ(rev.distance, best);
  EXPECT_EQ(rev.index, pool.size() - 1 - last);
}

RankingRecord record(std::array<double, 4> scores, std::array<std::size_t, 4> human = {0, 1, 2, 3}) {
  RankingRecord r;
  r.word = "w";
  r.candidates = {"a", "b", "c", "d"};
  r.scores = scores;
  r.human_order = human;
  return r;
}

TEST(Metrics, AccuracyCases) {
  std::vector<RankingRecord> perfect{record({1, 1, 0, 0}), record({0.9, 0.8, 0.1, 0.2})};
  AccuracyReport a = classification_accuracy(perfect);
  EXPECT_EQ(a.positive, 1.0);
  EXPECT_EQ(a.negative, 1.0);
  EXPECT_EQ(a.combined, 1.0);
  std::vector<RankingRecord> at_t{record({0.5, 0.5, 0.5, 0.5})};
  EXPECT_EQ(classification_accuracy(at_t, 0.5).combined, 0.0);
  // record 1: positives 0.7 (hit) 0.4 (miss); negatives 0.2 (hit) 0.6 (miss)
  // record 2: positives 0.9, 0.8 (hits); negatives 0.55 (miss) 0.1 (hit)
  std::vector<RankingRecord> toy{record({0.7, 0.4, 0.2, 0.6}), record({0.9, 0.8, 0.55, 0.1})};
  AccuracyReport t = classification_accuracy(toy, 0.5);
  EXPECT_DOUBLE_EQ(t.positive, (0.5 + 1.0) / 2);
  EXPECT_DOUBLE_EQ(t.negative, (0.5 + 0.5) / 2);
  EXPECT_DOUBLE_EQ(t.combined, (2.0 / 4 + 3.0 / 4) / 2);
  EXPECT_THROW(classification_accuracy({}), RecordError);
}

TEST(Metrics, KendallDistance) {
  EXPECT_EQ(kendall_tau_distance({0, 1, 2, 3}, {0, 1, 2, 3}), 0.0);
  EXPECT_EQ(kendall_tau_distance({0, 1, 2, 3}, {3, 2, 1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(kendall_tau_distance({0, 1, 2, 3}, {1, 0, 2, 3}), 1.0 / 6);
  std::vector<RankingRecord> same{record({0.9, 0.7, 0.3, 0.1})};
  EXPECT_EQ(ranking_distance(same).distance, 0.0);
  std::vector<RankingRecord> rev{record({0.1, 0.3, 0.7, 0.9})};
  EXPECT_EQ(ranking_distance(rev).distance, 1.0);
  std::vector<RankingRecord> swap{record({0.7, 0.9, 0.3, 0.1})};
  EXPECT_DOUBLE_EQ(ranking_distance(swap).distance, 1.0 / 6);
}

TEST(Metrics, TiesFollowHumanOrder) {
  RankingRecord r = record({0.5, 0.5, 0.5, 0.5}, {2, 0, 3, 1});
  EXPECT_EQ(induced_order(r), (std::array<std::size_t, 4>{2, 0, 3, 1}));
  std::vector<RankingRecord> v{r};
  RankingReport rep = ranking_distance(v);
  EXPECT_EQ(rep.distance, 0.0);
  EXPECT_EQ(rep.ties, 6u);
}

TEST(Annotations, ParseAndFormat) {
  std::istringstream in(
      "# word pos pos neg neg [ranks]\n"
      "metal metallic shiny rubber matte\n"
      "\n"
      "big large large small tiny 1 0 2 3  # trailing comment\n");
  auto recs = parse_annotations(in);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].word, "metal");
  EXPECT_EQ(recs[0].human_order, (std::array<std::size_t, 4>{0, 1, 2, 3}));
  EXPECT_EQ(recs[1].human_order, (std::array<std::size_t, 4>{1, 0, 2, 3}));
  std::istringstream again(format_annotations(recs));
  auto back = parse_annotations(again);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].candidates, recs[1].candidates);
  EXPECT_EQ(back[1].human_order, recs[1].human_order);
}

TEST(Annotations, ErrorsNameTheLine) {
  std::istringstream short_line("metal metallic shiny rubber matte\nred blue\n");
  try {
    parse_annotations(short_line);
    FAIL();
  } catch (const RecordError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream bad_rank("a b c d e 0 1 1 3\n");
  EXPECT_THROW(parse_annotations(bad_rank), RecordError);
}

TEST(Annotations, SyntheticRecordsForDefaultVocabulary) {
  Lexicon lex = build_lexicon(OntologyConfig::clevr_default());
  auto recs = synthetic_annotations(lex);
  ASSERT_EQ(recs.size(), 3u);
  for (const auto& r : recs) {
    ConceptId c = lex.concept_of(lex.word_id(r.word));
    EXPECT_EQ(lex.concept_of(lex.word_id(r.candidates[0])), c);
    EXPECT_EQ(lex.concept_of(lex.word_id(r.candidates[1])), c);
    EXPECT_NE(lex.concept_of(lex.word_id(r.candidates[2])), c);
    EXPECT_NE(lex.concept_of(lex.word_id(r.candidates[3])), c);
  }
}

}  // namespace
}  // namespace concept_forge
