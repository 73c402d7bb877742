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

#include <cmath>
#include <limits>
#include <sstream>

#include "concept_forge/attention_sim.hpp"
#include "concept_forge/error.hpp"
#include "test_util.hpp"

namespace concept_forge {
namespace {

using testing::make_scene;

class AttentionSimTest : public ::testing::Test {
 protected:
  Lexicon lex = build_lexicon(OntologyConfig::clevr_default());
  // Object 0 is strictly left of and in front of object 1; object 2 shares
  // object 1's y within the ambiguity band.
  Scene scene = make_scene(lex, 4,
                           {{{"red", "cube", "large", "metal"}, {0.1, 0.2}},
                            {{"blue", "sphere", "small", "rubber"}, {0.8, 0.7}},
                            {{"red", "cube", "large", "metal"}, {0.5, 0.71}}});
  LogitNoiseModel noiseless() const {
    LogitNoiseModel m;
    m.sigma = 0.0;
    return m;
  }
};

TEST_F(AttentionSimTest, NoiselessUnaryPeaks) {
  AttentionSimulator sim(lex, noiseless(), 1, 0.02);
  EXPECT_EQ(sim.unary_logit(scene, 0, lex.word_id("red")), 3.0);
  EXPECT_EQ(sim.unary_logit(scene, 1, lex.word_id("cube")), -3.0);
  EXPECT_EQ(sim.unary_logit(scene, 1, lex.word_id("ball")), 3.0);
  std::vector<double> v = sim.unary_logits(scene, lex.word_id("shiny"));
  EXPECT_EQ(v, (std::vector<double>{3.0, -3.0, 3.0}));
}

TEST_F(AttentionSimTest, NoiselessBinaryPeaks) {
  AttentionSimulator sim(lex, noiseless(), 1, 0.02);
  std::vector<double> left = sim.binary_logits(scene, lex.word_id("left"), 1);
  EXPECT_EQ(left[0], 3.0);   // 0 is left of 1
  EXPECT_EQ(left[1], -3.0);  // anchor itself
  EXPECT_EQ(left[2], 3.0);
  std::vector<double> front = sim.binary_logits(scene, lex.word_id("front"), 1);
  EXPECT_EQ(front[0], 3.0);
  EXPECT_EQ(front[2], 0.0);  // |dy| = 0.01, inside the band
  std::vector<double> behind = sim.binary_logits(scene, lex.word_id("behind"), 0);
  EXPECT_EQ(behind[1], 3.0);
  EXPECT_EQ(behind[0], -3.0);
}

TEST_F(AttentionSimTest, ArityAndIdErrors) {
  AttentionSimulator sim(lex, noiseless(), 1, 0.02);
  EXPECT_THROW(sim.unary_logits(scene, lex.word_id("left")), ArityError);
  EXPECT_THROW(sim.binary_logits(scene, lex.word_id("red"), 0), ArityError);
  EXPECT_THROW(sim.binary_logits(scene, lex.word_id("left"), 3), IdError);
}

TEST_F(AttentionSimTest, InvalidNoiseModelIsConfigError) {
  LogitNoiseModel bad;
  bad.mu_amb = 5.0;
  EXPECT_THROW(AttentionSimulator(lex, bad, 1, 0.02), ConfigError);
  bad = LogitNoiseModel{};
  bad.sigma = -1.0;
  EXPECT_THROW(AttentionSimulator(lex, bad, 1, 0.02), ConfigError);
  bad.sigma = std::numeric_limits<double>::infinity();
  EXPECT_THROW(AttentionSimulator(lex, bad, 1, 0.02), ConfigError);
}

// Independent draws are keyed on the scene id, so relabelling the same scene
// gives fresh samples.
TEST_F(AttentionSimTest, UnitNoiseSampleMeans) {
  AttentionSimulator sim(lex, LogitNoiseModel{}, 17, 0.02);
  WordId red = lex.word_id("red");
  double pos = 0.0;
  double neg = 0.0;
  double pos_sq = 0.0;
  const int n = 10000;
  Scene s = scene;
  for (int k = 0; k < n; ++k) {
    s.id = static_cast<std::uint32_t>(k);
    double a = sim.unary_logit(s, 0, red);
    pos += a;
    pos_sq += a * a;
    neg += sim.unary_logit(s, 1, red);
  }
  EXPECT_NEAR(pos / n, 3.0, 0.05);
  EXPECT_NEAR(neg / n, -3.0, 0.05);
  EXPECT_NEAR(pos_sq / n - (pos / n) * (pos / n), 1.0, 0.05);
}

TEST_F(AttentionSimTest, LogitsArePureFunctionsOfTheirKey) {
  AttentionSimulator a(lex, LogitNoiseModel{}, 5, 0.02);
  AttentionSimulator b(lex, LogitNoiseModel{}, 5, 0.02);
  AttentionSimulator c(lex, LogitNoiseModel{}, 6, 0.02);
  WordId w = lex.word_id("cube");
  EXPECT_EQ(a.unary_logits(scene, w), b.unary_logits(scene, w));
  EXPECT_NE(a.unary_logits(scene, w), c.unary_logits(scene, w));
  EXPECT_EQ(a.unary_logit(scene, 2, w), a.unary_logit(scene, 2, w));
}

TEST_F(AttentionSimTest, NoiselessFeaturesFollowAttributes) {
  FeatureConfig fc;
  fc.sigma = 0.0;
  AttentionSimulator sim(lex, noiseless(), 1, 0.02, fc);
  auto f = sim.object_features(scene);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0].values, f[2].values);
  EXPECT_NE(f[0].values, f[1].values);
  EXPECT_EQ(f[0].values.size(), fc.dimension);
}

TEST_F(AttentionSimTest, DistinctAttributeTuplesHaveDistinctTemplates) {
  AttentionSimulator sim(lex, noiseless(), 1, 0.02);
  std::vector<std::vector<double>> templates;
  std::vector<std::vector<ConceptId>> tuples(1);
  for (SuperConceptId s : lex.unary_super_concepts()) {
    std::vector<std::vector<ConceptId>> next;
    for (const auto& t : tuples) {
      for (ConceptId c : lex.super_concept(s).concepts) {
        auto u = t;
        u.push_back(c);
        next.push_back(u);
      }
    }
    tuples = std::move(next);
  }
  ASSERT_EQ(tuples.size(), 96u);
  for (const auto& t : tuples) templates.push_back(sim.feature_template(t));
  double min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < templates.size(); ++i) {
    for (std::size_t j = i + 1; j < templates.size(); ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < templates[i].size(); ++k) {
        d += (templates[i][k] - templates[j][k]) * (templates[i][k] - templates[j][k]);
      }
      min_dist = std::min(min_dist, std::sqrt(d));
    }
  }
  EXPECT_GT(min_dist, 0.0);
}

TEST_F(AttentionSimTest, LogitDumpHasOneRowPerSample) {
  AttentionSimulator sim(lex, noiseless(), 1, 0.02);
  Corpus corpus;
  CorpusEntry e;
  e.scene = scene;
  e.mentions.scene_id = scene.id;
  e.mentions.unary_words = {lex.word_id("red")};
  e.mentions.binary_words = {lex.word_id("left")};
  corpus.entries.push_back(e);
  std::ostringstream out;
  write_logit_dump(out, corpus, sim);
  std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 3 + 9);
  EXPECT_NE(text.find("4,red,0,,3\n"), std::string::npos);
}

}  // namespace
}  // namespace concept_forge
