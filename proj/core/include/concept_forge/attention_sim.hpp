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

#ifndef CONCEPT_FORGE_ATTENTION_SIM_HPP_
#define CONCEPT_FORGE_ATTENTION_SIM_HPP_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include "concept_forge/ontology.hpp"

namespace concept_forge {

// Peak locations of the simulated attention logits. Objects that have the
// word's concept sit around mu_pos, objects that do not around mu_neg, and
// relation pairs inside the ambiguity band around mu_amb.
struct LogitNoiseModel {
  double mu_pos = 3.0;
  double mu_neg = -3.0;
  double mu_amb = 0.0;
  double sigma = 1.0;

  // Throws ConfigError unless mu_neg < mu_amb < mu_pos and sigma is finite
  // and non-negative.
  void validate() const;
};

struct FeatureVector {
  std::uint32_t object_id = 0;
  std::vector<double> values;
};

struct FeatureConfig {
  std::size_t dimension = 32;
  double sigma = 0.1;
};

// Stand-in for a trained reasoning network's read unit. Every logit is a pure
// function of (seed, scene id, word, object, anchor) and of ground truth only,
// so two passes over the corpus see identical values.
class AttentionSimulator {
 public:
  AttentionSimulator(const Lexicon& lexicon, LogitNoiseModel noise, std::uint64_t seed,
                     double ambiguity_epsilon, FeatureConfig features = {});

  // One logit per object. Throws ArityError for binary words.
  std::vector<double> unary_logits(const Scene& scene, WordId word) const;
  double unary_logit(const Scene& scene, std::size_t object, WordId word) const;

  // Logit of every object o for "o is <word> of anchor". The anchor itself
  // gets a negative-peak draw. Throws ArityError for unary words and IdError
  // for an anchor outside the scene.
  std::vector<double> binary_logits(const Scene& scene, WordId word, std::size_t anchor) const;
  double binary_logit(const Scene& scene, const RelationTable& relations, std::size_t object,
                      std::size_t anchor, WordId word) const;

  // Concept-template sum plus Normal(0, feature sigma^2) noise per entry.
  std::vector<FeatureVector> object_features(const Scene& scene) const;
  // Noise-free template for an attribute tuple.
  std::vector<double> feature_template(const std::vector<ConceptId>& attributes) const;

  const Lexicon& lexicon() const { return *lexicon_; }
  const LogitNoiseModel& noise() const { return noise_; }
  std::uint64_t seed() const { return seed_; }
  double ambiguity_epsilon() const { return epsilon_; }

 private:
  double draw(double mean, std::uint64_t key) const;

  const Lexicon* lexicon_;
  LogitNoiseModel noise_;
  std::uint64_t seed_;
  double epsilon_;
  FeatureConfig features_;
  // concept index -> template vector of length features_.dimension
  std::vector<std::vector<double>> templates_;
};

// Debug dump: scene_id,word,object_id,anchor_id,logit (anchor_id empty for
// unary words), for every mentioned word of every scene.
void write_logit_dump(std::ostream& out, const Corpus& corpus, const AttentionSimulator& sim);

}  // namespace concept_forge

#endif  // CONCEPT_FORGE_ATTENTION_SIM_HPP_
