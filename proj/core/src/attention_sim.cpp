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

#include "concept_forge/attention_sim.hpp"

#include <cmath>

#include <fmt/format.h>

#include "concept_forge/error.hpp"

namespace concept_forge {

namespace {

// Templates do not depend on the run seed: they belong to the lexicon.
constexpr std::uint64_t kTemplateSeed = 0x5eed7e3a1a7e5ULL;

}  // namespace

void LogitNoiseModel::validate() const {
  if (!(mu_neg < mu_amb && mu_amb < mu_pos)) {
    throw ConfigError(fmt::format("logit peaks must satisfy mu_neg < mu_amb < mu_pos, got {} {} {}",
                                  mu_neg, mu_amb, mu_pos));
  }
  if (!std::isfinite(sigma) || sigma < 0.0) {
    throw ConfigError(fmt::format("logit sigma must be finite and >= 0, got {}", sigma));
  }
}

AttentionSimulator::AttentionSimulator(const Lexicon& lexicon, LogitNoiseModel noise,
                                       std::uint64_t seed, double ambiguity_epsilon,
                                       FeatureConfig features)
    : lexicon_(&lexicon),
      noise_(noise),
      seed_(seed),
      epsilon_(ambiguity_epsilon),
      features_(features) {
  noise_.validate();
  templates_.resize(lexicon.concept_count());
  for (std::size_t c = 0; c < lexicon.concept_count(); ++c) {
    templates_[c].resize(features_.dimension);
    for (std::size_t d = 0; d < features_.dimension; ++d) {
      templates_[c][d] = keyed_standard_normal(hash_key(kTemplateSeed, StreamTag::kFeatureTemplate,
                                                        {c, d}));
    }
  }
}

double AttentionSimulator::draw(double mean, std::uint64_t key) const {
  if (noise_.sigma == 0.0) return mean;
  return mean + noise_.sigma * keyed_standard_normal(key);
}

double AttentionSimulator::unary_logit(const Scene& scene, std::size_t object, WordId word) const {
  ConceptId c = lexicon_->concept_of(word);
  if (lexicon_->concept_info(c).arity != Arity::kUnary) {
    throw ArityError(fmt::format("'{}' is a binary word", lexicon_->word(word)));
  }
  if (object >= scene.size()) {
    throw IdError(fmt::format("scene {} has no object {}", scene.id, object));
  }
  double mean = scene.objects[object].has(c) ? noise_.mu_pos : noise_.mu_neg;
  return draw(mean, hash_key(seed_, StreamTag::kUnaryLogit, {scene.id, word.value, object}));
}

std::vector<double> AttentionSimulator::unary_logits(const Scene& scene, WordId word) const {
  std::vector<double> out(scene.size());
  for (std::size_t o = 0; o < scene.size(); ++o) out[o] = unary_logit(scene, o, word);
  return out;
}

double AttentionSimulator::binary_logit(const Scene& scene, const RelationTable& relations,
                                        std::size_t object, std::size_t anchor,
                                        WordId word) const {
  ConceptId c = lexicon_->concept_of(word);
  if (lexicon_->concept_info(c).arity != Arity::kBinary) {
    throw ArityError(fmt::format("'{}' is a unary word", lexicon_->word(word)));
  }
  if (anchor >= scene.size() || object >= scene.size()) {
    throw IdError(fmt::format("scene {} has no object {}", scene.id, std::max(anchor, object)));
  }
  double mean = noise_.mu_neg;
  if (object != anchor) {
    switch (relations.at(lexicon_->binary_slot(c), object, anchor)) {
      case Relation::kHolds:
        mean = noise_.mu_pos;
        break;
      case Relation::kAmbiguous:
        mean = noise_.mu_amb;
        break;
      case Relation::kNotHolds:
        mean = noise_.mu_neg;
        break;
    }
  }
  return draw(mean,
              hash_key(seed_, StreamTag::kBinaryLogit, {scene.id, word.value, object, anchor}));
}

std::vector<double> AttentionSimulator::binary_logits(const Scene& scene, WordId word,
                                                      std::size_t anchor) const {
  if (lexicon_->arity_of(word) != Arity::kBinary) {
    throw ArityError(fmt::format("'{}' is a unary word", lexicon_->word(word)));
  }
  if (anchor >= scene.size()) {
    throw IdError(fmt::format("scene {} has no anchor object {}", scene.id, anchor));
  }
  RelationTable rel = ground_truth_relations(scene, *lexicon_, epsilon_);
  std::vector<double> out(scene.size());
  for (std::size_t o = 0; o < scene.size(); ++o) out[o] = binary_logit(scene, rel, o, anchor, word);
  return out;
}

std::vector<double> AttentionSimulator::feature_template(
    const std::vector<ConceptId>& attributes) const {
  std::vector<double> v(features_.dimension, 0.0);
  for (ConceptId c : attributes) {
    const auto& t = templates_.at(c.index());
    for (std::size_t d = 0; d < v.size(); ++d) v[d] += t[d];
  }
  return v;
}

std::vector<FeatureVector> AttentionSimulator::object_features(const Scene& scene) const {
  std::vector<FeatureVector> out;
  out.reserve(scene.size());
  for (std::size_t o = 0; o < scene.size(); ++o) {
    FeatureVector f{scene.objects[o].id, feature_template(scene.objects[o].attributes)};
    if (features_.sigma > 0.0) {
      for (std::size_t d = 0; d < f.values.size(); ++d) {
        f.values[d] += features_.sigma *
                       keyed_standard_normal(hash_key(seed_, StreamTag::kFeatureNoise,
                                                      {scene.id, o, d}));
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

void write_logit_dump(std::ostream& out, const Corpus& corpus, const AttentionSimulator& sim) {
  const Lexicon& lex = sim.lexicon();
  out << "scene_id,word,object_id,anchor_id,logit\n";
  for (const auto& e : corpus.entries) {
    const Scene& s = e.scene;
    for (WordId w : e.mentions.unary_words) {
      for (std::size_t o = 0; o < s.size(); ++o) {
        out << fmt::format("{},{},{},,{}\n", s.id, lex.word(w), o, sim.unary_logit(s, o, w));
      }
    }
    if (e.mentions.binary_words.empty()) continue;
    RelationTable rel = ground_truth_relations(s, lex, sim.ambiguity_epsilon());
    for (WordId w : e.mentions.binary_words) {
      for (std::size_t a = 0; a < s.size(); ++a) {
        for (std::size_t o = 0; o < s.size(); ++o) {
          out << fmt::format("{},{},{},{},{}\n", s.id, lex.word(w), o, a,
                             sim.binary_logit(s, rel, o, a, w));
        }
      }
    }
  }
}

}  // namespace concept_forge
