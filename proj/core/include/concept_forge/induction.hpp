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

// Visual mapping of words: harvest attention logits for every mentioned
// word, fit a per-word decision boundary, label (object, word) and
// (object pair, word) examples, and code every object / ordered pair in the
// corpus into word bit vectors.

#ifndef CONCEPT_FORGE_INDUCTION_HPP_
#define CONCEPT_FORGE_INDUCTION_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "concept_forge/attention_sim.hpp"
#include "concept_forge/bit_matrix.hpp"
#include "concept_forge/gmm.hpp"
#include "concept_forge/ontology.hpp"

namespace concept_forge {

// Logit samples per word, indexed by WordId.
struct LogitSampleStore {
  std::vector<std::vector<double>> samples;

  const std::vector<double>& at(WordId w) const { return samples.at(w.index()); }
  // Words that were never mentioned and so have no samples.
  std::vector<WordId> never_mentioned() const;
};

// Each mention of a unary word appends the logits of every object in its
// scene; each mention of a binary word appends, for every anchor object, the
// logits of every object (|O|^2 values). Throws EmptyStoreError on an empty
// corpus.
LogitSampleStore collect_logits(const Corpus& corpus, const AttentionSimulator& sim);

struct BoundaryOptions {
  FitOptions fit;
  // Fewer samples than this excludes the word.
  std::size_t min_samples = 0;
  // Two-component fits less separated than this (Ashman's D) are treated as
  // one-class and excluded.
  double min_separation_d = 2.0;
};

struct WordExclusion {
  WordId word;
  std::string reason;
};

struct BoundaryMap {
  std::vector<std::optional<double>> boundary;    // by WordId
  std::vector<std::optional<GmmModel>> models;    // by WordId
  std::vector<WordExclusion> excluded;            // ascending WordId

  bool has(WordId w) const { return w.index() < boundary.size() && boundary[w.index()].has_value(); }
  // Throws ClassifierUnavailableError for excluded words.
  double at(WordId w) const;
};

// bd_x = decision_boundary(fit_em(S_x, 2)) for every word. Words with too
// few samples, a degenerate or one-class distribution are excluded and
// listed, not fatal.
BoundaryMap fit_boundaries(const LogitSampleStore& store, const Lexicon& lexicon,
                           const BoundaryOptions& options = {});

struct UnaryLabel {
  std::uint32_t scene = 0;
  std::uint32_t object = 0;
  WordId word;
  std::uint8_t label = 0;
  bool operator==(const UnaryLabel&) const = default;
};

struct BinaryLabel {
  std::uint32_t scene = 0;
  std::uint32_t object = 0;  // v1, the attended object
  std::uint32_t anchor = 0;  // v2
  WordId word;
  std::uint8_t label = 0;
  bool operator==(const BinaryLabel&) const = default;
};

struct LabeledSets {
  std::vector<UnaryLabel> unary;
  std::vector<BinaryLabel> binary;
  // Mentions skipped because the word has no boundary.
  std::size_t skipped_mentions = 0;
};

// y = 1(logit > bd) for every object and mentioned unary word, and for every
// ordered pair (v1, v2), v2 != v1, and mentioned binary word.
LabeledSets label_corpus(const Corpus& corpus, const BoundaryMap& boundaries,
                         const AttentionSimulator& sim);

// Calibrated threshold classifier: sigmoid((logit - bd) / tau). Any
// classifier consistent with the boundary labels codes identically once its
// output is thresholded at 0.5.
class ConceptClassifier {
 public:
  // Throws ArgumentError unless tau > 0.
  ConceptClassifier(const AttentionSimulator& sim, const BoundaryMap& boundaries, double tau = 0.5);

  static double probability(double logit, double boundary, double tau);

  bool available(WordId w) const { return boundaries_->has(w); }
  double classify_unary(const Scene& scene, std::size_t object, WordId word) const;
  double classify_binary(const Scene& scene, const RelationTable& relations, std::size_t object,
                         std::size_t anchor, WordId word) const;
  double classify_binary(const Scene& scene, std::size_t object, std::size_t anchor,
                         WordId word) const;

  const AttentionSimulator& simulator() const { return *sim_; }
  const BoundaryMap& boundaries() const { return *boundaries_; }
  double tau() const { return tau_; }

 private:
  const AttentionSimulator* sim_;
  const BoundaryMap* boundaries_;
  double tau_;
};

// Column provenance. `anchor` is unused for unary columns.
struct ColumnRef {
  std::uint32_t scene = 0;
  std::uint32_t object = 0;
  std::uint32_t anchor = 0;
  bool operator==(const ColumnRef&) const = default;
};

struct GammaMatrix {
  Arity arity = Arity::kUnary;
  std::vector<WordId> row_words;
  BitMatrix bits;
  std::vector<ColumnRef> columns;

  std::optional<std::size_t> row_of(WordId w) const;
  bool operator==(const GammaMatrix&) const = default;
};

struct GammaMatrices {
  GammaMatrix unary;
  GammaMatrix binary;
};

// Codes every object (unary) and every ordered co-scene pair (binary) with
// 1(classifier > 0.5) for each word that has a classifier. Columns are
// scene-major, then object; binary columns iterate the anchor fastest.
GammaMatrices binary_code(const Corpus& corpus, const ConceptClassifier& classifier);

}  // namespace concept_forge

#endif  // CONCEPT_FORGE_INDUCTION_HPP_
