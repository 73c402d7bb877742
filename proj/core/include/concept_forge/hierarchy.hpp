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

// Concept and super-concept induction from word bit matrices.
//
// Two words that describe the same objects correlate near 2 (synonyms); two
// words that never describe the same object correlate near 0 (exclusive
// concepts of one super concept). A three-component mixture over all pair
// correlations separates the two extremes from everything in between.
// Synonym groups become concepts, fully exclusive groups of concepts become
// super concepts, and per-scene concept tensors are read off the word
// classifiers with a max over synonyms and a hardmax per super concept.

#ifndef CONCEPT_FORGE_HIERARCHY_HPP_
#define CONCEPT_FORGE_HIERARCHY_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "concept_forge/bit_matrix.hpp"
#include "concept_forge/gmm.hpp"
#include "concept_forge/induction.hpp"
#include "concept_forge/ontology.hpp"

namespace concept_forge {

// |a AND b| / |b| + |a AND b| / |a| over rows r1, r2. Throws
// UndefinedCorrelationError if either row is all zero.
double word_correlation(const BitMatrix& gamma, std::size_t r1, std::size_t r2);

struct CorrelationPair {
  std::size_t a = 0;  // index into CorrelationTable::words, a < b
  std::size_t b = 0;
  double theta = 0.0;
};

struct CorrelationTable {
  Arity arity = Arity::kUnary;
  // Words with at least one set bit, in Gamma row order.
  std::vector<WordId> words;
  // Gamma rows that were all zero; they take no part in any pair.
  std::vector<WordId> skipped_words;
  std::vector<double> theta;        // words x words, symmetric
  std::vector<double> conditional;  // [row][col] = P(col | row)
  std::vector<CorrelationPair> pairs;

  std::size_t size() const { return words.size(); }
  double at(std::size_t i, std::size_t j) const { return theta[i * words.size() + j]; }
  double conditional_at(std::size_t row, std::size_t col) const {
    return conditional[row * words.size() + col];
  }
  std::optional<std::size_t> index_of(WordId w) const;
};

CorrelationTable correlation_set(const GammaMatrix& gamma);

struct CorrelationSets {
  CorrelationTable unary;
  CorrelationTable binary;
};

CorrelationSets correlation_sets(const GammaMatrices& gamma);

enum class PairLabel : std::uint8_t { kExclusive = 0, kMid = 1, kSynonym = 2 };

std::string_view pair_label_name(PairLabel label);

// Label of every word pair of one arity.
struct PairAssignments {
  std::vector<WordId> words;
  std::vector<PairLabel> labels;  // words x words, symmetric; diagonal kSynonym
  std::optional<GmmModel> model;
  // Label attached to each mixture component (by ascending mean).
  std::vector<PairLabel> component_labels;

  PairLabel at(std::size_t i, std::size_t j) const { return labels[i * words.size() + j]; }
  void set(std::size_t i, std::size_t j, PairLabel l) {
    labels[i * words.size() + j] = l;
    labels[j * words.size() + i] = l;
  }
  static PairAssignments all_mid(std::vector<WordId> words);
};

// Fits a three-component mixture with means initialised at 0, 1 and 2 to the
// pair correlations. Each component is labelled by the nearest of those
// anchors (0 exclusive, 1 mid, 2 synonym) and every pair inherits the label
// of the component it is assigned to. Throws ClusteringError for fewer than
// three pairs or a degenerate fit.
PairAssignments cluster_pairs(const CorrelationTable& table, const FitOptions& options = {});

// Connected components of the synonym graph, each validated to be all-pairs
// synonym. Groups hold indices into assignments.words, ascending, and are
// ordered by their smallest member. Throws InconsistencyError naming the
// offending pairs.
std::vector<std::vector<std::size_t>> induce_concepts(const PairAssignments& assignments);

// Concepts joined when every cross-concept word pair is exclusive; connected
// components become super concepts (singletons allowed) and are validated to
// be exclusive across every member pair. Returns groups of concept indices.
std::vector<std::vector<std::size_t>> induce_super_concepts(
    const PairAssignments& assignments, const std::vector<std::vector<std::size_t>>& concepts);

// One arity of an induced (or ground-truth) hierarchy. Concepts are stored
// so that every super concept occupies a contiguous block.
struct InducedLevel {
  Arity arity = Arity::kUnary;
  std::vector<std::vector<WordId>> concepts;
  std::vector<std::vector<std::size_t>> super_concepts;
  std::vector<std::size_t> concept_super;
  // Words with no classifier or no set bit.
  std::vector<WordId> excluded_words;

  std::size_t concept_count() const { return concepts.size(); }
  std::optional<std::size_t> concept_of(WordId w) const;
  bool same_partition(const InducedLevel& other) const;
};

// Orders super concepts by smallest word id, concepts inside a super concept
// likewise, words ascending, and fills concept_super.
InducedLevel make_level(Arity arity, std::vector<std::vector<WordId>> concepts,
                        std::vector<std::vector<std::size_t>> super_concepts,
                        std::vector<WordId> excluded_words = {});

struct ConceptHierarchy {
  InducedLevel unary;
  InducedLevel binary;
  PairAssignments unary_pairs;
  PairAssignments binary_pairs;

  const InducedLevel& level(Arity a) const { return a == Arity::kUnary ? unary : binary; }
};

// Full induction for one arity: correlation, clustering, concepts, super
// concepts. `excluded` lists words that never reached the Gamma rows.
InducedLevel induce_level(const CorrelationTable& table, PairAssignments& assignments_out,
                          const std::vector<WordId>& excluded, const FitOptions& options = {});

ConceptHierarchy induce_hierarchy(const GammaMatrices& gamma, const BoundaryMap& boundaries,
                                  const Lexicon& lexicon, const FitOptions& options = {});

// The lexicon's own hierarchy in the canonical order of make_level.
ConceptHierarchy ground_truth_hierarchy(const Lexicon& lexicon);

// Nested text: arity, then super concepts, then concepts with their synonyms.
std::string hierarchy_to_text(const ConceptHierarchy& hierarchy, const Lexicon& lexicon);

// Per-scene concept tensors. Row i of `unary` is object i; `binary` holds the
// ordered pair (i, j) at [(i * n + j) * E^b + e]. Diagonal pairs stay zero.
struct ConceptTensors {
  std::size_t objects = 0;
  std::size_t unary_concepts = 0;
  std::size_t binary_concepts = 0;
  std::vector<double> unary;
  std::vector<double> binary;

  double ku(std::size_t i, std::size_t e) const { return unary[i * unary_concepts + e]; }
  double kb(std::size_t i, std::size_t j, std::size_t e) const {
    return binary[(i * objects + j) * binary_concepts + e];
  }
  std::span<const double> unary_row(std::size_t i) const {
    return {unary.data() + i * unary_concepts, unary_concepts};
  }
};

// Replaces `block` by the one-hot vector of its largest entry, lowest index
// on ties.
void hardmax(std::span<double> block);

// Max over the classifier probabilities of each concept's synonyms, then a
// hardmax per multi-concept super concept. Concepts in singleton super
// concepts are binarized at 0.5 instead. Throws HierarchyError for a concept
// without words.
ConceptTensors concept_tensors(const Scene& scene, const ConceptClassifier& classifier,
                               const ConceptHierarchy& hierarchy);

}  // namespace concept_forge

#endif  // CONCEPT_FORGE_HIERARCHY_HPP_
