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

// Ground-truth concept world: the lexicon (super concepts, concepts and their
// synonym words), random scenes of attributed objects, the spatial relation
// table of a scene, and the word-mention bags that stand in for questions.

#ifndef CONCEPT_FORGE_ONTOLOGY_HPP_
#define CONCEPT_FORGE_ONTOLOGY_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "concept_forge/random.hpp"

namespace concept_forge {

template <typename Tag>
struct StrongId {
  std::uint32_t value = 0;

  constexpr StrongId() = default;
  constexpr explicit StrongId(std::uint32_t v) : value(v) {}
  constexpr std::size_t index() const { return value; }
  auto operator<=>(const StrongId&) const = default;
};

using WordId = StrongId<struct WordTag>;
using ConceptId = StrongId<struct ConceptTag>;
using SuperConceptId = StrongId<struct SuperConceptTag>;

enum class Arity : std::uint8_t { kUnary, kBinary };

std::string_view arity_name(Arity arity);

enum class Axis : std::uint8_t { kX, kY };

// ---------------------------------------------------------------------------
// Configuration

struct SuperConceptConfig {
  std::string name;
  // One inner list of synonyms per concept.
  std::vector<std::vector<std::string>> concepts;
  int line = 0;
};

// Two exclusive spatial relations along one axis. `lower` holds for (i, j)
// when object i's coordinate is below object j's by more than the ambiguity
// band, `upper` when it is above.
struct BinaryPairConfig {
  std::string name;
  Axis axis = Axis::kX;
  std::vector<std::string> lower;
  std::vector<std::string> upper;
  int line = 0;
};

struct GenerationConfig {
  std::uint64_t seed = 7;
  std::size_t scenes = 500;
  std::size_t min_objects = 3;
  std::size_t max_objects = 10;
  double min_separation = 0.05;
  double ambiguity_epsilon = 0.02;
  double relevance_bias = 0.9;
  std::size_t unary_mentions_min = 2;
  std::size_t unary_mentions_max = 4;
  std::size_t binary_mentions_min = 1;
  std::size_t binary_mentions_max = 2;
  // Every word must be mentioned at least this often; targeted scenes are
  // appended until it holds. 0 disables top-up.
  std::size_t min_mentions = 50;
  std::size_t max_placement_retries = 1000;
  std::size_t max_top_up_scenes = 20000;
};

struct OntologyConfig {
  std::vector<SuperConceptConfig> super_concepts;
  std::vector<BinaryPairConfig> binary_concepts;
  GenerationConfig generation;

  // CLEVR attribute and relation vocabulary.
  static OntologyConfig clevr_default();
};

// ---------------------------------------------------------------------------
// Lexicon

struct ConceptInfo {
  std::string name;  // first synonym
  Arity arity = Arity::kUnary;
  SuperConceptId super_concept;
  std::vector<WordId> words;
  // Binary concepts only: true for the `upper` side of its pair.
  bool upper = false;
};

struct SuperConceptInfo {
  std::string name;
  Arity arity = Arity::kUnary;
  std::vector<ConceptId> concepts;
  Axis axis = Axis::kX;  // binary only
};

// Validated, immutable vocabulary. Ids are dense: unary words, concepts and
// super concepts come first (declaration order), binary ones after.
class Lexicon {
 public:
  std::size_t word_count() const { return words_.size(); }
  std::size_t concept_count() const { return concepts_.size(); }
  std::size_t super_concept_count() const { return supers_.size(); }

  const std::string& word(WordId w) const { return words_.at(w.index()); }
  std::optional<WordId> find_word(std::string_view text) const;
  // Throws IdError for unknown words.
  WordId word_id(std::string_view text) const;

  ConceptId concept_of(WordId w) const { return word_concept_.at(w.index()); }
  Arity arity_of(WordId w) const { return concept_info(concept_of(w)).arity; }
  const ConceptInfo& concept_info(ConceptId c) const { return concepts_.at(c.index()); }
  const SuperConceptInfo& super_concept(SuperConceptId s) const { return supers_.at(s.index()); }
  std::optional<SuperConceptId> find_super_concept(std::string_view name) const;
  std::optional<ConceptId> find_concept(std::string_view name) const;

  const std::vector<WordId>& unary_words() const { return unary_words_; }
  const std::vector<WordId>& binary_words() const { return binary_words_; }
  const std::vector<ConceptId>& unary_concepts() const { return unary_concepts_; }
  const std::vector<ConceptId>& binary_concepts() const { return binary_concepts_; }
  const std::vector<SuperConceptId>& unary_super_concepts() const { return unary_supers_; }
  const std::vector<SuperConceptId>& binary_super_concepts() const { return binary_supers_; }

  // Position of a unary super concept in ObjectInstance::attributes.
  std::size_t attribute_slot(SuperConceptId s) const;
  // Dense index of a binary concept among binary_concepts().
  std::size_t binary_slot(ConceptId c) const;
  // Dense index of a unary concept among unary_concepts().
  std::size_t unary_slot(ConceptId c) const;

 private:
  friend Lexicon build_lexicon(const OntologyConfig& config);

  std::vector<std::string> words_;
  std::vector<ConceptId> word_concept_;
  std::unordered_map<std::string, WordId> word_index_;
  std::vector<ConceptInfo> concepts_;
  std::vector<SuperConceptInfo> supers_;
  std::vector<WordId> unary_words_;
  std::vector<WordId> binary_words_;
  std::vector<ConceptId> unary_concepts_;
  std::vector<ConceptId> binary_concepts_;
  std::vector<SuperConceptId> unary_supers_;
  std::vector<SuperConceptId> binary_supers_;
};

// Validates `config` and assigns ids. Throws ConfigError for structural
// problems (a super concept with fewer than two concepts, an empty synonym
// list, an unpaired binary relation) and LexiconError when a word is listed
// under more than one concept.
Lexicon build_lexicon(const OntologyConfig& config);

// ---------------------------------------------------------------------------
// Scenes

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct ObjectInstance {
  std::uint32_t id = 0;
  // One concept per unary super concept, indexed by Lexicon::attribute_slot.
  std::vector<ConceptId> attributes;
  Point position;
  bool operator==(const ObjectInstance&) const = default;

  bool has(ConceptId c) const;
};

struct Scene {
  std::uint32_t id = 0;
  std::vector<ObjectInstance> objects;
  bool operator==(const Scene&) const = default;

  std::size_t size() const { return objects.size(); }
};

// Samples attributes uniformly per super concept and places objects by
// rejection so that all pairwise distances are >= min_separation. Throws
// GenerationError when an object cannot be placed.
Scene generate_scene(Rng& rng, const Lexicon& lexicon, const GenerationConfig& config,
                     std::uint32_t scene_id);

// Throws GenerationError if the scene breaks an ObjectInstance or Scene
// invariant under `lexicon`/`config`.
void validate_scene(const Scene& scene, const Lexicon& lexicon, const GenerationConfig& config);

enum class Relation : std::uint8_t { kNotHolds = 0, kHolds = 1, kAmbiguous = 2 };

// holds/ambiguous state of every binary concept on every ordered object pair.
// Pair (i, j) reads "i is <relation> of j".
class RelationTable {
 public:
  RelationTable() = default;
  RelationTable(std::size_t objects, std::size_t binary_concepts);

  Relation at(std::size_t binary_slot, std::size_t i, std::size_t j) const {
    return cells_[(binary_slot * n_ + i) * n_ + j];
  }
  bool holds(std::size_t binary_slot, std::size_t i, std::size_t j) const {
    return at(binary_slot, i, j) == Relation::kHolds;
  }
  void set(std::size_t binary_slot, std::size_t i, std::size_t j, Relation r) {
    cells_[(binary_slot * n_ + i) * n_ + j] = r;
  }
  std::size_t object_count() const { return n_; }
  std::size_t concept_count() const { return concepts_; }

 private:
  std::size_t n_ = 0;
  std::size_t concepts_ = 0;
  std::vector<Relation> cells_;
};

// Relations from positions: `lower` holds iff coord_i < coord_j - epsilon,
// `upper` iff coord_i > coord_j + epsilon, both ambiguous inside the band.
// Self pairs never hold.
RelationTable ground_truth_relations(const Scene& scene, const Lexicon& lexicon, double epsilon);

// ---------------------------------------------------------------------------
// Mentions

struct MentionBag {
  std::uint32_t scene_id = 0;
  std::vector<WordId> unary_words;
  std::vector<WordId> binary_words;
  bool operator==(const MentionBag&) const = default;
};

MentionBag generate_mentions(const Scene& scene, Rng& rng, const Lexicon& lexicon,
                             const GenerationConfig& config);

struct CorpusEntry {
  Scene scene;
  MentionBag mentions;
  // Appended by the coverage top-up rather than sampled freely.
  bool targeted = false;
  bool operator==(const CorpusEntry&) const = default;
};

struct Corpus {
  std::vector<CorpusEntry> entries;

  std::size_t size() const { return entries.size(); }
  std::size_t total_objects() const;
  std::size_t total_ordered_pairs() const;
  const CorpusEntry& by_scene_id(std::uint32_t id) const;
};

// Per-word mention counts over the corpus, indexed by WordId.
std::vector<std::size_t> mention_counts(const Corpus& corpus, const Lexicon& lexicon);

// `config.scenes` free scenes, followed by targeted scenes until every word
// reaches `config.min_mentions`. Scene i of the free part is generated from
// its own stream, so the result is a pure function of (seed, config, lexicon).
Corpus generate_corpus(const Lexicon& lexicon, const GenerationConfig& config);

}  // namespace concept_forge

#endif  // CONCEPT_FORGE_ONTOLOGY_HPP_
