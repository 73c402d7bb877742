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

// Compositional questions as functional programs, with one interpreter that
// runs them either over ground-truth scene state or over induced concept
// tensors.

#ifndef CONCEPT_FORGE_REASONER_HPP_
#define CONCEPT_FORGE_REASONER_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "concept_forge/hierarchy.hpp"
#include "concept_forge/induction.hpp"
#include "concept_forge/ontology.hpp"

namespace concept_forge {

enum class OpCode : std::uint8_t {
  kScene,
  kFilter,
  kRelate,
  kCount,
  kExist,
  kQuery,
  kCompareAttr,
  kCompareCount,
};

enum class Comparison : std::uint8_t { kLess, kEqual, kGreater };

enum class Family : std::uint8_t {
  kCount,
  kExist,
  kCompareNumber,
  kQueryAttribute,
  kCompareAttribute,
};

inline constexpr std::size_t kFamilyCount = 5;
inline constexpr std::array<Family, kFamilyCount> kAllFamilies = {
    Family::kCount, Family::kExist, Family::kCompareNumber, Family::kQueryAttribute,
    Family::kCompareAttribute};

std::string_view op_name(OpCode op);
std::string_view comparison_name(Comparison c);
// "count", "exist", "comp num", "query attr", "comp attr".
std::string_view family_name(Family f);
std::optional<OpCode> parse_op(std::string_view name);
std::optional<Comparison> parse_comparison(std::string_view name);
std::optional<Family> parse_family(std::string_view name);

struct ProgramNode {
  OpCode op = OpCode::kScene;
  std::vector<std::size_t> inputs;  // indices of earlier nodes
  SuperConceptId super_concept;     // FILTER, QUERY, COMPARE_ATTR
  ConceptId concept_id;             // FILTER (unary), RELATE (binary)
  Comparison comparison = Comparison::kEqual;  // COMPARE_COUNT
  bool operator==(const ProgramNode&) const = default;
};

// Nodes in topological order; the last node produces the answer.
struct Program {
  Family family = Family::kCount;
  std::vector<ProgramNode> nodes;
  bool operator==(const Program&) const = default;
};

using Answer = std::variant<std::int64_t, bool, ConceptId>;

std::string answer_to_string(const Answer& a, const Lexicon& lexicon);

enum class ValueType : std::uint8_t { kObjectSet, kInteger, kBoolean, kConcept };

// Static type check: input arity and types per op, concept arity and super
// concept membership. Returns the program's result type; throws
// ExecutionError on the first violation.
ValueType typecheck(const Program& program, const Lexicon& lexicon);

// Bit mask over scene objects; scenes are limited to 64 objects.
using ObjectSet = std::uint64_t;

// What the interpreter may ask of a scene. Object sets, relations and
// attributes come either from ground truth or from concept tensors.
class SceneView {
 public:
  virtual ~SceneView() = default;
  virtual std::size_t size() const = 0;
  // Object has unary concept c.
  virtual bool has(std::size_t object, ConceptId c) const = 0;
  // "object is <relation> of anchor".
  virtual bool relates(ConceptId relation, std::size_t object, std::size_t anchor) const = 0;
  // The object's concept under super concept s.
  virtual ConceptId attribute(std::size_t object, SuperConceptId s) const = 0;
};

class GroundTruthView : public SceneView {
 public:
  GroundTruthView(const Scene& scene, const Lexicon& lexicon, double ambiguity_epsilon);
  std::size_t size() const override { return scene_->size(); }
  bool has(std::size_t object, ConceptId c) const override;
  bool relates(ConceptId relation, std::size_t object, std::size_t anchor) const override;
  ConceptId attribute(std::size_t object, SuperConceptId s) const override;
  const RelationTable& relations() const { return relations_; }

 private:
  const Scene* scene_;
  const Lexicon* lexicon_;
  RelationTable relations_;
};

// Maps ground-truth concepts onto induced ones through their words.
struct ConceptBinding {
  std::vector<std::optional<std::size_t>> concept_to_induced;        // by ConceptId
  std::vector<std::optional<std::size_t>> super_concept_to_induced;  // by SuperConceptId
  std::vector<ConceptId> induced_unary_to_concept;                   // by induced unary index

  static ConceptBinding build(const ConceptHierarchy& hierarchy, const Lexicon& lexicon);
};

// Reads a scene only through its concept tensors. References to concepts the
// hierarchy does not contain throw UnanswerableError.
class ConceptTensorView : public SceneView {
 public:
  ConceptTensorView(const ConceptTensors& tensors, const ConceptHierarchy& hierarchy,
                    const ConceptBinding& binding, const Lexicon& lexicon);
  std::size_t size() const override { return tensors_->objects; }
  bool has(std::size_t object, ConceptId c) const override;
  bool relates(ConceptId relation, std::size_t object, std::size_t anchor) const override;
  ConceptId attribute(std::size_t object, SuperConceptId s) const override;

 private:
  std::size_t induced(ConceptId c) const;

  const ConceptTensors* tensors_;
  const ConceptHierarchy* hierarchy_;
  const ConceptBinding* binding_;
  const Lexicon* lexicon_;
};

using Value = std::variant<ObjectSet, std::int64_t, bool, ConceptId>;

// Set semantics: FILTER keeps objects with the concept, RELATE(r) from a
// singleton {a} returns every o != a with r(o, a), COUNT/EXIST measure a set,
// QUERY reads the attribute of a singleton, COMPARE_ATTR tests two singletons
// for the same attribute, COMPARE_COUNT compares two set sizes. Throws
// ExecutionError on a type error or a non-singleton where one is required.
// If `trace` is given it receives every node's value.
Answer execute(const Program& program, const SceneView& view, const Lexicon& lexicon,
               std::vector<Value>* trace = nullptr);

Answer execute_ground_truth(const Program& program, const Scene& scene, const Lexicon& lexicon,
                            double ambiguity_epsilon);

Answer execute_concepts(const Program& program, const ConceptTensors& tensors,
                        const ConceptHierarchy& hierarchy, const ConceptBinding& binding,
                        const Lexicon& lexicon);

struct QuestionConfig {
  std::size_t max_retries = 200;
  std::size_t max_filters = 2;
  double relate_probability = 0.35;
};

struct Question {
  std::uint32_t scene = 0;
  Program program;
  Answer gold;
};

// Picks a family uniformly, then samples programs of that family until one
// passes the gold constraints: sets feeding FILTER/RELATE are non-empty,
// RELATE/QUERY/COMPARE_ATTR inputs are singletons, EXIST has at least one
// FILTER or RELATE, and no RELATE anchor is inside the ambiguity band of any
// other object on that relation's axis. Throws GenerationError after
// `config.max_retries` rejections.
Question generate_question(const Scene& scene, Rng& rng, const Lexicon& lexicon,
                           double ambiguity_epsilon, const QuestionConfig& config = {});

// Same as generate_question for a fixed family.
Question generate_question(const Scene& scene, Rng& rng, const Lexicon& lexicon,
                           double ambiguity_epsilon, Family family,
                           const QuestionConfig& config = {});

struct FamilyStats {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t unanswerable = 0;
  // Concept executor raised a runtime error (e.g. a non-singleton set).
  std::size_t failed = 0;

  double agreement() const { return total == 0 ? 1.0 : static_cast<double>(correct) / total; }
};

struct SufficiencyReport {
  double noise_sigma = 0.0;
  std::size_t n_questions = 0;
  std::array<FamilyStats, kFamilyCount> families{};
  FamilyStats overall;
};

struct QuestionOutcome {
  Question question;
  std::optional<Answer> predicted;
  std::string status;  // "correct", "wrong", "unanswerable", "failed"
};

std::vector<ConceptTensors> all_concept_tensors(const Corpus& corpus,
                                                const ConceptClassifier& classifier,
                                                const ConceptHierarchy& hierarchy);

// Question q draws its family from its own random stream and is asked about
// scene q mod |corpus|, or the next scene that admits that family. Agreement
// is measured between the concept executor and gold.
SufficiencyReport evaluate_sufficiency(const Corpus& corpus, const Lexicon& lexicon,
                                       const ConceptHierarchy& hierarchy,
                                       const std::vector<ConceptTensors>& tensors,
                                       std::size_t n_questions, std::uint64_t seed,
                                       double ambiguity_epsilon, double noise_sigma,
                                       const QuestionConfig& config = {},
                                       std::vector<QuestionOutcome>* outcomes = nullptr);

}  // namespace concept_forge

#endif  // CONCEPT_FORGE_REASONER_HPP_
