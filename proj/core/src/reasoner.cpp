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

#include "concept_forge/reasoner.hpp"

#include <algorithm>
#include <bit>
#include <random>

#include <fmt/format.h>

#include "concept_forge/error.hpp"
#include "concept_forge/parallel.hpp"
#include "concept_forge/random.hpp"

namespace concept_forge {

namespace {

constexpr std::array<std::string_view, 8> kOpNames = {
    "scene", "filter", "relate", "count", "exist", "query", "compare_attr", "compare_count"};
constexpr std::array<std::string_view, 3> kComparisonNames = {"less", "equal", "greater"};
constexpr std::array<std::string_view, kFamilyCount> kFamilyNames = {
    "count", "exist", "comp num", "query attr", "comp attr"};

template <typename E, std::size_t N>
std::optional<E> parse_enum(const std::array<std::string_view, N>& names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  return std::nullopt;
}

bool is_singleton(ObjectSet s) { return std::popcount(s) == 1; }
std::size_t only_member(ObjectSet s) { return static_cast<std::size_t>(std::countr_zero(s)); }

const char* type_name(ValueType t) {
  switch (t) {
    case ValueType::kObjectSet: return "object set";
    case ValueType::kInteger: return "integer";
    case ValueType::kBoolean: return "boolean";
    case ValueType::kConcept: return "concept";
  }
  return "?";
}

struct OpSignature {
  std::size_t inputs;
  ValueType input;
  ValueType output;
};

OpSignature signature(OpCode op) {
  switch (op) {
    case OpCode::kScene: return {0, ValueType::kObjectSet, ValueType::kObjectSet};
    case OpCode::kFilter: return {1, ValueType::kObjectSet, ValueType::kObjectSet};
    case OpCode::kRelate: return {1, ValueType::kObjectSet, ValueType::kObjectSet};
    case OpCode::kCount: return {1, ValueType::kObjectSet, ValueType::kInteger};
    case OpCode::kExist: return {1, ValueType::kObjectSet, ValueType::kBoolean};
    case OpCode::kQuery: return {1, ValueType::kObjectSet, ValueType::kConcept};
    case OpCode::kCompareAttr: return {2, ValueType::kObjectSet, ValueType::kBoolean};
    case OpCode::kCompareCount: return {2, ValueType::kObjectSet, ValueType::kBoolean};
  }
  throw ExecutionError("unknown op");
}

void check_unary_super(SuperConceptId s, const Lexicon& lex, std::size_t node) {
  if (s.index() >= lex.super_concept_count() ||
      lex.super_concept(s).arity != Arity::kUnary) {
    throw ExecutionError(fmt::format("node {}: {} is not a unary super concept", node, s.value));
  }
}

ObjectSet single(std::size_t o) { return ObjectSet{1} << o; }

ProgramNode make_node(OpCode op, std::vector<std::size_t> inputs) {
  ProgramNode n;
  n.op = op;
  n.inputs = std::move(inputs);
  return n;
}

// Evaluates every node; returns the per-node values.
std::vector<Value> run_nodes(const Program& program, const SceneView& view) {
  const std::size_t n = view.size();
  if (n > 64) throw ExecutionError(fmt::format("scene has {} objects, at most 64 supported", n));
  const ObjectSet all = n == 64 ? ~ObjectSet{0} : (ObjectSet{1} << n) - 1;
  std::vector<Value> vals;
  vals.reserve(program.nodes.size());
  auto set_in = [&](const ProgramNode& node, std::size_t k) {
    return std::get<ObjectSet>(vals[node.inputs[k]]);
  };
  auto singleton_in = [&](const ProgramNode& node, std::size_t k, std::size_t at) {
    ObjectSet s = set_in(node, k);
    if (!is_singleton(s)) {
      throw ExecutionError(fmt::format("node {} ({}) needs a single object, got {}", at,
                                       op_name(node.op), std::popcount(s)));
    }
    return only_member(s);
  };
  for (std::size_t at = 0; at < program.nodes.size(); ++at) {
    const ProgramNode& node = program.nodes[at];
    switch (node.op) {
      case OpCode::kScene:
        vals.emplace_back(std::in_place_index<0>, all);
        break;
      case OpCode::kFilter: {
        ObjectSet in = set_in(node, 0);
        ObjectSet out = 0;
        for (std::size_t o = 0; o < n; ++o) {
          if ((in >> o & 1) && view.has(o, node.concept_id)) out |= single(o);
        }
        vals.emplace_back(std::in_place_index<0>, out);
        break;
      }
      case OpCode::kRelate: {
        std::size_t anchor = singleton_in(node, 0, at);
        ObjectSet out = 0;
        for (std::size_t o = 0; o < n; ++o) {
          if (o != anchor && view.relates(node.concept_id, o, anchor)) out |= single(o);
        }
        vals.emplace_back(std::in_place_index<0>, out);
        break;
      }
      case OpCode::kCount:
        vals.emplace_back(std::in_place_index<1>, std::popcount(set_in(node, 0)));
        break;
      case OpCode::kExist:
        vals.emplace_back(std::in_place_index<2>, set_in(node, 0) != 0);
        break;
      case OpCode::kQuery: {
        std::size_t o = singleton_in(node, 0, at);
        vals.emplace_back(std::in_place_index<3>, view.attribute(o, node.super_concept));
        break;
      }
      case OpCode::kCompareAttr: {
        std::size_t a = singleton_in(node, 0, at);
        std::size_t b = singleton_in(node, 1, at);
        vals.emplace_back(std::in_place_index<2>,
                          view.attribute(a, node.super_concept) ==
                              view.attribute(b, node.super_concept));
        break;
      }
      case OpCode::kCompareCount: {
        int a = std::popcount(set_in(node, 0));
        int b = std::popcount(set_in(node, 1));
        bool r = node.comparison == Comparison::kLess    ? a < b
                 : node.comparison == Comparison::kEqual ? a == b
                                                         : a > b;
        vals.emplace_back(std::in_place_index<2>, r);
        break;
      }
    }
  }
  return vals;
}

Answer to_answer(const Value& v) {
  switch (v.index()) {
    case 1: return std::get<1>(v);
    case 2: return std::get<2>(v);
    case 3: return std::get<3>(v);
    default: throw ExecutionError("program ends in an object set, not an answer");
  }
}

}  // namespace

std::string_view op_name(OpCode op) { return kOpNames.at(static_cast<std::size_t>(op)); }
std::string_view comparison_name(Comparison c) {
  return kComparisonNames.at(static_cast<std::size_t>(c));
}
std::string_view family_name(Family f) { return kFamilyNames.at(static_cast<std::size_t>(f)); }
std::optional<OpCode> parse_op(std::string_view name) { return parse_enum<OpCode>(kOpNames, name); }
std::optional<Comparison> parse_comparison(std::string_view name) {
  return parse_enum<Comparison>(kComparisonNames, name);
}
std::optional<Family> parse_family(std::string_view name) {
  return parse_enum<Family>(kFamilyNames, name);
}

std::string answer_to_string(const Answer& a, const Lexicon& lexicon) {
  switch (a.index()) {
    case 0: return std::to_string(std::get<0>(a));
    case 1: return std::get<1>(a) ? "true" : "false";
    default: return lexicon.concept_info(std::get<2>(a)).name;
  }
}

ValueType typecheck(const Program& program, const Lexicon& lexicon) {
  if (program.nodes.empty()) throw ExecutionError("empty program");
  std::vector<ValueType> types;
  for (std::size_t at = 0; at < program.nodes.size(); ++at) {
    const ProgramNode& node = program.nodes[at];
    OpSignature sig = signature(node.op);
    if (node.inputs.size() != sig.inputs) {
      throw ExecutionError(fmt::format("node {} ({}) takes {} inputs, got {}", at, op_name(node.op),
                                       sig.inputs, node.inputs.size()));
    }
    for (std::size_t in : node.inputs) {
      if (in >= at) throw ExecutionError(fmt::format("node {} reads later node {}", at, in));
      if (types[in] != sig.input) {
        throw ExecutionError(fmt::format("node {} ({}) expects {}, node {} gives {}", at,
                                         op_name(node.op), type_name(sig.input), in,
                                         type_name(types[in])));
      }
    }
    if (node.op == OpCode::kFilter) {
      check_unary_super(node.super_concept, lexicon, at);
      const auto& members = lexicon.super_concept(node.super_concept).concepts;
      if (std::find(members.begin(), members.end(), node.concept_id) == members.end()) {
        throw ExecutionError(fmt::format("node {}: concept {} is not in super concept {}", at,
                                         node.concept_id.value, node.super_concept.value));
      }
    } else if (node.op == OpCode::kRelate) {
      if (node.concept_id.index() >= lexicon.concept_count() ||
          lexicon.concept_info(node.concept_id).arity != Arity::kBinary) {
        throw ExecutionError(
            fmt::format("node {}: {} is not a binary concept", at, node.concept_id.value));
      }
    } else if (node.op == OpCode::kQuery || node.op == OpCode::kCompareAttr) {
      check_unary_super(node.super_concept, lexicon, at);
    }
    types.push_back(sig.output);
  }
  if (types.back() == ValueType::kObjectSet) {
    throw ExecutionError("program ends in an object set, not an answer");
  }
  return types.back();
}

Answer execute(const Program& program, const SceneView& view, const Lexicon& lexicon,
               std::vector<Value>* trace) {
  typecheck(program, lexicon);
  std::vector<Value> vals = run_nodes(program, view);
  Answer a = to_answer(vals.back());
  if (trace) *trace = std::move(vals);
  return a;
}

// ---------------------------------------------------------------------------

GroundTruthView::GroundTruthView(const Scene& scene, const Lexicon& lexicon,
                                 double ambiguity_epsilon)
    : scene_(&scene),
      lexicon_(&lexicon),
      relations_(ground_truth_relations(scene, lexicon, ambiguity_epsilon)) {}

bool GroundTruthView::has(std::size_t object, ConceptId c) const {
  return scene_->objects.at(object).has(c);
}

bool GroundTruthView::relates(ConceptId relation, std::size_t object, std::size_t anchor) const {
  return relations_.holds(lexicon_->binary_slot(relation), object, anchor);
}

ConceptId GroundTruthView::attribute(std::size_t object, SuperConceptId s) const {
  return scene_->objects.at(object).attributes.at(lexicon_->attribute_slot(s));
}

Answer execute_ground_truth(const Program& program, const Scene& scene, const Lexicon& lexicon,
                            double ambiguity_epsilon) {
  GroundTruthView view(scene, lexicon, ambiguity_epsilon);
  return execute(program, view, lexicon);
}

ConceptBinding ConceptBinding::build(const ConceptHierarchy& hierarchy, const Lexicon& lexicon) {
  ConceptBinding b;
  b.concept_to_induced.resize(lexicon.concept_count());
  b.super_concept_to_induced.resize(lexicon.super_concept_count());
  for (std::size_t c = 0; c < lexicon.concept_count(); ++c) {
    const ConceptInfo& info = lexicon.concept_info(ConceptId(static_cast<std::uint32_t>(c)));
    const InducedLevel& level = hierarchy.level(info.arity);
    for (WordId w : info.words) {
      if (auto e = level.concept_of(w)) {
        b.concept_to_induced[c] = *e;
        break;
      }
    }
  }
  // A super concept binds to the induced super concept holding its first
  // bound concept.
  for (SuperConceptId s : lexicon.unary_super_concepts()) {
    for (ConceptId c : lexicon.super_concept(s).concepts) {
      if (auto e = b.concept_to_induced[c.index()]) {
        b.super_concept_to_induced[s.index()] = hierarchy.unary.concept_super[*e];
        break;
      }
    }
  }
  for (const auto& words : hierarchy.unary.concepts) {
    b.induced_unary_to_concept.push_back(lexicon.concept_of(words.front()));
  }
  return b;
}

ConceptTensorView::ConceptTensorView(const ConceptTensors& tensors,
                                     const ConceptHierarchy& hierarchy,
                                     const ConceptBinding& binding, const Lexicon& lexicon)
    : tensors_(&tensors), hierarchy_(&hierarchy), binding_(&binding), lexicon_(&lexicon) {}

std::size_t ConceptTensorView::induced(ConceptId c) const {
  const auto& e = binding_->concept_to_induced.at(c.index());
  if (!e) {
    throw UnanswerableError(
        fmt::format("concept '{}' is not in the induced hierarchy", lexicon_->concept_info(c).name));
  }
  return *e;
}

bool ConceptTensorView::has(std::size_t object, ConceptId c) const {
  return tensors_->ku(object, induced(c)) >= 0.5;
}

bool ConceptTensorView::relates(ConceptId relation, std::size_t object,
                                std::size_t anchor) const {
  return tensors_->kb(object, anchor, induced(relation)) >= 0.5;
}

ConceptId ConceptTensorView::attribute(std::size_t object, SuperConceptId s) const {
  const auto& sup = binding_->super_concept_to_induced.at(s.index());
  if (!sup) {
    throw UnanswerableError(fmt::format("super concept '{}' is not in the induced hierarchy",
                                        lexicon_->super_concept(s).name));
  }
  for (std::size_t e : hierarchy_->unary.super_concepts[*sup]) {
    if (tensors_->ku(object, e) >= 0.5) return binding_->induced_unary_to_concept[e];
  }
  throw ExecutionError(fmt::format("object {} has no concept in induced super concept {}",
                                   object, *sup));
}

Answer execute_concepts(const Program& program, const ConceptTensors& tensors,
                        const ConceptHierarchy& hierarchy, const ConceptBinding& binding,
                        const Lexicon& lexicon) {
  ConceptTensorView view(tensors, hierarchy, binding, lexicon);
  return execute(program, view, lexicon);
}

// ---------------------------------------------------------------------------
// Question generation

namespace {

class QuestionSampler {
 public:
  QuestionSampler(const Scene& scene, Rng& rng, const Lexicon& lex, double epsilon,
                  const QuestionConfig& config)
      : scene_(scene), rng_(rng), lex_(lex), view_(scene, lex, epsilon), config_(config) {}

  std::optional<Program> sample(Family family) {
    program_ = Program{};
    program_.family = family;
    switch (family) {
      case Family::kCount: {
        auto c = chain();
        if (!c) return std::nullopt;
        add(make_node(OpCode::kCount, {*c}));
        break;
      }
      case Family::kExist: {
        auto c = chain();
        if (!c) return std::nullopt;
        add(make_node(OpCode::kExist, {*c}));
        break;
      }
      case Family::kCompareNumber: {
        auto a = chain();
        auto b = a ? chain() : std::nullopt;
        if (!b) return std::nullopt;
        ProgramNode cmp = make_node(OpCode::kCompareCount, {*a, *b});
        cmp.comparison = static_cast<Comparison>(uniform(3));
        add(cmp);
        break;
      }
      case Family::kQueryAttribute: {
        auto t = unique_chain(uniform(scene_.size()));
        if (!t) return std::nullopt;
        ProgramNode q = make_node(OpCode::kQuery, {*t});
        q.super_concept = pick_super();
        add(q);
        break;
      }
      case Family::kCompareAttribute: {
        if (scene_.size() < 2) return std::nullopt;
        std::size_t x = uniform(scene_.size());
        std::size_t y = uniform(scene_.size() - 1);
        if (y >= x) ++y;
        auto a = unique_chain(x);
        auto b = a ? unique_chain(y) : std::nullopt;
        if (!b) return std::nullopt;
        ProgramNode q = make_node(OpCode::kCompareAttr, {*a, *b});
        q.super_concept = pick_super();
        add(q);
        break;
      }
    }
    if (!acceptable()) return std::nullopt;
    return program_;
  }

 private:
  std::size_t uniform(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }

  SuperConceptId pick_super() {
    const auto& s = lex_.unary_super_concepts();
    return s[uniform(s.size())];
  }

  std::size_t add(ProgramNode node) {
    program_.nodes.push_back(std::move(node));
    return program_.nodes.size() - 1;
  }

  ObjectSet current(std::size_t node) {
    return std::get<ObjectSet>(run_nodes(program_, view_)[node]);
  }

  // SCENE followed by filters on the target's own attributes, in random
  // super-concept order, until only the target remains.
  std::optional<std::size_t> unique_chain(std::size_t target) {
    std::size_t at = add(make_node(OpCode::kScene, {}));
    std::vector<SuperConceptId> order = lex_.unary_super_concepts();
    std::shuffle(order.begin(), order.end(), rng_);
    for (SuperConceptId s : order) {
      if (current(at) == single(target)) return at;
      ProgramNode f = make_node(OpCode::kFilter, {at});
      f.super_concept = s;
      f.concept_id = view_.attribute(target, s);
      at = add(f);
    }
    if (current(at) == single(target)) return at;
    return std::nullopt;
  }

  // Optional RELATE from a uniquely described anchor, then up to
  // max_filters filters.
  std::optional<std::size_t> chain() {
    std::size_t at;
    const auto& relations = lex_.binary_concepts();
    std::bernoulli_distribution relate(config_.relate_probability);
    if (!relations.empty() && scene_.size() >= 2 && relate(rng_)) {
      auto anchor = unique_chain(uniform(scene_.size()));
      if (!anchor) return std::nullopt;
      ProgramNode r = make_node(OpCode::kRelate, {*anchor});
      r.concept_id = relations[uniform(relations.size())];
      at = add(r);
    } else {
      at = add(make_node(OpCode::kScene, {}));
    }
    std::size_t filters = uniform(config_.max_filters + 1);
    for (std::size_t k = 0; k < filters; ++k) {
      ProgramNode f = make_node(OpCode::kFilter, {at});
      f.super_concept = pick_super();
      ObjectSet in = current(at);
      std::bernoulli_distribution from_member(0.5);
      if (in != 0 && from_member(rng_)) {
        std::vector<std::size_t> members;
        for (std::size_t o = 0; o < scene_.size(); ++o) {
          if (in >> o & 1) members.push_back(o);
        }
        f.concept_id = view_.attribute(members[uniform(members.size())], f.super_concept);
      } else {
        const auto& cs = lex_.super_concept(f.super_concept).concepts;
        f.concept_id = cs[uniform(cs.size())];
      }
      at = add(f);
    }
    return at;
  }

  bool acceptable() {
    std::vector<Value> vals;
    try {
      typecheck(program_, lex_);
      vals = run_nodes(program_, view_);
    } catch (const ExecutionError&) {
      return false;
    }
    for (const ProgramNode& node : program_.nodes) {
      switch (node.op) {
        case OpCode::kFilter:
          if (std::get<ObjectSet>(vals[node.inputs[0]]) == 0) return false;
          break;
        case OpCode::kRelate: {
          std::size_t anchor = only_member(std::get<ObjectSet>(vals[node.inputs[0]]));
          std::size_t slot = lex_.binary_slot(node.concept_id);
          for (std::size_t o = 0; o < scene_.size(); ++o) {
            if (o != anchor && view_.relations().at(slot, o, anchor) == Relation::kAmbiguous) {
              return false;
            }
          }
          break;
        }
        case OpCode::kExist:
          if (program_.nodes[node.inputs[0]].op == OpCode::kScene) return false;
          break;
        default:
          break;
      }
    }
    return true;
  }

  const Scene& scene_;
  Rng& rng_;
  const Lexicon& lex_;
  GroundTruthView view_;
  const QuestionConfig& config_;
  Program program_;
};

}  // namespace

Question generate_question(const Scene& scene, Rng& rng, const Lexicon& lexicon,
                           double ambiguity_epsilon, Family family,
                           const QuestionConfig& config) {
  if (scene.size() == 0) throw GenerationError("cannot ask about an empty scene");
  QuestionSampler sampler(scene, rng, lexicon, ambiguity_epsilon, config);
  for (std::size_t attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (auto p = sampler.sample(family)) {
      Question q{scene.id, std::move(*p), std::int64_t{0}};
      q.gold = execute_ground_truth(q.program, scene, lexicon, ambiguity_epsilon);
      return q;
    }
  }
  throw GenerationError(fmt::format("no valid '{}' question for scene {} after {} retries",
                                    family_name(family), scene.id, config.max_retries));
}

Question generate_question(const Scene& scene, Rng& rng, const Lexicon& lexicon,
                           double ambiguity_epsilon, const QuestionConfig& config) {
  auto family = kAllFamilies[std::uniform_int_distribution<std::size_t>(0, kFamilyCount - 1)(rng)];
  return generate_question(scene, rng, lexicon, ambiguity_epsilon, family, config);
}

// ---------------------------------------------------------------------------

std::vector<ConceptTensors> all_concept_tensors(const Corpus& corpus,
                                                const ConceptClassifier& classifier,
                                                const ConceptHierarchy& hierarchy) {
  std::vector<ConceptTensors> out(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t s) {
    out[s] = concept_tensors(corpus.entries[s].scene, classifier, hierarchy);
  });
  return out;
}

SufficiencyReport evaluate_sufficiency(const Corpus& corpus, const Lexicon& lexicon,
                                       const ConceptHierarchy& hierarchy,
                                       const std::vector<ConceptTensors>& tensors,
                                       std::size_t n_questions, std::uint64_t seed,
                                       double ambiguity_epsilon, double noise_sigma,
                                       const QuestionConfig& config,
                                       std::vector<QuestionOutcome>* outcomes) {
  if (tensors.size() != corpus.size()) {
    throw ArgumentError(fmt::format("{} tensor sets for {} scenes", tensors.size(), corpus.size()));
  }
  SufficiencyReport report;
  report.noise_sigma = noise_sigma;
  report.n_questions = n_questions;
  if (n_questions == 0) return report;
  if (corpus.entries.empty()) throw ArgumentError("cannot ask questions about an empty corpus");

  const ConceptBinding binding = ConceptBinding::build(hierarchy, lexicon);
  std::vector<QuestionOutcome> results(n_questions);
  parallel_for(n_questions, [&](std::size_t q) {
    const std::size_t s = q % corpus.size();
    Rng rng = make_rng(seed, StreamTag::kQuestion, q);
    QuestionOutcome& out = results[q];
    const Family family =
        kAllFamilies[std::uniform_int_distribution<std::size_t>(0, kFamilyCount - 1)(rng)];
    // A scene may admit no question of the drawn family (e.g. no two uniquely
    // describable objects); move on to the next scene rather than redraw the
    // family, which keeps the family mix uniform.
    std::size_t used = s;
    for (std::size_t k = 0;; ++k) {
      used = (s + k) % corpus.size();
      try {
        out.question = generate_question(corpus.entries[used].scene, rng, lexicon,
                                         ambiguity_epsilon, family, config);
        break;
      } catch (const GenerationError&) {
        if (k + 1 == corpus.size()) throw;
      }
    }
    try {
      out.predicted = execute_concepts(out.question.program, tensors[used], hierarchy, binding,
                                       lexicon);
      out.status = *out.predicted == out.question.gold ? "correct" : "wrong";
    } catch (const UnanswerableError&) {
      out.status = "unanswerable";
    } catch (const ExecutionError&) {
      out.status = "failed";
    }
  });

  for (const auto& r : results) {
    for (FamilyStats* st :
         {&report.families[static_cast<std::size_t>(r.question.program.family)], &report.overall}) {
      ++st->total;
      if (r.status == "correct") ++st->correct;
      if (r.status == "unanswerable") ++st->unanswerable;
      if (r.status == "failed") ++st->failed;
    }
  }
  if (outcomes) *outcomes = std::move(results);
  return report;
}

}  // namespace concept_forge
