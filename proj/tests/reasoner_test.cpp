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

#include <array>
#include <bit>
#include <cmath>
#include <set>

#include "concept_forge/error.hpp"
#include "concept_forge/pipeline.hpp"
#include "concept_forge/reasoner.hpp"
#include "test_util.hpp"

namespace concept_forge {
namespace {

using testing::concept_named;
using testing::make_scene;
using testing::super_named;

ProgramNode node(OpCode op, std::vector<std::size_t> inputs) {
  ProgramNode n;
  n.op = op;
  n.inputs = std::move(inputs);
  return n;
}

ProgramNode filter(const Lexicon& lex, std::size_t input, const char* word) {
  ProgramNode n = node(OpCode::kFilter, {input});
  n.concept_id = concept_named(lex, word);
  n.super_concept = lex.concept_info(n.concept_id).super_concept;
  return n;
}

class ReasonerTest : public ::testing::Test {
 protected:
  Lexicon lex = build_lexicon(OntologyConfig::clevr_default());
  Scene scene = make_scene(lex, 0,
                           {{{"red", "cube", "large", "metal"}, {0.1, 0.1}},
                            {{"red", "sphere", "small", "rubber"}, {0.5, 0.6}},
                            {{"blue", "cube", "small", "metal"}, {0.9, 0.3}}});
  Answer run(const Program& p) const { return execute_ground_truth(p, scene, lex, 0.02); }
};

TEST_F(ReasonerTest, CountRed) {
  Program p{Family::kCount,
            {node(OpCode::kScene, {}), filter(lex, 0, "red"), node(OpCode::kCount, {1})}};
  EXPECT_EQ(run(p), Answer(std::int64_t{2}));
  EXPECT_EQ(typecheck(p, lex), ValueType::kInteger);
}

TEST_F(ReasonerTest, QueryShapeOfRedCube) {
  Program p{Family::kQueryAttribute,
            {node(OpCode::kScene, {}), filter(lex, 0, "red"), filter(lex, 1, "cube"),
             node(OpCode::kQuery, {2})}};
  p.nodes[3].super_concept = super_named(lex, "shape");
  EXPECT_EQ(run(p), Answer(concept_named(lex, "cube")));
  EXPECT_EQ(answer_to_string(run(p), lex), "cube");
}

TEST_F(ReasonerTest, CompareCountOfIdenticalFiltersIsEqual) {
  Program p{Family::kCompareNumber,
            {node(OpCode::kScene, {}), filter(lex, 0, "metal"), node(OpCode::kScene, {}),
             filter(lex, 2, "metal"), node(OpCode::kCompareCount, {1, 3})}};
  p.nodes[4].comparison = Comparison::kEqual;
  EXPECT_EQ(run(p), Answer(true));
  p.nodes[4].comparison = Comparison::kLess;
  EXPECT_EQ(run(p), Answer(false));
}

TEST_F(ReasonerTest, RelateAndCompareAttribute) {
  // objects right of the red sphere: only the blue cube
  Program p{Family::kCount,
            {node(OpCode::kScene, {}), filter(lex, 0, "sphere"), node(OpCode::kRelate, {1}),
             node(OpCode::kCount, {2})}};
  p.nodes[2].concept_id = concept_named(lex, "right");
  EXPECT_EQ(run(p), Answer(std::int64_t{1}));
  p.nodes[2].concept_id = concept_named(lex, "front");
  EXPECT_EQ(run(p), Answer(std::int64_t{2}));
  Program same{Family::kCompareAttribute,
               {node(OpCode::kScene, {}), filter(lex, 0, "large"), node(OpCode::kScene, {}),
                filter(lex, 2, "blue"), node(OpCode::kCompareAttr, {1, 3})}};
  same.nodes[4].super_concept = super_named(lex, "shape");
  EXPECT_EQ(run(same), Answer(true));
  same.nodes[4].super_concept = super_named(lex, "color");
  EXPECT_EQ(run(same), Answer(false));
}

TEST_F(ReasonerTest, TypeAndRuntimeErrors) {
  Program ends_in_set{Family::kCount, {node(OpCode::kScene, {}), filter(lex, 0, "red")}};
  EXPECT_THROW(run(ends_in_set), ExecutionError);
  Program wrong_super{Family::kCount,
                      {node(OpCode::kScene, {}), filter(lex, 0, "red"), node(OpCode::kCount, {1})}};
  wrong_super.nodes[1].super_concept = super_named(lex, "shape");
  EXPECT_THROW(typecheck(wrong_super, lex), ExecutionError);
  Program count_of_count{Family::kCount,
                         {node(OpCode::kScene, {}), node(OpCode::kCount, {0}),
                          node(OpCode::kCount, {1})}};
  EXPECT_THROW(run(count_of_count), ExecutionError);
  Program forward_ref{Family::kCount, {node(OpCode::kCount, {1}), node(OpCode::kScene, {})}};
  EXPECT_THROW(run(forward_ref), ExecutionError);
  Program unary_relate{Family::kCount,
                       {node(OpCode::kScene, {}), filter(lex, 0, "sphere"),
                        node(OpCode::kRelate, {1}), node(OpCode::kCount, {2})}};
  unary_relate.nodes[2].concept_id = concept_named(lex, "red");
  EXPECT_THROW(run(unary_relate), ExecutionError);
  // QUERY over the two red objects
  Program not_single{Family::kQueryAttribute,
                     {node(OpCode::kScene, {}), filter(lex, 0, "red"), node(OpCode::kQuery, {1})}};
  not_single.nodes[2].super_concept = super_named(lex, "shape");
  EXPECT_THROW(run(not_single), ExecutionError);
}

TEST(Names, RoundTrip) {
  for (Family f : kAllFamilies) EXPECT_EQ(parse_family(family_name(f)), f);
  for (auto op : {OpCode::kScene, OpCode::kFilter, OpCode::kRelate, OpCode::kCount, OpCode::kExist,
                  OpCode::kQuery, OpCode::kCompareAttr, OpCode::kCompareCount}) {
    EXPECT_EQ(parse_op(op_name(op)), op);
  }
  for (auto c : {Comparison::kLess, Comparison::kEqual, Comparison::kGreater}) {
    EXPECT_EQ(parse_comparison(comparison_name(c)), c);
  }
  EXPECT_FALSE(parse_op("jump").has_value());
  EXPECT_EQ(family_name(Family::kCompareNumber), "comp num");
}

// Independent interpreter: reads attributes and coordinates straight off the
// scene, without SceneView or RelationTable.
struct Brute {
  const Scene& scene;
  const Lexicon& lex;
  double eps;

  bool rel(ConceptId r, std::size_t o, std::size_t a) const {
    const auto& info = lex.concept_info(r);
    const auto& sup = lex.super_concept(info.super_concept);
    const Point& p = scene.objects[o].position;
    const Point& q = scene.objects[a].position;
    double d = sup.axis == Axis::kX ? p.x - q.x : p.y - q.y;
    if (o == a || std::abs(d) <= eps) return false;
    return info.upper ? d > 0 : d < 0;
  }

  std::vector<std::variant<std::set<std::size_t>, std::int64_t, bool, ConceptId>> eval(
      const Program& p) const {
    std::vector<std::variant<std::set<std::size_t>, std::int64_t, bool, ConceptId>> v;
    auto set_at = [&](std::size_t i) { return std::get<std::set<std::size_t>>(v[i]); };
    auto only = [&](std::size_t i) {
      auto s = set_at(i);
      EXPECT_EQ(s.size(), 1u);
      return *s.begin();
    };
    auto attr = [&](std::size_t o, SuperConceptId s) {
      for (ConceptId c : scene.objects[o].attributes) {
        if (lex.concept_info(c).super_concept == s) return c;
      }
      return ConceptId{};
    };
    for (const auto& n : p.nodes) {
      switch (n.op) {
        case OpCode::kScene: {
          std::set<std::size_t> all;
          for (std::size_t o = 0; o < scene.size(); ++o) all.insert(o);
          v.emplace_back(all);
          break;
        }
        case OpCode::kFilter: {
          std::set<std::size_t> out;
          for (std::size_t o : set_at(n.inputs[0])) {
            if (attr(o, n.super_concept) == n.concept_id) out.insert(o);
          }
          v.emplace_back(out);
          break;
        }
        case OpCode::kRelate: {
          std::size_t a = only(n.inputs[0]);
          std::set<std::size_t> out;
          for (std::size_t o = 0; o < scene.size(); ++o) {
            if (rel(n.concept_id, o, a)) out.insert(o);
          }
          v.emplace_back(out);
          break;
        }
        case OpCode::kCount:
          v.emplace_back(static_cast<std::int64_t>(set_at(n.inputs[0]).size()));
          break;
        case OpCode::kExist:
          v.emplace_back(!set_at(n.inputs[0]).empty());
          break;
        case OpCode::kQuery:
          v.emplace_back(attr(only(n.inputs[0]), n.super_concept));
          break;
        case OpCode::kCompareAttr:
          v.emplace_back(attr(only(n.inputs[0]), n.super_concept) ==
                         attr(only(n.inputs[1]), n.super_concept));
          break;
        case OpCode::kCompareCount: {
          auto a = set_at(n.inputs[0]).size();
          auto b = set_at(n.inputs[1]).size();
          bool r = n.comparison == Comparison::kLess    ? a < b
                   : n.comparison == Comparison::kEqual ? a == b
                                                        : a > b;
          v.emplace_back(r);
          break;
        }
      }
    }
    return v;
  }

  Answer answer(const Program& p) const {
    auto v = eval(p).back();
    if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
    if (auto* b = std::get_if<bool>(&v)) return *b;
    return std::get<ConceptId>(v);
  }
};

TEST(GenerateQuestion, AgreesWithBruteForceExecutor) {
  Lexicon lex = build_lexicon(OntologyConfig::clevr_default());
  GenerationConfig g;
  std::size_t asked = 0;
  for (std::uint64_t q = 0; q < 1000; ++q) {
    Rng srng = make_rng(31, StreamTag::kScene, q % 100);
    Scene s = generate_scene(srng, lex, g, static_cast<std::uint32_t>(q % 100));
    Rng rng = make_rng(31, StreamTag::kQuestion, q);
    Question question;
    try {
      question = generate_question(s, rng, lex, g.ambiguity_epsilon);
    } catch (const GenerationError&) {
      continue;  // e.g. no two uniquely describable objects
    }
    ++asked;
    Brute brute{s, lex, g.ambiguity_epsilon};
    ASSERT_EQ(question.gold, brute.answer(question.program)) << "question " << q;
    auto trace = brute.eval(question.program);
    for (std::size_t i = 0; i < question.program.nodes.size(); ++i) {
      const auto& n = question.program.nodes[i];
      if (n.op == OpCode::kFilter) {
        EXPECT_FALSE(std::get<std::set<std::size_t>>(trace[n.inputs[0]]).empty());
      }
      if (n.op == OpCode::kExist) {
        EXPECT_NE(question.program.nodes[n.inputs[0]].op, OpCode::kScene);
      }
      if (n.op == OpCode::kCount) {
        EXPECT_LE(std::get<std::int64_t>(trace[i]), static_cast<std::int64_t>(s.size()));
      }
      if (n.op == OpCode::kExist) {
        auto& in = std::get<std::set<std::size_t>>(trace[n.inputs[0]]);
        EXPECT_EQ(std::get<bool>(trace[i]), !in.empty());
      }
    }
  }
  EXPECT_GT(asked, 950u);
}

TEST(GenerateQuestion, FamilyDrawIsUniform) {
  Lexicon lex = build_lexicon(OntologyConfig::clevr_default());
  GenerationConfig g;
  std::array<std::size_t, kFamilyCount> counts{};
  const std::size_t n = 10000;
  std::vector<Scene> scenes;
  for (std::uint32_t i = 0; i < 50; ++i) {
    Rng srng = make_rng(2, StreamTag::kScene, i);
    scenes.push_back(generate_scene(srng, lex, g, i));
  }
  std::size_t done = 0;
  for (std::uint64_t q = 0; done < n; ++q) {
    Rng rng = make_rng(2, StreamTag::kQuestion, q);
    try {
      Question question = generate_question(scenes[q % scenes.size()], rng, lex,
                                            g.ambiguity_epsilon);
      ++counts[static_cast<std::size_t>(question.program.family)];
      ++done;
    } catch (const GenerationError&) {
      // the drawn family has no valid question on this scene
    }
  }
  const double p = 1.0 / kFamilyCount;
  for (std::size_t f = 0; f < kFamilyCount; ++f) {
    EXPECT_LT(std::abs(counts[f] - n * p), 5 * std::sqrt(n * p * (1 - p))) << f;
  }
}

TEST(GenerateQuestion, ImpossibleFamilyIsGenerationError) {
  Lexicon lex = build_lexicon(OntologyConfig::clevr_default());
  Scene one = make_scene(lex, 0, {{{"red", "cube", "large", "metal"}, {0.5, 0.5}}});
  Rng rng = make_rng(1, StreamTag::kQuestion, 0);
  QuestionConfig cfg;
  cfg.max_retries = 5;
  EXPECT_THROW(generate_question(one, rng, lex, 0.02, Family::kCompareAttribute, cfg),
               GenerationError);
}

class SufficiencyTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    ws = new Workspace(testing::run_config(5, 0.0, 200));
    corpus = new Corpus(ws->generate());
    result = new InductionResult(ws->induce(*corpus));
  }
  static void TearDownTestSuite() {
    delete result;
    delete corpus;
    delete ws;
  }
  static Workspace* ws;
  static Corpus* corpus;
  static InductionResult* result;
};

Workspace* SufficiencyTest::ws = nullptr;
Corpus* SufficiencyTest::corpus = nullptr;
InductionResult* SufficiencyTest::result = nullptr;

TEST_F(SufficiencyTest, NoiselessAgreementIsTotal) {
  std::vector<QuestionOutcome> outcomes;
  auto tensors = ws->tensors(*corpus, result->boundaries, result->hierarchy);
  SufficiencyReport r = evaluate_sufficiency(*corpus, ws->lexicon(), result->hierarchy, tensors,
                                             1500, 3, 0.02, 0.0, {}, &outcomes);
  EXPECT_EQ(r.overall.total, 1500u);
  EXPECT_EQ(r.overall.correct, 1500u);
  std::size_t sum = 0;
  for (Family f : kAllFamilies) {
    const auto& st = r.families[static_cast<std::size_t>(f)];
    EXPECT_GT(st.total, 0u) << family_name(f);
    EXPECT_EQ(st.agreement(), 1.0);
    sum += st.total;
  }
  EXPECT_EQ(sum, 1500u);
  ASSERT_EQ(outcomes.size(), 1500u);
  for (const auto& o : outcomes) EXPECT_EQ(o.status, "correct");
}

TEST_F(SufficiencyTest, ReportIsDeterministic) {
  auto tensors = ws->tensors(*corpus, result->boundaries, result->hierarchy);
  std::vector<QuestionOutcome> a;
  std::vector<QuestionOutcome> b;
  evaluate_sufficiency(*corpus, ws->lexicon(), result->hierarchy, tensors, 300, 9, 0.02, 0, {}, &a);
  evaluate_sufficiency(*corpus, ws->lexicon(), result->hierarchy, tensors, 300, 9, 0.02, 0, {}, &b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].question.program, b[i].question.program);
    EXPECT_EQ(a[i].question.scene, b[i].question.scene);
  }
}

TEST_F(SufficiencyTest, FlippedTensorBitChangesQuery) {
  const Lexicon& lex = ws->lexicon();
  const auto& h = result->hierarchy;
  ConceptBinding binding = ConceptBinding::build(h, lex);
  const Scene& s = corpus->entries[0].scene;
  ConceptTensors k = concept_tensors(s, ws->classifier(result->boundaries), h);
  // Flipping the queried attribute must not change which object the filter
  // chain selects, so the chain may not filter on the queried block.
  Question q;
  for (std::uint64_t i = 0;; ++i) {
    ASSERT_LT(i, 1000u);
    Rng rng = make_rng(4, StreamTag::kQuestion, i);
    q = generate_question(s, rng, lex, 0.02, Family::kQueryAttribute);
    const SuperConceptId queried = q.program.nodes.back().super_concept;
    if (std::none_of(q.program.nodes.begin(), q.program.nodes.end(), [&](const ProgramNode& n) {
          return n.op == OpCode::kFilter && n.super_concept == queried;
        })) {
      break;
    }
  }
  ASSERT_EQ(execute_concepts(q.program, k, h, binding, lex), q.gold);
  // the queried object is the single member of the QUERY input
  std::vector<Value> trace;
  execute(q.program, GroundTruthView(s, lex, 0.02), lex, &trace);
  const ProgramNode& query = q.program.nodes.back();
  ObjectSet target = std::get<ObjectSet>(trace[query.inputs[0]]);
  std::size_t obj = static_cast<std::size_t>(std::countr_zero(target));
  std::size_t block = *binding.super_concept_to_induced[query.super_concept.index()];
  const auto& members = h.unary.super_concepts[block];
  std::size_t on = *binding.concept_to_induced[std::get<ConceptId>(q.gold).index()];
  std::size_t other = members[0] == on ? members[1] : members[0];
  k.unary[obj * k.unary_concepts + on] = 0.0;
  k.unary[obj * k.unary_concepts + other] = 1.0;
  Answer flipped = execute_concepts(q.program, k, h, binding, lex);
  EXPECT_NE(flipped, q.gold);
  EXPECT_EQ(flipped, Answer(binding.induced_unary_to_concept[other]));
}

TEST_F(SufficiencyTest, ExcludedWordMakesQuestionUnanswerable) {
  const Lexicon& lex = ws->lexicon();
  ConceptHierarchy h = result->hierarchy;
  // drop the purple concept from the color block
  std::vector<std::vector<WordId>> concepts;
  std::vector<std::vector<std::size_t>> supers;
  for (const auto& block : h.unary.super_concepts) {
    std::vector<std::size_t> kept;
    for (std::size_t c : block) {
      if (h.unary.concepts[c].front() == lex.word_id("purple")) continue;
      kept.push_back(concepts.size());
      concepts.push_back(h.unary.concepts[c]);
    }
    supers.push_back(kept);
  }
  h.unary = make_level(Arity::kUnary, concepts, supers, {lex.word_id("purple")});
  ConceptBinding binding = ConceptBinding::build(h, lex);
  const Scene& s = corpus->entries[0].scene;
  ConceptTensors k = concept_tensors(s, ws->classifier(result->boundaries), h);
  Program p{Family::kExist,
            {node(OpCode::kScene, {}), filter(lex, 0, "purple"), node(OpCode::kExist, {1})}};
  EXPECT_THROW(execute_concepts(p, k, h, binding, lex), UnanswerableError);
  Program fine{Family::kExist,
               {node(OpCode::kScene, {}), filter(lex, 0, "red"), node(OpCode::kExist, {1})}};
  EXPECT_NO_THROW(execute_concepts(fine, k, h, binding, lex));

  auto tensors = all_concept_tensors(*corpus, ws->classifier(result->boundaries), h);
  SufficiencyReport r =
      evaluate_sufficiency(*corpus, lex, h, tensors, 2000, 3, 0.02, 0.0);
  EXPECT_EQ(r.overall.total, 2000u);
  EXPECT_GT(r.overall.unanswerable, 0u);
  EXPECT_LT(r.overall.correct, r.overall.total);
  EXPECT_LE(r.overall.correct + r.overall.unanswerable + r.overall.failed, r.overall.total);
}

}  // namespace
}  // namespace concept_forge
