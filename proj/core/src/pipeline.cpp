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

#include "concept_forge/pipeline.hpp"

#include "concept_forge/error.hpp"

namespace concept_forge {

namespace {

template <typename F>
auto stage(const char* name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& err) {
    throw StageError(name, err.what());
  }
}

}  // namespace

Workspace::Workspace(RunConfig config)
    : config_(std::move(config)),
      lexicon_(build_lexicon(config_.ontology)),
      simulator_(lexicon_, config_.noise, config_.seed(),
                 config_.ontology.generation.ambiguity_epsilon) {}

Corpus Workspace::generate() const {
  return stage("generate", [&] { return generate_corpus(lexicon_, config_.ontology.generation); });
}

InductionResult Workspace::induce(const Corpus& corpus) const {
  InductionResult r;
  r.store = stage("collect", [&] { return collect_logits(corpus, simulator_); });
  BoundaryOptions bopt;
  bopt.fit = config_.induction.em;
  bopt.min_samples = config_.induction.min_samples;
  bopt.min_separation_d = config_.induction.min_separation_d;
  r.boundaries = stage("boundaries", [&] { return fit_boundaries(r.store, lexicon_, bopt); });
  r.labels = stage("label", [&] { return label_corpus(corpus, r.boundaries, simulator_); });
  ConceptClassifier clf = classifier(r.boundaries);
  r.gamma = stage("code", [&] { return binary_code(corpus, clf); });
  r.correlations = stage("correlate", [&] { return correlation_sets(r.gamma); });
  r.hierarchy = stage("cluster", [&] {
    return induce_hierarchy(r.gamma, r.boundaries, lexicon_, config_.induction.em);
  });
  return r;
}

ConceptClassifier Workspace::classifier(const BoundaryMap& boundaries) const {
  return ConceptClassifier(simulator_, boundaries, config_.induction.tau);
}

std::vector<ConceptTensors> Workspace::tensors(const Corpus& corpus, const BoundaryMap& boundaries,
                                               const ConceptHierarchy& hierarchy) const {
  ConceptClassifier clf = classifier(boundaries);
  return stage("tensors", [&] { return all_concept_tensors(corpus, clf, hierarchy); });
}

SufficiencyReport Workspace::evaluate(const Corpus& corpus, const BoundaryMap& boundaries,
                                      const ConceptHierarchy& hierarchy,
                                      std::vector<QuestionOutcome>* outcomes) const {
  auto k = tensors(corpus, boundaries, hierarchy);
  return stage("evaluate", [&] {
    return evaluate_sufficiency(corpus, lexicon_, hierarchy, k, config_.evaluation.questions,
                                config_.seed(), config_.ontology.generation.ambiguity_epsilon,
                                config_.noise.sigma, config_.evaluation.question, outcomes);
  });
}

}  // namespace concept_forge
