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

// End-to-end orchestration over one run configuration.

#ifndef CONCEPT_FORGE_PIPELINE_HPP_
#define CONCEPT_FORGE_PIPELINE_HPP_

#include <vector>

#include "concept_forge/attention_sim.hpp"
#include "concept_forge/config.hpp"
#include "concept_forge/hierarchy.hpp"
#include "concept_forge/induction.hpp"
#include "concept_forge/ontology.hpp"
#include "concept_forge/reasoner.hpp"

namespace concept_forge {

struct InductionResult {
  LogitSampleStore store;
  BoundaryMap boundaries;
  LabeledSets labels;
  GammaMatrices gamma;
  CorrelationSets correlations;
  ConceptHierarchy hierarchy;
};

// Owns the lexicon and the attention simulator of a configuration. Pinned in
// memory because the simulator refers to the lexicon.
class Workspace {
 public:
  explicit Workspace(RunConfig config);
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  const RunConfig& config() const { return config_; }
  const Lexicon& lexicon() const { return lexicon_; }
  const AttentionSimulator& simulator() const { return simulator_; }

  Corpus generate() const;

  // collect, boundaries, label, code, correlate, cluster, concepts, super
  // concepts. A failing stage throws StageError naming it.
  InductionResult induce(const Corpus& corpus) const;

  ConceptClassifier classifier(const BoundaryMap& boundaries) const;

  std::vector<ConceptTensors> tensors(const Corpus& corpus, const BoundaryMap& boundaries,
                                      const ConceptHierarchy& hierarchy) const;

  SufficiencyReport evaluate(const Corpus& corpus, const BoundaryMap& boundaries,
                             const ConceptHierarchy& hierarchy,
                             std::vector<QuestionOutcome>* outcomes = nullptr) const;

 private:
  RunConfig config_;
  Lexicon lexicon_;
  AttentionSimulator simulator_;
};

}  // namespace concept_forge

#endif  // CONCEPT_FORGE_PIPELINE_HPP_
