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

// Run configuration: TOML in, canonical JSON and a SHA-256 hash out.

#ifndef CONCEPT_FORGE_CONFIG_HPP_
#define CONCEPT_FORGE_CONFIG_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "concept_forge/attention_sim.hpp"
#include "concept_forge/gmm.hpp"
#include "concept_forge/ontology.hpp"
#include "concept_forge/reasoner.hpp"

namespace concept_forge {

struct InductionConfig {
  double tau = 0.5;
  FitOptions em;
  double min_separation_d = 2.0;
  std::size_t min_samples = 0;
};

struct EvaluationConfig {
  std::size_t questions = 5000;
  QuestionConfig question;
};

struct RunConfig {
  OntologyConfig ontology = OntologyConfig::clevr_default();
  LogitNoiseModel noise;
  InductionConfig induction;
  EvaluationConfig evaluation;

  std::uint64_t seed() const { return ontology.generation.seed; }
};

// Every section is optional; a file without [[super_concepts]] keeps the
// default CLEVR vocabulary. Unknown keys, wrong types and out-of-range values
// throw ConfigError carrying the offending line.
RunConfig parse_config(std::string_view toml_text);
RunConfig load_config(const std::filesystem::path& path);

// The effective configuration with sorted keys, no whitespace.
std::string canonical_json(const RunConfig& config);
// Lowercase hex SHA-256 of canonical_json.
std::string config_hash(const RunConfig& config);
std::string sha256_hex(std::string_view data);

// A TOML rendering that parse_config reads back to an equal configuration.
std::string to_toml(const RunConfig& config);

}  // namespace concept_forge

#endif  // CONCEPT_FORGE_CONFIG_HPP_
