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

// Artifact formats. Every artifact records the hash of the configuration
// that produced it: JSON objects in a "config_hash" field, JSON-lines files
// in a leading header record, CSV and text files in a leading '#' line.
// Writers are deterministic; readers throw ArtifactError naming the problem.

#ifndef CONCEPT_FORGE_IO_HPP_
#define CONCEPT_FORGE_IO_HPP_

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "concept_forge/analysis.hpp"
#include "concept_forge/config.hpp"
#include "concept_forge/hierarchy.hpp"
#include "concept_forge/induction.hpp"
#include "concept_forge/ontology.hpp"
#include "concept_forge/reasoner.hpp"

namespace concept_forge {

// Whole-file helpers. read_file throws ArtifactError for a missing file.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Header record of a JSON-lines artifact.
std::string jsonl_header(std::string_view kind, std::string_view config_hash);
// Reads and checks the header; returns its config hash.
std::string read_jsonl_header(std::istream& in, std::string_view kind);

// One scene per line: objects with position and attribute concept names,
// plus the mention bag.
void write_corpus(std::ostream& out, const Corpus& corpus, const Lexicon& lexicon,
                  std::string_view config_hash);
Corpus read_corpus(std::istream& in, const Lexicon& lexicon);

std::string manifest_json(const RunConfig& config, const Corpus& corpus,
                          std::string_view corpus_sha256);

std::string boundaries_json(const BoundaryMap& boundaries, const Lexicon& lexicon,
                            std::string_view config_hash);
BoundaryMap parse_boundaries(std::string_view text, const Lexicon& lexicon);

// Binary Gamma file: the 8-byte magic "CFGAMMA1", a little-endian uint32
// header length, a JSON header (row words, column count, arity, per-scene
// object counts, config hash), then each row as little-endian uint64 words.
void write_gamma(std::ostream& out, const GammaMatrix& gamma, const Corpus& corpus,
                 const Lexicon& lexicon, std::string_view config_hash);
GammaMatrix read_gamma(std::istream& in, const Lexicon& lexicon);

void write_labels(std::ostream& out, const LabeledSets& labels, Arity arity,
                  const Lexicon& lexicon, std::string_view config_hash);

std::string hierarchy_json(const ConceptHierarchy& hierarchy, const Lexicon& lexicon,
                           std::string_view config_hash);
// Restores the concept levels; pair assignments are not stored.
ConceptHierarchy parse_hierarchy(std::string_view text, const Lexicon& lexicon);

// Square matrix CSV with word headers; `conditional` selects P(col | row)
// instead of theta.
std::string correlation_csv(const CorrelationTable& table, const Lexicon& lexicon,
                            bool conditional, std::string_view config_hash);
// Grey-scale heatmap of theta.
std::string correlation_svg(const CorrelationTable& table, const Lexicon& lexicon,
                            std::string_view config_hash);

std::string excluded_report(const BoundaryMap& boundaries, const ConceptHierarchy& hierarchy,
                            const Lexicon& lexicon, std::string_view config_hash);

std::string program_json(const Program& program, const Lexicon& lexicon);
Program parse_program(std::string_view text, const Lexicon& lexicon);
std::string answer_json(const Answer& answer, const Lexicon& lexicon);

void write_questions(std::ostream& out, const std::vector<QuestionOutcome>& outcomes,
                     const Lexicon& lexicon, std::string_view config_hash);

std::string sufficiency_csv(const SufficiencyReport& report, std::string_view config_hash);
std::string sufficiency_summary(const SufficiencyReport& report, std::string_view config_hash);

}  // namespace concept_forge

#endif  // CONCEPT_FORGE_IO_HPP_
