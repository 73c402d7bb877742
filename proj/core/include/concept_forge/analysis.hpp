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

// Concept-space geometry (distance, minus/plus, analogy retrieval) and the
// synonym classification and ranking metrics.

#ifndef CONCEPT_FORGE_ANALYSIS_HPP_
#define CONCEPT_FORGE_ANALYSIS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "concept_forge/hierarchy.hpp"
#include "concept_forge/ontology.hpp"

namespace concept_forge {

// Partition of a concept vector into super-concept blocks.
struct BlockLayout {
  std::vector<std::size_t> sizes;

  std::size_t block_count() const { return sizes.size(); }
  std::size_t width() const;
  std::size_t offset(std::size_t block) const;
  bool operator==(const BlockLayout&) const = default;

  // Unary super concepts of the lexicon, concepts in declaration order.
  static BlockLayout from_lexicon(const Lexicon& lexicon);
  // Unary super concepts of an induced level, matching its K^u columns.
  static BlockLayout from_level(const InducedLevel& level);
};

// Zero-one vector whose blocks are one-hot.
class ConceptVector {
 public:
  // Throws ShapeError if `bits` does not fit the layout or a block is not
  // one-hot.
  ConceptVector(BlockLayout layout, std::vector<std::uint8_t> bits);
  // One chosen concept index per block.
  static ConceptVector from_choices(BlockLayout layout, std::span<const std::size_t> choices);

  const BlockLayout& layout() const { return layout_; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::size_t choice(std::size_t block) const;
  bool operator==(const ConceptVector&) const = default;

 private:
  BlockLayout layout_;
  std::vector<std::uint8_t> bits_;
};

// Like ConceptVector, but a block may be all zero (BLANK).
class Template {
 public:
  Template(BlockLayout layout, std::vector<std::uint8_t> bits);

  const BlockLayout& layout() const { return layout_; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  bool blank(std::size_t block) const;
  bool all_blank() const;
  bool operator==(const Template&) const = default;

 private:
  BlockLayout layout_;
  std::vector<std::uint8_t> bits_;
};

// Ground-truth vector of an object.
ConceptVector concept_vector(const ObjectInstance& object, const Lexicon& lexicon);

// Induced vector of object i read from K^u. Throws ShapeError if a block of
// the row is not one-hot.
ConceptVector concept_vector(const ConceptTensors& tensors, std::size_t object,
                             const InducedLevel& unary_level);

// Half the XOR popcount: the number of blocks that differ.
double semantic_distance(const ConceptVector& k1, const ConceptVector& k2);

// Blocks where k1 and k2 agree become BLANK; the rest keep k1.
Template concept_minus(const ConceptVector& k1, const ConceptVector& k2);

// BLANK blocks of `t` are filled from k2.
ConceptVector concept_plus(const Template& t, const ConceptVector& k2);

struct AnalogyResult {
  std::size_t index = 0;
  double distance = 0.0;
};

// argmin over `pool` of the distance to (k0 \ k_sub) + k_add, lowest index
// on ties. Throws ArgumentError on an empty pool, ShapeError on mismatched
// layouts.
AnalogyResult analogy_retrieve(std::span<const ConceptVector> pool, const ConceptVector& k0,
                               const ConceptVector& k_sub, const ConceptVector& k_add);

// One annotated word: two synonyms, two uncorrelated words, the human
// similarity rank of each of the four candidates (0 = most similar), and
// the score of each candidate under some similarity source.
struct RankingRecord {
  std::string word;
  std::array<std::string, 4> candidates;  // positives first, then negatives
  std::array<std::size_t, 4> human_order{0, 1, 2, 3};
  std::array<double, 4> scores{};

  static constexpr std::size_t kPositives = 2;
};

// Whitespace separated, one record per line:
//   word pos1 pos2 neg1 neg2 [rank1 rank2 rank3 rank4]
// Ranks default to 0 1 2 3. Blank lines and '#' comments are ignored.
// Throws RecordError with the line number on malformed input.
std::vector<RankingRecord> parse_annotations(std::istream& in);
std::string format_annotations(std::span<const RankingRecord> records);

// Synthetic annotations from the lexicon: every unary word whose concept
// has at least two other synonyms, paired with the first two words of
// other concepts in its super concept.
std::vector<RankingRecord> synthetic_annotations(const Lexicon& lexicon);

// Fills scores with P(candidate | word) from the table. Throws RecordError
// if a word is missing from the table.
void score_from_conditional(std::span<RankingRecord> records, const CorrelationTable& table,
                            const Lexicon& lexicon);

struct AccuracyReport {
  double positive = 0.0;
  double negative = 0.0;
  double combined = 0.0;
};

// Per-word mean of 1(R > t) over synonyms and 1(R < t) over uncorrelated
// words, averaged over words. Throws RecordError on an empty record list.
AccuracyReport classification_accuracy(std::span<const RankingRecord> records, double t = 0.5);

// Discordant pairs between the human order and the order by descending
// score, over C(4, 2).
double kendall_tau_distance(const std::array<std::size_t, 4>& a,
                            const std::array<std::size_t, 4>& b);

struct RankingReport {
  double distance = 0.0;
  // Candidate pairs with equal scores, resolved by human order.
  std::size_t ties = 0;
};

// Mean normalized Kendall tau distance over records.
RankingReport ranking_distance(std::span<const RankingRecord> records);

// Induced rank of each candidate by descending score, ties by human rank.
std::array<std::size_t, 4> induced_order(const RankingRecord& record);

}  // namespace concept_forge

#endif  // CONCEPT_FORGE_ANALYSIS_HPP_
