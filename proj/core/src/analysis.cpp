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

#include "concept_forge/analysis.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "concept_forge/error.hpp"

namespace concept_forge {

namespace {

std::size_t block_popcount(const BlockLayout& layout, const std::vector<std::uint8_t>& bits,
                           std::size_t block) {
  std::size_t off = layout.offset(block);
  std::size_t n = 0;
  for (std::size_t i = 0; i < layout.sizes[block]; ++i) n += bits[off + i] != 0;
  return n;
}

void check_bits(const BlockLayout& layout, const std::vector<std::uint8_t>& bits,
                bool allow_blank) {
  if (bits.size() != layout.width()) {
    throw ShapeError(fmt::format("{} bits for a layout of width {}", bits.size(), layout.width()));
  }
  for (std::uint8_t b : bits) {
    if (b > 1) throw ShapeError("concept vector entries must be 0 or 1");
  }
  for (std::size_t b = 0; b < layout.block_count(); ++b) {
    std::size_t ones = block_popcount(layout, bits, b);
    if (ones > 1 || (ones == 0 && !allow_blank)) {
      throw ShapeError(fmt::format("block {} has {} set entries, expected one", b, ones));
    }
  }
}

void same_layout(const BlockLayout& a, const BlockLayout& b) {
  if (!(a == b)) {
    throw ShapeError(fmt::format("block layouts differ ({} vs {} blocks, widths {} vs {})",
                                 a.block_count(), b.block_count(), a.width(), b.width()));
  }
}

bool block_equal(const BlockLayout& layout, const std::vector<std::uint8_t>& a,
                 const std::vector<std::uint8_t>& b, std::size_t block) {
  std::size_t off = layout.offset(block);
  return std::equal(a.begin() + off, a.begin() + off + layout.sizes[block], b.begin() + off);
}

}  // namespace

std::size_t BlockLayout::width() const { return std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}); }

std::size_t BlockLayout::offset(std::size_t block) const {
  return std::accumulate(sizes.begin(), sizes.begin() + block, std::size_t{0});
}

BlockLayout BlockLayout::from_lexicon(const Lexicon& lexicon) {
  BlockLayout l;
  for (SuperConceptId s : lexicon.unary_super_concepts()) {
    l.sizes.push_back(lexicon.super_concept(s).concepts.size());
  }
  return l;
}

BlockLayout BlockLayout::from_level(const InducedLevel& level) {
  BlockLayout l;
  for (const auto& s : level.super_concepts) l.sizes.push_back(s.size());
  return l;
}

ConceptVector::ConceptVector(BlockLayout layout, std::vector<std::uint8_t> bits)
    : layout_(std::move(layout)), bits_(std::move(bits)) {
  check_bits(layout_, bits_, false);
}

ConceptVector ConceptVector::from_choices(BlockLayout layout,
                                          std::span<const std::size_t> choices) {
  if (choices.size() != layout.block_count()) {
    throw ShapeError(fmt::format("{} choices for {} blocks", choices.size(), layout.block_count()));
  }
  std::vector<std::uint8_t> bits(layout.width(), 0);
  for (std::size_t b = 0; b < choices.size(); ++b) {
    if (choices[b] >= layout.sizes[b]) {
      throw ShapeError(fmt::format("choice {} out of range for block {} of size {}", choices[b], b,
                                   layout.sizes[b]));
    }
    bits[layout.offset(b) + choices[b]] = 1;
  }
  return ConceptVector(std::move(layout), std::move(bits));
}

std::size_t ConceptVector::choice(std::size_t block) const {
  std::size_t off = layout_.offset(block);
  for (std::size_t i = 0; i < layout_.sizes[block]; ++i) {
    if (bits_[off + i]) return i;
  }
  return 0;  // unreachable for a valid vector
}

Template::Template(BlockLayout layout, std::vector<std::uint8_t> bits)
    : layout_(std::move(layout)), bits_(std::move(bits)) {
  check_bits(layout_, bits_, true);
}

bool Template::blank(std::size_t block) const { return block_popcount(layout_, bits_, block) == 0; }

bool Template::all_blank() const {
  return std::all_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b == 0; });
}

ConceptVector concept_vector(const ObjectInstance& object, const Lexicon& lexicon) {
  BlockLayout layout = BlockLayout::from_lexicon(lexicon);
  const auto& supers = lexicon.unary_super_concepts();
  std::vector<std::size_t> choices;
  for (std::size_t b = 0; b < supers.size(); ++b) {
    const auto& cs = lexicon.super_concept(supers[b]).concepts;
    ConceptId c = object.attributes.at(lexicon.attribute_slot(supers[b]));
    auto it = std::find(cs.begin(), cs.end(), c);
    if (it == cs.end()) throw ShapeError(fmt::format("object {} has a foreign attribute", object.id));
    choices.push_back(static_cast<std::size_t>(it - cs.begin()));
  }
  return ConceptVector::from_choices(std::move(layout), choices);
}

ConceptVector concept_vector(const ConceptTensors& tensors, std::size_t object,
                             const InducedLevel& unary_level) {
  if (tensors.unary_concepts != unary_level.concept_count()) {
    throw ShapeError(fmt::format("tensor has {} unary concepts, hierarchy has {}",
                                 tensors.unary_concepts, unary_level.concept_count()));
  }
  BlockLayout layout = BlockLayout::from_level(unary_level);
  std::vector<std::uint8_t> bits;
  for (const auto& block : unary_level.super_concepts) {
    for (std::size_t e : block) bits.push_back(tensors.ku(object, e) >= 0.5 ? 1 : 0);
  }
  return ConceptVector(std::move(layout), std::move(bits));
}

double semantic_distance(const ConceptVector& k1, const ConceptVector& k2) {
  same_layout(k1.layout(), k2.layout());
  std::size_t x = 0;
  for (std::size_t i = 0; i < k1.bits().size(); ++i) x += k1.bits()[i] != k2.bits()[i];
  return static_cast<double>(x) / 2.0;
}

Template concept_minus(const ConceptVector& k1, const ConceptVector& k2) {
  same_layout(k1.layout(), k2.layout());
  const BlockLayout& layout = k1.layout();
  std::vector<std::uint8_t> bits = k1.bits();
  for (std::size_t b = 0; b < layout.block_count(); ++b) {
    if (block_equal(layout, k1.bits(), k2.bits(), b)) {
      std::fill_n(bits.begin() + layout.offset(b), layout.sizes[b], 0);
    }
  }
  return Template(layout, std::move(bits));
}

ConceptVector concept_plus(const Template& t, const ConceptVector& k2) {
  same_layout(t.layout(), k2.layout());
  const BlockLayout& layout = t.layout();
  std::vector<std::uint8_t> bits = t.bits();
  for (std::size_t b = 0; b < layout.block_count(); ++b) {
    if (!t.blank(b)) continue;
    std::size_t off = layout.offset(b);
    std::copy_n(k2.bits().begin() + off, layout.sizes[b], bits.begin() + off);
  }
  return ConceptVector(layout, std::move(bits));
}

AnalogyResult analogy_retrieve(std::span<const ConceptVector> pool, const ConceptVector& k0,
                               const ConceptVector& k_sub, const ConceptVector& k_add) {
  if (pool.empty()) throw ArgumentError("analogy pool is empty");
  ConceptVector k3 = concept_plus(concept_minus(k0, k_sub), k_add);
  AnalogyResult best{0, semantic_distance(pool[0], k3)};
  for (std::size_t i = 1; i < pool.size(); ++i) {
    double d = semantic_distance(pool[i], k3);
    if (d < best.distance) best = {i, d};
  }
  return best;
}

// ---------------------------------------------------------------------------
// Annotations and metrics

std::vector<RankingRecord> parse_annotations(std::istream& in) {
  std::vector<RankingRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 5 && tok.size() != 9) {
      throw RecordError(fmt::format("line {}: expected 5 or 9 fields, got {}", lineno, tok.size()));
    }
    RankingRecord r;
    r.word = tok[0];
    for (std::size_t i = 0; i < 4; ++i) r.candidates[i] = tok[1 + i];
    if (tok.size() == 9) {
      for (std::size_t i = 0; i < 4; ++i) {
        const std::string& s = tok[5 + i];
        if (s.size() != 1 || s[0] < '0' || s[0] > '3') {
          throw RecordError(fmt::format("line {}: rank '{}' is not in 0..3", lineno, s));
        }
        r.human_order[i] = static_cast<std::size_t>(s[0] - '0');
      }
      auto sorted = r.human_order;
      std::sort(sorted.begin(), sorted.end());
      if (sorted != std::array<std::size_t, 4>{0, 1, 2, 3}) {
        throw RecordError(fmt::format("line {}: ranks are not a permutation of 0..3", lineno));
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_annotations(std::span<const RankingRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += fmt::format("{} {} {} {} {} {} {} {} {}\n", r.word, r.candidates[0], r.candidates[1],
                       r.candidates[2], r.candidates[3], r.human_order[0], r.human_order[1],
                       r.human_order[2], r.human_order[3]);
  }
  return out;
}

std::vector<RankingRecord> synthetic_annotations(const Lexicon& lexicon) {
  std::vector<RankingRecord> out;
  for (WordId w : lexicon.unary_words()) {
    const ConceptId c = lexicon.concept_of(w);
    const ConceptInfo& info = lexicon.concept_info(c);
    std::vector<WordId> positives;
    for (WordId s : info.words) {
      if (s != w) positives.push_back(s);
    }
    std::vector<WordId> negatives;
    for (ConceptId other : lexicon.super_concept(info.super_concept).concepts) {
      if (other == c) continue;
      for (WordId s : lexicon.concept_info(other).words) negatives.push_back(s);
    }
    if (positives.size() < 2 || negatives.size() < 2) continue;
    RankingRecord r;
    r.word = lexicon.word(w);
    r.candidates = {lexicon.word(positives[0]), lexicon.word(positives[1]),
                    lexicon.word(negatives[0]), lexicon.word(negatives[1])};
    out.push_back(std::move(r));
  }
  return out;
}

void score_from_conditional(std::span<RankingRecord> records, const CorrelationTable& table,
                            const Lexicon& lexicon) {
  auto index = [&](const std::string& word) {
    auto id = lexicon.find_word(word);
    auto i = id ? table.index_of(*id) : std::nullopt;
    if (!i) throw RecordError(fmt::format("word '{}' has no induced correlations", word));
    return *i;
  };
  for (auto& r : records) {
    std::size_t row = index(r.word);
    for (std::size_t j = 0; j < 4; ++j) {
      r.scores[j] = table.conditional_at(row, index(r.candidates[j]));
    }
  }
}

AccuracyReport classification_accuracy(std::span<const RankingRecord> records, double t) {
  if (records.empty()) throw RecordError("no annotation records");
  AccuracyReport acc;
  constexpr std::size_t kPos = RankingRecord::kPositives;
  for (const auto& r : records) {
    std::size_t pos = 0;
    std::size_t neg = 0;
    for (std::size_t j = 0; j < kPos; ++j) pos += r.scores[j] > t;
    for (std::size_t j = kPos; j < 4; ++j) neg += r.scores[j] < t;
    acc.positive += static_cast<double>(pos) / kPos;
    acc.negative += static_cast<double>(neg) / (4 - kPos);
    acc.combined += static_cast<double>(pos + neg) / 4;
  }
  const double n = static_cast<double>(records.size());
  acc.positive /= n;
  acc.negative /= n;
  acc.combined /= n;
  return acc;
}

double kendall_tau_distance(const std::array<std::size_t, 4>& a,
                            const std::array<std::size_t, 4>& b) {
  std::size_t discordant = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      bool x = a[i] < a[j];
      bool y = b[i] < b[j];
      discordant += x != y;
    }
  }
  return static_cast<double>(discordant) / 6.0;
}

std::array<std::size_t, 4> induced_order(const RankingRecord& record) {
  std::array<std::size_t, 4> idx{0, 1, 2, 3};
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    if (record.scores[i] != record.scores[j]) return record.scores[i] > record.scores[j];
    return record.human_order[i] < record.human_order[j];
  });
  std::array<std::size_t, 4> rank{};
  for (std::size_t k = 0; k < 4; ++k) rank[idx[k]] = k;
  return rank;
}

RankingReport ranking_distance(std::span<const RankingRecord> records) {
  if (records.empty()) throw RecordError("no annotation records");
  RankingReport rep;
  for (const auto& r : records) {
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = i + 1; j < 4; ++j) rep.ties += r.scores[i] == r.scores[j];
    }
    rep.distance += kendall_tau_distance(r.human_order, induced_order(r));
  }
  rep.distance /= static_cast<double>(records.size());
  return rep;
}

}  // namespace concept_forge
