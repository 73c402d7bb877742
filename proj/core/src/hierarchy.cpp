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

#include "concept_forge/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include <fmt/format.h>

#include "concept_forge/error.hpp"

namespace concept_forge {

double word_correlation(const BitMatrix& gamma, std::size_t r1, std::size_t r2) {
  std::size_t n1 = gamma.row_popcount(r1);
  std::size_t n2 = gamma.row_popcount(r2);
  if (n1 == 0 || n2 == 0) {
    throw UndefinedCorrelationError(
        fmt::format("row {} has no set bit", n1 == 0 ? r1 : r2));
  }
  // One rounding step: both * (n1 + n2) / (n1 * n2), exact in the integers.
  const std::uint64_t both = gamma.and_popcount(r1, r2);
  const auto num = static_cast<double>(both * (static_cast<std::uint64_t>(n1) + n2));
  const auto den = static_cast<double>(static_cast<std::uint64_t>(n1) * n2);
  return num / den;
}

std::optional<std::size_t> CorrelationTable::index_of(WordId w) const {
  auto it = std::find(words.begin(), words.end(), w);
  if (it == words.end()) return std::nullopt;
  return static_cast<std::size_t>(it - words.begin());
}

CorrelationTable correlation_set(const GammaMatrix& gamma) {
  CorrelationTable t;
  t.arity = gamma.arity;
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < gamma.row_words.size(); ++r) {
    if (gamma.bits.row_popcount(r) > 0) {
      rows.push_back(r);
      t.words.push_back(gamma.row_words[r]);
    } else {
      t.skipped_words.push_back(gamma.row_words[r]);
    }
  }
  const std::size_t n = rows.size();
  t.theta.assign(n * n, 0.0);
  t.conditional.assign(n * n, 0.0);
  std::vector<double> counts(n);
  for (std::size_t i = 0; i < n; ++i) counts[i] = static_cast<double>(gamma.bits.row_popcount(rows[i]));
  for (std::size_t i = 0; i < n; ++i) {
    t.theta[i * n + i] = 2.0;
    t.conditional[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double theta = word_correlation(gamma.bits, rows[i], rows[j]);
      t.theta[i * n + j] = t.theta[j * n + i] = theta;
      auto both = static_cast<double>(gamma.bits.and_popcount(rows[i], rows[j]));
      t.conditional[i * n + j] = both / counts[i];
      t.conditional[j * n + i] = both / counts[j];
      t.pairs.push_back({i, j, theta});
    }
  }
  return t;
}

CorrelationSets correlation_sets(const GammaMatrices& gamma) {
  return {correlation_set(gamma.unary), correlation_set(gamma.binary)};
}

std::string_view pair_label_name(PairLabel label) {
  switch (label) {
    case PairLabel::kExclusive:
      return "EXC";
    case PairLabel::kMid:
      return "MID";
    case PairLabel::kSynonym:
      return "SYN";
  }
  return "?";
}

PairAssignments PairAssignments::all_mid(std::vector<WordId> words) {
  PairAssignments a;
  const std::size_t n = words.size();
  a.words = std::move(words);
  a.labels.assign(n * n, PairLabel::kMid);
  for (std::size_t i = 0; i < n; ++i) a.labels[i * n + i] = PairLabel::kSynonym;
  return a;
}

PairAssignments cluster_pairs(const CorrelationTable& table, const FitOptions& options) {
  if (table.pairs.size() < 3) {
    throw ClusteringError(fmt::format("{} {} word pairs; clustering needs at least 3",
                                      table.pairs.size(), arity_name(table.arity)));
  }
  std::vector<double> thetas;
  thetas.reserve(table.pairs.size());
  for (const auto& p : table.pairs) thetas.push_back(p.theta);

  FitOptions opts = options;
  opts.min_samples_per_component = 1;
  FitResult fit;
  try {
    fit = fit_em(thetas, 3, std::vector<double>{0.0, 1.0, 2.0}, opts);
  } catch (const DegenerateFitError& e) {
    throw ClusteringError(fmt::format("{} correlations are degenerate: {}",
                                      arity_name(table.arity), e.what()));
  }

  PairAssignments a = PairAssignments::all_mid(table.words);
  for (const auto& c : fit.model.components()) {
    double m = c.mean;
    PairLabel l = PairLabel::kMid;
    if (std::abs(m) < std::abs(m - 1.0) && std::abs(m) <= std::abs(m - 2.0)) {
      l = PairLabel::kExclusive;
    } else if (std::abs(m - 2.0) < std::abs(m - 1.0)) {
      l = PairLabel::kSynonym;
    }
    a.component_labels.push_back(l);
  }
  for (const auto& p : table.pairs) {
    a.set(p.a, p.b, a.component_labels[assign(fit.model, p.theta)]);
  }
  a.model = std::move(fit.model);
  return a;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }
  // Groups ordered by smallest member, members ascending.
  std::vector<std::vector<std::size_t>> groups() {
    std::vector<std::vector<std::size_t>> by_root(parent_.size());
    for (std::size_t i = 0; i < parent_.size(); ++i) by_root[find(i)].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    for (auto& g : by_root) {
      if (!g.empty()) out.push_back(std::move(g));
    }
    return out;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<std::vector<std::size_t>> induce_concepts(const PairAssignments& assignments) {
  const std::size_t n = assignments.words.size();
  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (assignments.at(i, j) == PairLabel::kSynonym) sets.unite(i, j);
    }
  }
  auto groups = sets.groups();
  std::vector<std::string> offending;
  for (const auto& g : groups) {
    for (std::size_t x = 0; x < g.size(); ++x) {
      for (std::size_t y = x + 1; y < g.size(); ++y) {
        PairLabel l = assignments.at(g[x], g[y]);
        if (l != PairLabel::kSynonym) {
          offending.push_back(fmt::format("({}, {}) = {}", assignments.words[g[x]].value,
                                          assignments.words[g[y]].value, pair_label_name(l)));
        }
      }
    }
  }
  if (!offending.empty()) {
    std::string msg = "synonym groups are not transitive; word id pairs:";
    for (const auto& o : offending) msg += " " + o;
    throw InconsistencyError(msg);
  }
  return groups;
}

std::vector<std::vector<std::size_t>> induce_super_concepts(
    const PairAssignments& assignments, const std::vector<std::vector<std::size_t>>& concepts) {
  const std::size_t n = concepts.size();
  auto all_exclusive = [&](std::size_t a, std::size_t b) {
    for (std::size_t wa : concepts[a]) {
      for (std::size_t wb : concepts[b]) {
        if (assignments.at(wa, wb) != PairLabel::kExclusive) return false;
      }
    }
    return true;
  };
  DisjointSets sets(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (all_exclusive(a, b)) sets.unite(a, b);
    }
  }
  auto groups = sets.groups();
  std::vector<std::string> offending;
  for (const auto& g : groups) {
    for (std::size_t x = 0; x < g.size(); ++x) {
      for (std::size_t y = x + 1; y < g.size(); ++y) {
        if (!all_exclusive(g[x], g[y])) {
          offending.push_back(fmt::format("concepts {} and {}", g[x], g[y]));
        }
      }
    }
  }
  if (!offending.empty()) {
    std::string msg = "super concept is only partially exclusive:";
    for (const auto& o : offending) msg += " " + o + ";";
    throw InconsistencyError(msg);
  }
  return groups;
}

std::optional<std::size_t> InducedLevel::concept_of(WordId w) const {
  for (std::size_t c = 0; c < concepts.size(); ++c) {
    if (std::find(concepts[c].begin(), concepts[c].end(), w) != concepts[c].end()) return c;
  }
  return std::nullopt;
}

bool InducedLevel::same_partition(const InducedLevel& other) const {
  return arity == other.arity && concepts == other.concepts &&
         super_concepts == other.super_concepts;
}

InducedLevel make_level(Arity arity, std::vector<std::vector<WordId>> concepts,
                        std::vector<std::vector<std::size_t>> super_concepts,
                        std::vector<WordId> excluded_words) {
  for (auto& c : concepts) {
    if (c.empty()) throw HierarchyError("concept without words");
    std::sort(c.begin(), c.end());
  }
  auto min_word = [&](const std::vector<std::size_t>& sc) {
    WordId m = concepts[sc.front()].front();
    for (std::size_t c : sc) m = std::min(m, concepts[c].front());
    return m;
  };
  for (auto& sc : super_concepts) {
    if (sc.empty()) throw HierarchyError("super concept without concepts");
    std::sort(sc.begin(), sc.end(), [&](std::size_t a, std::size_t b) {
      return concepts[a].front() < concepts[b].front();
    });
  }
  std::sort(super_concepts.begin(), super_concepts.end(),
            [&](const auto& a, const auto& b) { return min_word(a) < min_word(b); });

  InducedLevel level;
  level.arity = arity;
  for (std::size_t s = 0; s < super_concepts.size(); ++s) {
    std::vector<std::size_t> block;
    for (std::size_t c : super_concepts[s]) {
      block.push_back(level.concepts.size());
      level.concepts.push_back(concepts[c]);
      level.concept_super.push_back(s);
    }
    level.super_concepts.push_back(std::move(block));
  }
  if (level.concepts.size() != concepts.size()) {
    throw HierarchyError("super concepts do not partition the concepts");
  }
  std::sort(excluded_words.begin(), excluded_words.end());
  level.excluded_words = std::move(excluded_words);
  return level;
}

InducedLevel induce_level(const CorrelationTable& table, PairAssignments& assignments_out,
                          const std::vector<WordId>& excluded, const FitOptions& options) {
  std::vector<WordId> all_excluded = excluded;
  all_excluded.insert(all_excluded.end(), table.skipped_words.begin(), table.skipped_words.end());
  if (table.words.empty()) {
    assignments_out = PairAssignments::all_mid({});
    return make_level(table.arity, {}, {}, all_excluded);
  }
  if (table.words.size() == 1) {
    assignments_out = PairAssignments::all_mid(table.words);
    return make_level(table.arity, {{table.words[0]}}, {{0}}, all_excluded);
  }
  assignments_out = cluster_pairs(table, options);
  auto groups = induce_concepts(assignments_out);
  auto supers = induce_super_concepts(assignments_out, groups);
  std::vector<std::vector<WordId>> concepts;
  for (const auto& g : groups) {
    std::vector<WordId> words;
    for (std::size_t i : g) words.push_back(table.words[i]);
    concepts.push_back(std::move(words));
  }
  return make_level(table.arity, std::move(concepts), std::move(supers), all_excluded);
}

ConceptHierarchy induce_hierarchy(const GammaMatrices& gamma, const BoundaryMap& boundaries,
                                  const Lexicon& lexicon, const FitOptions& options) {
  std::vector<WordId> unary_excluded;
  std::vector<WordId> binary_excluded;
  for (const auto& ex : boundaries.excluded) {
    (lexicon.arity_of(ex.word) == Arity::kUnary ? unary_excluded : binary_excluded)
        .push_back(ex.word);
  }
  CorrelationSets sets = correlation_sets(gamma);
  ConceptHierarchy h;
  h.unary = induce_level(sets.unary, h.unary_pairs, unary_excluded, options);
  h.binary = induce_level(sets.binary, h.binary_pairs, binary_excluded, options);
  return h;
}

ConceptHierarchy ground_truth_hierarchy(const Lexicon& lexicon) {
  ConceptHierarchy h;
  for (Arity arity : {Arity::kUnary, Arity::kBinary}) {
    const auto& supers =
        arity == Arity::kUnary ? lexicon.unary_super_concepts() : lexicon.binary_super_concepts();
    std::vector<std::vector<WordId>> concepts;
    std::vector<std::vector<std::size_t>> groups;
    for (SuperConceptId s : supers) {
      std::vector<std::size_t> group;
      for (ConceptId c : lexicon.super_concept(s).concepts) {
        group.push_back(concepts.size());
        concepts.push_back(lexicon.concept_info(c).words);
      }
      groups.push_back(std::move(group));
    }
    InducedLevel level = make_level(arity, std::move(concepts), std::move(groups));
    (arity == Arity::kUnary ? h.unary : h.binary) = std::move(level);
  }
  return h;
}

std::string hierarchy_to_text(const ConceptHierarchy& hierarchy, const Lexicon& lexicon) {
  std::string out;
  for (const InducedLevel* level : {&hierarchy.unary, &hierarchy.binary}) {
    out += fmt::format("{}\n", arity_name(level->arity));
    for (std::size_t s = 0; s < level->super_concepts.size(); ++s) {
      out += fmt::format("  super_concept {}\n", s);
      for (std::size_t c : level->super_concepts[s]) {
        std::string words;
        for (WordId w : level->concepts[c]) {
          if (!words.empty()) words += ", ";
          words += lexicon.word(w);
        }
        out += fmt::format("    concept {}: {}\n", c, words);
      }
    }
  }
  return out;
}

void hardmax(std::span<double> block) {
  if (block.empty()) return;
  std::size_t best = 0;
  for (std::size_t i = 1; i < block.size(); ++i) {
    if (block[i] > block[best]) best = i;
  }
  for (std::size_t i = 0; i < block.size(); ++i) block[i] = i == best ? 1.0 : 0.0;
}

namespace {

void normalize_blocks(std::span<double> scores, const InducedLevel& level) {
  for (const auto& sc : level.super_concepts) {
    if (sc.size() == 1) {
      scores[sc[0]] = scores[sc[0]] > 0.5 ? 1.0 : 0.0;
    } else {
      // make_level keeps blocks contiguous.
      hardmax(scores.subspan(sc.front(), sc.size()));
    }
  }
}

}  // namespace

ConceptTensors concept_tensors(const Scene& scene, const ConceptClassifier& classifier,
                               const ConceptHierarchy& hierarchy) {
  const std::size_t n = scene.size();
  ConceptTensors k;
  k.objects = n;
  k.unary_concepts = hierarchy.unary.concept_count();
  k.binary_concepts = hierarchy.binary.concept_count();
  k.unary.assign(n * k.unary_concepts, 0.0);
  k.binary.assign(n * n * k.binary_concepts, 0.0);
  for (const auto* level : {&hierarchy.unary, &hierarchy.binary}) {
    for (const auto& c : level->concepts) {
      if (c.empty()) throw HierarchyError("concept without words");
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    auto row = std::span<double>(k.unary).subspan(i * k.unary_concepts, k.unary_concepts);
    for (std::size_t e = 0; e < k.unary_concepts; ++e) {
      double best = 0.0;
      for (WordId w : hierarchy.unary.concepts[e]) {
        best = std::max(best, classifier.classify_unary(scene, i, w));
      }
      row[e] = best;
    }
    normalize_blocks(row, hierarchy.unary);
  }
  if (k.binary_concepts == 0) return k;
  RelationTable rel = ground_truth_relations(scene, classifier.simulator().lexicon(),
                                             classifier.simulator().ambiguity_epsilon());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      auto cell = std::span<double>(k.binary).subspan((i * n + j) * k.binary_concepts,
                                                     k.binary_concepts);
      for (std::size_t e = 0; e < k.binary_concepts; ++e) {
        double best = 0.0;
        for (WordId w : hierarchy.binary.concepts[e]) {
          best = std::max(best, classifier.classify_binary(scene, rel, i, j, w));
        }
        cell[e] = best;
      }
      normalize_blocks(cell, hierarchy.binary);
    }
  }
  return k;
}

}  // namespace concept_forge
