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

#include "concept_forge/induction.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "concept_forge/error.hpp"
#include "concept_forge/parallel.hpp"

namespace concept_forge {

std::vector<WordId> LogitSampleStore::never_mentioned() const {
  std::vector<WordId> out;
  for (std::size_t w = 0; w < samples.size(); ++w) {
    if (samples[w].empty()) out.push_back(WordId(static_cast<std::uint32_t>(w)));
  }
  return out;
}

LogitSampleStore collect_logits(const Corpus& corpus, const AttentionSimulator& sim) {
  if (corpus.entries.empty()) throw EmptyStoreError("cannot collect logits from an empty corpus");
  const Lexicon& lex = sim.lexicon();
  const std::size_t n_words = lex.word_count();

  // Per-scene partial stores, concatenated in scene order.
  std::vector<std::vector<std::vector<double>>> partial(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t s) {
    const auto& e = corpus.entries[s];
    auto& local = partial[s];
    local.resize(n_words);
    for (WordId w : e.mentions.unary_words) {
      auto logits = sim.unary_logits(e.scene, w);
      local[w.index()].insert(local[w.index()].end(), logits.begin(), logits.end());
    }
    if (e.mentions.binary_words.empty()) return;
    RelationTable rel = ground_truth_relations(e.scene, lex, sim.ambiguity_epsilon());
    for (WordId w : e.mentions.binary_words) {
      if (lex.arity_of(w) != Arity::kBinary) {
        throw ArityError(fmt::format("'{}' listed as a binary mention", lex.word(w)));
      }
      for (std::size_t anchor = 0; anchor < e.scene.size(); ++anchor) {
        for (std::size_t o = 0; o < e.scene.size(); ++o) {
          local[w.index()].push_back(sim.binary_logit(e.scene, rel, o, anchor, w));
        }
      }
    }
  });

  LogitSampleStore store;
  store.samples.resize(n_words);
  for (auto& local : partial) {
    for (std::size_t w = 0; w < n_words; ++w) {
      store.samples[w].insert(store.samples[w].end(), local[w].begin(), local[w].end());
    }
  }
  return store;
}

double BoundaryMap::at(WordId w) const {
  if (!has(w)) {
    throw ClassifierUnavailableError(fmt::format("word {} has no decision boundary", w.value));
  }
  return *boundary[w.index()];
}

BoundaryMap fit_boundaries(const LogitSampleStore& store, const Lexicon& lexicon,
                           const BoundaryOptions& options) {
  const std::size_t n = lexicon.word_count();
  BoundaryMap map;
  map.boundary.resize(n);
  map.models.resize(n);
  std::vector<std::string> reasons(n);

  parallel_for(n, [&](std::size_t w) {
    static const std::vector<double> kNone;
    const auto& s = w < store.samples.size() ? store.samples[w] : kNone;
    if (s.empty()) {
      reasons[w] = "never mentioned";
      return;
    }
    if (s.size() < options.min_samples) {
      reasons[w] = fmt::format("{} samples, need {}", s.size(), options.min_samples);
      return;
    }
    try {
      FitResult fit = fit_em(s, 2, std::nullopt, options.fit);
      double d = ashman_d(fit.model);
      // A handful of tail samples can form a narrow component with a large D.
      double minor = std::min(fit.model[0].weight, fit.model[1].weight) * s.size();
      if (minor < options.fit.min_samples_per_component) {
        reasons[w] = fmt::format("one-class logit distribution (minor component holds {:.1f} samples)",
                                 minor);
        return;
      }
      if (d < options.min_separation_d) {
        reasons[w] = fmt::format("one-class logit distribution (separation {:.3f} < {})", d,
                                 options.min_separation_d);
        return;
      }
      map.boundary[w] = decision_boundary(fit.model);
      map.models[w] = std::move(fit.model);
    } catch (const Error& err) {
      reasons[w] = err.what();
    }
  });

  for (std::size_t w = 0; w < n; ++w) {
    if (!map.boundary[w]) map.excluded.push_back({WordId(static_cast<std::uint32_t>(w)), reasons[w]});
  }
  return map;
}

LabeledSets label_corpus(const Corpus& corpus, const BoundaryMap& boundaries,
                         const AttentionSimulator& sim) {
  const Lexicon& lex = sim.lexicon();
  std::vector<LabeledSets> partial(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t s) {
    const auto& e = corpus.entries[s];
    const Scene& scene = e.scene;
    auto& out = partial[s];
    RelationTable rel;
    if (!e.mentions.binary_words.empty()) {
      rel = ground_truth_relations(scene, lex, sim.ambiguity_epsilon());
    }
    for (std::size_t v1 = 0; v1 < scene.size(); ++v1) {
      for (WordId w : e.mentions.unary_words) {
        if (!boundaries.has(w)) {
          ++out.skipped_mentions;
          continue;
        }
        double logit = sim.unary_logit(scene, v1, w);
        out.unary.push_back({scene.id, static_cast<std::uint32_t>(v1), w,
                             static_cast<std::uint8_t>(logit > boundaries.at(w))});
      }
      for (WordId w : e.mentions.binary_words) {
        if (!boundaries.has(w)) {
          ++out.skipped_mentions;
          continue;
        }
        for (std::size_t v2 = 0; v2 < scene.size(); ++v2) {
          if (v2 == v1) continue;
          double logit = sim.binary_logit(scene, rel, v1, v2, w);
          out.binary.push_back({scene.id, static_cast<std::uint32_t>(v1),
                                static_cast<std::uint32_t>(v2), w,
                                static_cast<std::uint8_t>(logit > boundaries.at(w))});
        }
      }
    }
  });

  LabeledSets sets;
  for (auto& p : partial) {
    sets.unary.insert(sets.unary.end(), p.unary.begin(), p.unary.end());
    sets.binary.insert(sets.binary.end(), p.binary.begin(), p.binary.end());
    sets.skipped_mentions += p.skipped_mentions;
  }
  return sets;
}

// ---------------------------------------------------------------------------

ConceptClassifier::ConceptClassifier(const AttentionSimulator& sim, const BoundaryMap& boundaries,
                                     double tau)
    : sim_(&sim), boundaries_(&boundaries), tau_(tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ArgumentError(fmt::format("classifier temperature must be positive, got {}", tau));
  }
}

double ConceptClassifier::probability(double logit, double boundary, double tau) {
  double z = (logit - boundary) / tau;
  // Split by sign so neither branch overflows.
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double ez = std::exp(z);
  return ez / (1.0 + ez);
}

double ConceptClassifier::classify_unary(const Scene& scene, std::size_t object,
                                         WordId word) const {
  double bd = boundaries_->at(word);
  return probability(sim_->unary_logit(scene, object, word), bd, tau_);
}

double ConceptClassifier::classify_binary(const Scene& scene, const RelationTable& relations,
                                          std::size_t object, std::size_t anchor,
                                          WordId word) const {
  double bd = boundaries_->at(word);
  return probability(sim_->binary_logit(scene, relations, object, anchor, word), bd, tau_);
}

double ConceptClassifier::classify_binary(const Scene& scene, std::size_t object,
                                          std::size_t anchor, WordId word) const {
  RelationTable rel = ground_truth_relations(scene, sim_->lexicon(), sim_->ambiguity_epsilon());
  return classify_binary(scene, rel, object, anchor, word);
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> GammaMatrix::row_of(WordId w) const {
  for (std::size_t r = 0; r < row_words.size(); ++r) {
    if (row_words[r] == w) return r;
  }
  return std::nullopt;
}

GammaMatrices binary_code(const Corpus& corpus, const ConceptClassifier& classifier) {
  const Lexicon& lex = classifier.simulator().lexicon();
  GammaMatrices g;
  g.unary.arity = Arity::kUnary;
  g.binary.arity = Arity::kBinary;
  for (WordId w : lex.unary_words()) {
    if (classifier.available(w)) g.unary.row_words.push_back(w);
  }
  for (WordId w : lex.binary_words()) {
    if (classifier.available(w)) g.binary.row_words.push_back(w);
  }
  for (const auto& e : corpus.entries) {
    const auto n = static_cast<std::uint32_t>(e.scene.size());
    for (std::uint32_t o = 0; o < n; ++o) {
      g.unary.columns.push_back({e.scene.id, o, 0});
      for (std::uint32_t a = 0; a < n; ++a) {
        if (a != o) g.binary.columns.push_back({e.scene.id, o, a});
      }
    }
  }

  // Per-scene local bits [row][local column], merged afterwards.
  struct Local {
    std::vector<std::vector<std::uint8_t>> unary;
    std::vector<std::vector<std::uint8_t>> binary;
  };
  std::vector<Local> partial(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t s) {
    const Scene& scene = corpus.entries[s].scene;
    const std::size_t n = scene.size();
    auto& local = partial[s];
    local.unary.assign(g.unary.row_words.size(), std::vector<std::uint8_t>(n, 0));
    for (std::size_t r = 0; r < g.unary.row_words.size(); ++r) {
      for (std::size_t o = 0; o < n; ++o) {
        local.unary[r][o] = classifier.classify_unary(scene, o, g.unary.row_words[r]) > 0.5;
      }
    }
    if (g.binary.row_words.empty()) return;
    RelationTable rel =
        ground_truth_relations(scene, lex, classifier.simulator().ambiguity_epsilon());
    local.binary.assign(g.binary.row_words.size(), std::vector<std::uint8_t>(n * (n - 1), 0));
    for (std::size_t r = 0; r < g.binary.row_words.size(); ++r) {
      std::size_t col = 0;
      for (std::size_t o = 0; o < n; ++o) {
        for (std::size_t a = 0; a < n; ++a) {
          if (a == o) continue;
          local.binary[r][col++] =
              classifier.classify_binary(scene, rel, o, a, g.binary.row_words[r]) > 0.5;
        }
      }
    }
  });

  g.unary.bits = BitMatrix(g.unary.row_words.size(), g.unary.columns.size());
  g.binary.bits = BitMatrix(g.binary.row_words.size(), g.binary.columns.size());
  std::size_t ucol = 0;
  std::size_t bcol = 0;
  for (std::size_t s = 0; s < partial.size(); ++s) {
    const auto& local = partial[s];
    const std::size_t n = corpus.entries[s].scene.size();
    for (std::size_t r = 0; r < local.unary.size(); ++r) {
      for (std::size_t c = 0; c < local.unary[r].size(); ++c) {
        if (local.unary[r][c]) g.unary.bits.set(r, ucol + c);
      }
    }
    for (std::size_t r = 0; r < local.binary.size(); ++r) {
      for (std::size_t c = 0; c < local.binary[r].size(); ++c) {
        if (local.binary[r][c]) g.binary.bits.set(r, bcol + c);
      }
    }
    ucol += n;
    bcol += n * (n - 1);
  }
  return g;
}

}  // namespace concept_forge
