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

#include "concept_forge/ontology.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "concept_forge/error.hpp"

namespace concept_forge {

std::string_view arity_name(Arity arity) {
  return arity == Arity::kUnary ? "unary" : "binary";
}

OntologyConfig OntologyConfig::clevr_default() {
  OntologyConfig c;
  c.super_concepts = {
      {"color",
       {{"gray"}, {"blue"}, {"brown"}, {"yellow"}, {"red"}, {"green"}, {"purple"}, {"cyan"}}},
      {"shape", {{"cube", "block"}, {"sphere", "ball"}, {"cylinder"}}},
      {"size", {{"large", "big"}, {"small", "tiny"}}},
      {"material", {{"metal", "metallic", "shiny"}, {"rubber", "matte"}}},
  };
  c.binary_concepts = {
      {"horizontal", Axis::kX, {"left"}, {"right"}},
      {"depth", Axis::kY, {"front"}, {"behind"}},
  };
  return c;
}

// ---------------------------------------------------------------------------
// Lexicon

std::optional<WordId> Lexicon::find_word(std::string_view text) const {
  auto it = word_index_.find(std::string(text));
  if (it == word_index_.end()) return std::nullopt;
  return it->second;
}

WordId Lexicon::word_id(std::string_view text) const {
  if (auto w = find_word(text)) return *w;
  throw IdError(fmt::format("unknown word '{}'", text));
}

std::optional<SuperConceptId> Lexicon::find_super_concept(std::string_view name) const {
  for (std::size_t i = 0; i < supers_.size(); ++i) {
    if (supers_[i].name == name) return SuperConceptId(static_cast<std::uint32_t>(i));
  }
  return std::nullopt;
}

std::optional<ConceptId> Lexicon::find_concept(std::string_view name) const {
  if (auto w = find_word(name)) return concept_of(*w);
  return std::nullopt;
}

std::size_t Lexicon::attribute_slot(SuperConceptId s) const {
  if (s.index() >= unary_supers_.size()) {
    throw ArityError(fmt::format("super concept {} is not unary", s.value));
  }
  return s.index();
}

std::size_t Lexicon::unary_slot(ConceptId c) const {
  if (c.index() >= unary_concepts_.size()) {
    throw ArityError(fmt::format("concept {} is not unary", c.value));
  }
  return c.index();
}

std::size_t Lexicon::binary_slot(ConceptId c) const {
  if (c.index() < unary_concepts_.size() || c.index() >= concepts_.size()) {
    throw ArityError(fmt::format("concept {} is not binary", c.value));
  }
  return c.index() - unary_concepts_.size();
}

namespace {

class LexiconBuilder {
 public:
  LexiconBuilder(std::vector<std::string>& words, std::vector<ConceptId>& word_concept,
                 std::unordered_map<std::string, WordId>& index,
                 std::vector<ConceptInfo>& concepts)
      : words_(words), word_concept_(word_concept), index_(index), concepts_(concepts) {}

  ConceptId add_concept(const std::vector<std::string>& synonyms, Arity arity,
                        SuperConceptId super, bool upper, int line) {
    if (synonyms.empty()) {
      throw ConfigError("concept with an empty synonym list", line);
    }
    ConceptId id(static_cast<std::uint32_t>(concepts_.size()));
    ConceptInfo info;
    info.name = synonyms.front();
    info.arity = arity;
    info.super_concept = super;
    info.upper = upper;
    for (const auto& w : synonyms) {
      if (w.empty()) throw ConfigError("empty word", line);
      if (index_.contains(w)) {
        throw LexiconError(fmt::format("word '{}' is listed under more than one concept", w));
      }
      WordId wid(static_cast<std::uint32_t>(words_.size()));
      words_.push_back(w);
      word_concept_.push_back(id);
      index_.emplace(w, wid);
      info.words.push_back(wid);
    }
    concepts_.push_back(std::move(info));
    return id;
  }

 private:
  std::vector<std::string>& words_;
  std::vector<ConceptId>& word_concept_;
  std::unordered_map<std::string, WordId>& index_;
  std::vector<ConceptInfo>& concepts_;
};

}  // namespace

Lexicon build_lexicon(const OntologyConfig& config) {
  Lexicon lex;
  if (config.super_concepts.empty()) {
    throw ConfigError("ontology needs at least one unary super concept");
  }
  std::set<std::string> super_names;
  LexiconBuilder builder(lex.words_, lex.word_concept_, lex.word_index_, lex.concepts_);

  for (const auto& sc : config.super_concepts) {
    if (!super_names.insert(sc.name).second) {
      throw ConfigError(fmt::format("duplicate super concept '{}'", sc.name), sc.line);
    }
    if (sc.concepts.size() < 2) {
      throw ConfigError(
          fmt::format("super concept '{}' needs at least 2 concepts, has {}", sc.name,
                      sc.concepts.size()),
          sc.line);
    }
    SuperConceptId sid(static_cast<std::uint32_t>(lex.supers_.size()));
    SuperConceptInfo info{sc.name, Arity::kUnary, {}, Axis::kX};
    for (const auto& synonyms : sc.concepts) {
      info.concepts.push_back(builder.add_concept(synonyms, Arity::kUnary, sid, false, sc.line));
    }
    lex.supers_.push_back(std::move(info));
  }
  for (const auto& bp : config.binary_concepts) {
    if (!super_names.insert(bp.name).second) {
      throw ConfigError(fmt::format("duplicate super concept '{}'", bp.name), bp.line);
    }
    if (bp.lower.empty() || bp.upper.empty()) {
      throw ConfigError(
          fmt::format("binary pair '{}' needs both a lower and an upper relation", bp.name),
          bp.line);
    }
    SuperConceptId sid(static_cast<std::uint32_t>(lex.supers_.size()));
    SuperConceptInfo info{bp.name, Arity::kBinary, {}, bp.axis};
    info.concepts.push_back(builder.add_concept(bp.lower, Arity::kBinary, sid, false, bp.line));
    info.concepts.push_back(builder.add_concept(bp.upper, Arity::kBinary, sid, true, bp.line));
    lex.supers_.push_back(std::move(info));
  }

  for (std::size_t c = 0; c < lex.concepts_.size(); ++c) {
    ConceptId cid(static_cast<std::uint32_t>(c));
    auto& words = lex.concepts_[c].arity == Arity::kUnary ? lex.unary_words_ : lex.binary_words_;
    words.insert(words.end(), lex.concepts_[c].words.begin(), lex.concepts_[c].words.end());
    (lex.concepts_[c].arity == Arity::kUnary ? lex.unary_concepts_ : lex.binary_concepts_)
        .push_back(cid);
  }
  for (std::size_t s = 0; s < lex.supers_.size(); ++s) {
    (lex.supers_[s].arity == Arity::kUnary ? lex.unary_supers_ : lex.binary_supers_)
        .push_back(SuperConceptId(static_cast<std::uint32_t>(s)));
  }
  return lex;
}

// ---------------------------------------------------------------------------
// Scenes

bool ObjectInstance::has(ConceptId c) const {
  return std::find(attributes.begin(), attributes.end(), c) != attributes.end();
}

namespace {

double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

Scene generate_scene(Rng& rng, const Lexicon& lexicon, const GenerationConfig& config,
                     std::uint32_t scene_id) {
  if (config.min_objects == 0 || config.min_objects > config.max_objects) {
    throw GenerationError(fmt::format("invalid object bounds [{}, {}]", config.min_objects,
                                      config.max_objects));
  }
  std::uniform_int_distribution<std::size_t> count_dist(config.min_objects, config.max_objects);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  Scene scene;
  scene.id = scene_id;
  std::size_t n = count_dist(rng);
  scene.objects.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ObjectInstance obj;
    obj.id = static_cast<std::uint32_t>(i);
    for (SuperConceptId s : lexicon.unary_super_concepts()) {
      const auto& members = lexicon.super_concept(s).concepts;
      std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
      obj.attributes.push_back(members[pick(rng)]);
    }
    bool placed = false;
    for (std::size_t attempt = 0; attempt < config.max_placement_retries && !placed; ++attempt) {
      Point p{coord(rng), coord(rng)};
      placed = std::all_of(scene.objects.begin(), scene.objects.end(), [&](const auto& other) {
        return distance(p, other.position) >= config.min_separation;
      });
      if (placed) obj.position = p;
    }
    if (!placed) {
      throw GenerationError(fmt::format(
          "scene {}: could not place object {} after {} attempts (min_separation {})", scene_id,
          i, config.max_placement_retries, config.min_separation));
    }
    scene.objects.push_back(std::move(obj));
  }
  return scene;
}

void validate_scene(const Scene& scene, const Lexicon& lexicon, const GenerationConfig& config) {
  const std::size_t n = scene.objects.size();
  if (n < config.min_objects || n > config.max_objects) {
    throw GenerationError(fmt::format("scene {} has {} objects, outside [{}, {}]", scene.id, n,
                                      config.min_objects, config.max_objects));
  }
  const auto& supers = lexicon.unary_super_concepts();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& obj = scene.objects[i];
    if (obj.attributes.size() != supers.size()) {
      throw GenerationError(
          fmt::format("scene {} object {}: expected {} attributes, got {}", scene.id, i,
                      supers.size(), obj.attributes.size()));
    }
    for (std::size_t s = 0; s < supers.size(); ++s) {
      ConceptId c = obj.attributes[s];
      if (c.index() >= lexicon.concept_count() ||
          lexicon.concept_info(c).super_concept != supers[s]) {
        throw GenerationError(fmt::format("scene {} object {}: concept {} is not a member of '{}'",
                                          scene.id, i, c.value,
                                          lexicon.super_concept(supers[s]).name));
      }
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (distance(obj.position, scene.objects[j].position) < config.min_separation) {
        throw GenerationError(fmt::format("scene {}: objects {} and {} closer than {}", scene.id,
                                          j, i, config.min_separation));
      }
    }
  }
}

RelationTable::RelationTable(std::size_t objects, std::size_t binary_concepts)
    : n_(objects),
      concepts_(binary_concepts),
      cells_(objects * objects * binary_concepts, Relation::kNotHolds) {}

RelationTable ground_truth_relations(const Scene& scene, const Lexicon& lexicon,
                                     double epsilon) {
  const std::size_t n = scene.size();
  RelationTable table(n, lexicon.binary_concepts().size());
  for (SuperConceptId s : lexicon.binary_super_concepts()) {
    const auto& info = lexicon.super_concept(s);
    for (ConceptId c : info.concepts) {
      const bool upper = lexicon.concept_info(c).upper;
      const std::size_t slot = lexicon.binary_slot(c);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          const auto& pi = scene.objects[i].position;
          const auto& pj = scene.objects[j].position;
          double d = info.axis == Axis::kX ? pi.x - pj.x : pi.y - pj.y;
          Relation r;
          if (std::abs(d) <= epsilon) {
            r = Relation::kAmbiguous;
          } else {
            r = ((d > 0) == upper) ? Relation::kHolds : Relation::kNotHolds;
          }
          table.set(slot, i, j, r);
        }
      }
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Mentions

namespace {

std::vector<WordId> relevant_unary_words(const Scene& scene, const Lexicon& lexicon) {
  std::vector<bool> present(lexicon.concept_count(), false);
  for (const auto& obj : scene.objects) {
    for (ConceptId c : obj.attributes) present[c.index()] = true;
  }
  std::vector<WordId> out;
  for (WordId w : lexicon.unary_words()) {
    if (present[lexicon.concept_of(w).index()]) out.push_back(w);
  }
  return out;
}

std::vector<WordId> relevant_binary_words(const Scene& scene, const Lexicon& lexicon,
                                          double epsilon) {
  RelationTable rel = ground_truth_relations(scene, lexicon, epsilon);
  std::vector<WordId> out;
  for (WordId w : lexicon.binary_words()) {
    std::size_t slot = lexicon.binary_slot(lexicon.concept_of(w));
    bool any = false;
    for (std::size_t i = 0; i < scene.size() && !any; ++i) {
      for (std::size_t j = 0; j < scene.size() && !any; ++j) any = rel.holds(slot, i, j);
    }
    if (any) out.push_back(w);
  }
  return out;
}

void sample_words(Rng& rng, std::size_t count, double relevance_bias,
                  const std::vector<WordId>& relevant, const std::vector<WordId>& vocabulary,
                  std::vector<WordId>& out) {
  if (vocabulary.empty()) return;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t k = 0; k < count; ++k) {
    bool use_relevant = coin(rng) < relevance_bias && !relevant.empty();
    const auto& pool = use_relevant ? relevant : vocabulary;
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    out.push_back(pool[pick(rng)]);
  }
}

}  // namespace

MentionBag generate_mentions(const Scene& scene, Rng& rng, const Lexicon& lexicon,
                             const GenerationConfig& config) {
  MentionBag bag;
  bag.scene_id = scene.id;
  std::uniform_int_distribution<std::size_t> nu(config.unary_mentions_min,
                                                config.unary_mentions_max);
  std::uniform_int_distribution<std::size_t> nb(config.binary_mentions_min,
                                                config.binary_mentions_max);
  std::size_t n_unary = nu(rng);
  std::size_t n_binary = nb(rng);
  sample_words(rng, n_unary, config.relevance_bias, relevant_unary_words(scene, lexicon),
               lexicon.unary_words(), bag.unary_words);
  sample_words(rng, n_binary, config.relevance_bias,
               relevant_binary_words(scene, lexicon, config.ambiguity_epsilon),
               lexicon.binary_words(), bag.binary_words);
  return bag;
}

std::size_t Corpus::total_objects() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.scene.size();
  return n;
}

std::size_t Corpus::total_ordered_pairs() const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.scene.size() * (e.scene.size() - 1);
  return n;
}

const CorpusEntry& Corpus::by_scene_id(std::uint32_t id) const {
  if (id < entries.size() && entries[id].scene.id == id) return entries[id];
  for (const auto& e : entries) {
    if (e.scene.id == id) return e;
  }
  throw IdError(fmt::format("unknown scene {}", id));
}

std::vector<std::size_t> mention_counts(const Corpus& corpus, const Lexicon& lexicon) {
  std::vector<std::size_t> counts(lexicon.word_count(), 0);
  for (const auto& e : corpus.entries) {
    for (WordId w : e.mentions.unary_words) ++counts[w.index()];
    for (WordId w : e.mentions.binary_words) ++counts[w.index()];
  }
  return counts;
}

namespace {

// A fresh scene that is guaranteed to contain `word`'s concept (unary words)
// and to mention `word`.
CorpusEntry targeted_entry(const Lexicon& lexicon, const GenerationConfig& config, WordId word,
                           std::uint32_t scene_id, std::uint64_t index) {
  Rng rng = make_rng(config.seed, StreamTag::kTopUp, index);
  CorpusEntry e;
  e.targeted = true;
  e.scene = generate_scene(rng, lexicon, config, scene_id);
  ConceptId c = lexicon.concept_of(word);
  const auto& info = lexicon.concept_info(c);
  if (info.arity == Arity::kUnary) {
    std::uniform_int_distribution<std::size_t> pick(0, e.scene.size() - 1);
    e.scene.objects[pick(rng)].attributes[lexicon.attribute_slot(info.super_concept)] = c;
  }
  e.mentions = generate_mentions(e.scene, rng, lexicon, config);
  auto& words = info.arity == Arity::kUnary ? e.mentions.unary_words : e.mentions.binary_words;
  if (words.empty()) {
    words.push_back(word);
  } else {
    words.back() = word;
  }
  return e;
}

}  // namespace

Corpus generate_corpus(const Lexicon& lexicon, const GenerationConfig& config) {
  Corpus corpus;
  corpus.entries.resize(config.scenes);
  for (std::size_t i = 0; i < config.scenes; ++i) {
    Rng rng = make_rng(config.seed, StreamTag::kScene, i);
    auto& e = corpus.entries[i];
    e.scene = generate_scene(rng, lexicon, config, static_cast<std::uint32_t>(i));
    e.mentions = generate_mentions(e.scene, rng, lexicon, config);
  }
  if (config.min_mentions == 0) return corpus;

  std::vector<std::size_t> counts = mention_counts(corpus, lexicon);
  std::uint64_t top_ups = 0;
  for (std::size_t w = 0; w < lexicon.word_count(); ++w) {
    while (counts[w] < config.min_mentions) {
      if (top_ups >= config.max_top_up_scenes) {
        throw GenerationError(fmt::format(
            "coverage top-up exceeded {} scenes while word '{}' has {} of {} mentions",
            config.max_top_up_scenes, lexicon.word(WordId(static_cast<std::uint32_t>(w))),
            counts[w], config.min_mentions));
      }
      auto id = static_cast<std::uint32_t>(corpus.entries.size());
      CorpusEntry e = targeted_entry(lexicon, config, WordId(static_cast<std::uint32_t>(w)), id,
                                     top_ups++);
      for (WordId m : e.mentions.unary_words) ++counts[m.index()];
      for (WordId m : e.mentions.binary_words) ++counts[m.index()];
      corpus.entries.push_back(std::move(e));
    }
  }
  return corpus;
}

}  // namespace concept_forge
