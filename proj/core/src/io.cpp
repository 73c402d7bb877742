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

#include "concept_forge/io.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "concept_forge/error.hpp"
#include "json.hpp"

namespace concept_forge {

namespace {

using nlohmann::json;

constexpr std::string_view kGammaMagic = "CFGAMMA1";

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::exception& err) {
    throw ArtifactError(fmt::format("{}: {}", what, err.what()));
  }
}

// Wraps nlohmann's access errors so callers see one exception type.
template <typename F>
auto guarded(std::string_view what, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& err) {
    throw ArtifactError(fmt::format("{}: {}", what, err.what()));
  }
}

WordId word_or_throw(const Lexicon& lex, const std::string& w, std::string_view what) {
  auto id = lex.find_word(w);
  if (!id) throw ArtifactError(fmt::format("{}: unknown word '{}'", what, w));
  return *id;
}

ConceptId concept_or_throw(const Lexicon& lex, const std::string& name, std::string_view what) {
  auto id = lex.find_concept(name);
  if (!id) throw ArtifactError(fmt::format("{}: unknown concept '{}'", what, name));
  return *id;
}

SuperConceptId super_or_throw(const Lexicon& lex, const std::string& name, std::string_view what) {
  auto id = lex.find_super_concept(name);
  if (!id) throw ArtifactError(fmt::format("{}: unknown super concept '{}'", what, name));
  return *id;
}

json words_json(const std::vector<WordId>& words, const Lexicon& lex) {
  json a = json::array();
  for (WordId w : words) a.push_back(lex.word(w));
  return a;
}

std::vector<WordId> words_from(const json& a, const Lexicon& lex, std::string_view what) {
  std::vector<WordId> out;
  for (const auto& w : a) out.push_back(word_or_throw(lex, w.get<std::string>(), what));
  return out;
}

json level_json(const InducedLevel& level, const Lexicon& lex) {
  json concepts = json::array();
  for (const auto& c : level.concepts) concepts.push_back(words_json(c, lex));
  return {{"arity", std::string(arity_name(level.arity))},
          {"concepts", concepts},
          {"super_concepts", level.super_concepts},
          {"excluded_words", words_json(level.excluded_words, lex)}};
}

InducedLevel level_from(const json& j, Arity arity, const Lexicon& lex) {
  std::vector<std::vector<WordId>> concepts;
  for (const auto& c : j.at("concepts")) concepts.push_back(words_from(c, lex, "hierarchy"));
  auto supers = j.at("super_concepts").get<std::vector<std::vector<std::size_t>>>();
  for (const auto& s : supers) {
    for (std::size_t c : s) {
      if (c >= concepts.size()) throw ArtifactError("hierarchy: super concept member out of range");
    }
  }
  try {
    return make_level(arity, std::move(concepts), std::move(supers),
                      words_from(j.at("excluded_words"), lex, "hierarchy"));
  } catch (const HierarchyError& err) {
    throw ArtifactError(fmt::format("hierarchy: {}", err.what()));
  }
}

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), 8);
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), sizeof(T))) {
    throw ArtifactError("gamma file truncated");
  }
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
  return v;
}

std::string hash_line(std::string_view config_hash) {
  return fmt::format("# config_hash={}\n", config_hash);
}

std::string csv_number(double v) { return fmt::format("{}", v); }

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError(fmt::format("missing artifact '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArtifactError(fmt::format("cannot write '{}'", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ArtifactError(fmt::format("write to '{}' failed", path.string()));
}

std::string jsonl_header(std::string_view kind, std::string_view config_hash) {
  json h = {{"kind", kind}, {"config_hash", config_hash}};
  return h.dump() + "\n";
}

std::string read_jsonl_header(std::istream& in, std::string_view kind) {
  std::string line;
  if (!std::getline(in, line)) throw ArtifactError(fmt::format("{}: empty file", kind));
  json h = parse_json(line, kind);
  return guarded(kind, [&] {
    if (h.at("kind").get<std::string>() != kind) {
      throw ArtifactError(fmt::format("expected a '{}' file, found '{}'", kind,
                                      h.at("kind").get<std::string>()));
    }
    return h.at("config_hash").get<std::string>();
  });
}

// ---------------------------------------------------------------------------
// Corpus

void write_corpus(std::ostream& out, const Corpus& corpus, const Lexicon& lexicon,
                  std::string_view config_hash) {
  out << jsonl_header("corpus", config_hash);
  for (const auto& e : corpus.entries) {
    json objects = json::array();
    for (const auto& o : e.scene.objects) {
      json attrs = json::array();
      for (ConceptId c : o.attributes) attrs.push_back(lexicon.concept_info(c).name);
      objects.push_back(
          {{"id", o.id}, {"x", o.position.x}, {"y", o.position.y}, {"attributes", attrs}});
    }
    json rec = {{"scene_id", e.scene.id},
                {"targeted", e.targeted},
                {"objects", objects},
                {"unary_mentions", words_json(e.mentions.unary_words, lexicon)},
                {"binary_mentions", words_json(e.mentions.binary_words, lexicon)}};
    out << rec.dump() << '\n';
  }
}

Corpus read_corpus(std::istream& in, const Lexicon& lexicon) {
  read_jsonl_header(in, "corpus");
  Corpus corpus;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string what = fmt::format("corpus line {}", lineno);
    json rec = parse_json(line, what);
    guarded(what, [&] {
      CorpusEntry e;
      e.scene.id = rec.at("scene_id").get<std::uint32_t>();
      e.targeted = rec.at("targeted").get<bool>();
      for (const auto& o : rec.at("objects")) {
        ObjectInstance obj;
        obj.id = o.at("id").get<std::uint32_t>();
        obj.position = {o.at("x").get<double>(), o.at("y").get<double>()};
        for (const auto& a : o.at("attributes")) {
          obj.attributes.push_back(concept_or_throw(lexicon, a.get<std::string>(), what));
        }
        if (obj.attributes.size() != lexicon.unary_super_concepts().size()) {
          throw ArtifactError(fmt::format("{}: object {} has {} attributes", what, obj.id,
                                          obj.attributes.size()));
        }
        e.scene.objects.push_back(std::move(obj));
      }
      e.mentions.scene_id = e.scene.id;
      e.mentions.unary_words = words_from(rec.at("unary_mentions"), lexicon, what);
      e.mentions.binary_words = words_from(rec.at("binary_mentions"), lexicon, what);
      corpus.entries.push_back(std::move(e));
      return 0;
    });
  }
  return corpus;
}

std::string manifest_json(const RunConfig& config, const Corpus& corpus,
                          std::string_view corpus_sha256) {
  std::size_t targeted = 0;
  for (const auto& e : corpus.entries) targeted += e.targeted;
  json m = {{"config_hash", config_hash(config)},
            {"config", json::parse(canonical_json(config))},
            {"scenes", corpus.size()},
            {"targeted_scenes", targeted},
            {"objects", corpus.total_objects()},
            {"files", {{"corpus.jsonl", {{"sha256", corpus_sha256}}}}}};
  return m.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Boundaries

std::string boundaries_json(const BoundaryMap& boundaries, const Lexicon& lexicon,
                            std::string_view config_hash) {
  json words = json::array();
  for (std::size_t w = 0; w < lexicon.word_count(); ++w) {
    WordId id(static_cast<std::uint32_t>(w));
    json rec = {{"word", lexicon.word(id)}};
    if (boundaries.has(id)) {
      rec["boundary"] = boundaries.at(id);
      json comps = json::array();
      for (const auto& c : boundaries.models[w]->components()) {
        comps.push_back({{"weight", c.weight}, {"mean", c.mean}, {"variance", c.variance}});
      }
      rec["model"] = comps;
    } else {
      rec["boundary"] = nullptr;
      for (const auto& ex : boundaries.excluded) {
        if (ex.word == id) rec["excluded"] = ex.reason;
      }
    }
    words.push_back(rec);
  }
  json j = {{"config_hash", config_hash}, {"words", words}};
  return j.dump(2) + "\n";
}

BoundaryMap parse_boundaries(std::string_view text, const Lexicon& lexicon) {
  json j = parse_json(text, "boundaries");
  return guarded("boundaries", [&] {
    BoundaryMap map;
    map.boundary.resize(lexicon.word_count());
    map.models.resize(lexicon.word_count());
    std::vector<std::string> reasons(lexicon.word_count(), "not listed");
    for (const auto& rec : j.at("words")) {
      WordId w = word_or_throw(lexicon, rec.at("word").get<std::string>(), "boundaries");
      if (rec.at("boundary").is_null()) {
        reasons[w.index()] = rec.value("excluded", std::string("excluded"));
        continue;
      }
      map.boundary[w.index()] = rec.at("boundary").get<double>();
      std::vector<GaussianComponent> comps;
      for (const auto& c : rec.at("model")) {
        comps.push_back({c.at("weight").get<double>(), c.at("mean").get<double>(),
                         c.at("variance").get<double>()});
      }
      try {
        map.models[w.index()] = GmmModel(std::move(comps));
      } catch (const Error& err) {
        throw ArtifactError(fmt::format("boundaries: word '{}': {}", lexicon.word(w), err.what()));
      }
    }
    for (std::size_t w = 0; w < lexicon.word_count(); ++w) {
      if (!map.boundary[w]) map.excluded.push_back({WordId(static_cast<std::uint32_t>(w)), reasons[w]});
    }
    return map;
  });
}

// ---------------------------------------------------------------------------
// Gamma

void write_gamma(std::ostream& out, const GammaMatrix& gamma, const Corpus& corpus,
                 const Lexicon& lexicon, std::string_view config_hash) {
  json scenes = json::array();
  for (const auto& e : corpus.entries) scenes.push_back({e.scene.id, e.scene.size()});
  json header = {{"arity", std::string(arity_name(gamma.arity))},
                 {"rows", words_json(gamma.row_words, lexicon)},
                 {"columns", gamma.bits.cols()},
                 {"words_per_row", gamma.bits.words_per_row()},
                 {"scene_objects", scenes},
                 {"config_hash", config_hash}};
  std::string h = header.dump();
  out.write(kGammaMagic.data(), static_cast<std::streamsize>(kGammaMagic.size()));
  put_u32(out, static_cast<std::uint32_t>(h.size()));
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  for (std::uint64_t w : gamma.bits.words()) put_u64(out, w);
}

GammaMatrix read_gamma(std::istream& in, const Lexicon& lexicon) {
  char magic[8];
  if (!in.read(magic, 8) || std::string_view(magic, 8) != kGammaMagic) {
    throw ArtifactError("not a gamma file (bad magic)");
  }
  auto len = get_le<std::uint32_t>(in);
  std::string h(len, '\0');
  if (!in.read(h.data(), len)) throw ArtifactError("gamma file truncated in header");
  json header = parse_json(h, "gamma header");
  return guarded("gamma header", [&] {
    GammaMatrix g;
    std::string arity = header.at("arity").get<std::string>();
    if (arity != arity_name(Arity::kUnary) && arity != arity_name(Arity::kBinary)) {
      throw ArtifactError(fmt::format("gamma header: bad arity '{}'", arity));
    }
    g.arity = arity == arity_name(Arity::kUnary) ? Arity::kUnary : Arity::kBinary;
    g.row_words = words_from(header.at("rows"), lexicon, "gamma header");
    const auto cols = header.at("columns").get<std::size_t>();
    for (const auto& s : header.at("scene_objects")) {
      auto id = s.at(0).get<std::uint32_t>();
      auto n = s.at(1).get<std::uint32_t>();
      for (std::uint32_t o = 0; o < n; ++o) {
        if (g.arity == Arity::kUnary) {
          g.columns.push_back({id, o, 0});
          continue;
        }
        for (std::uint32_t a = 0; a < n; ++a) {
          if (a != o) g.columns.push_back({id, o, a});
        }
      }
    }
    if (g.columns.size() != cols) {
      throw ArtifactError(fmt::format("gamma header: {} columns but scenes give {}", cols,
                                      g.columns.size()));
    }
    g.bits = BitMatrix(g.row_words.size(), cols);
    for (auto& w : g.bits.mutable_words()) w = get_le<std::uint64_t>(in);
    return g;
  });
}

void write_labels(std::ostream& out, const LabeledSets& labels, Arity arity,
                  const Lexicon& lexicon, std::string_view config_hash) {
  if (arity == Arity::kUnary) {
    out << jsonl_header("labeled_unary", config_hash);
    for (const auto& l : labels.unary) {
      json r = {{"scene", l.scene}, {"object", l.object}, {"word", lexicon.word(l.word)},
                {"label", l.label}};
      out << r.dump() << '\n';
    }
  } else {
    out << jsonl_header("labeled_binary", config_hash);
    for (const auto& l : labels.binary) {
      json r = {{"scene", l.scene},   {"object", l.object},          {"anchor", l.anchor},
                {"word", lexicon.word(l.word)}, {"label", l.label}};
      out << r.dump() << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Hierarchy and correlations

std::string hierarchy_json(const ConceptHierarchy& hierarchy, const Lexicon& lexicon,
                           std::string_view config_hash) {
  json j = {{"config_hash", config_hash},
            {"unary", level_json(hierarchy.unary, lexicon)},
            {"binary", level_json(hierarchy.binary, lexicon)}};
  return j.dump(2) + "\n";
}

ConceptHierarchy parse_hierarchy(std::string_view text, const Lexicon& lexicon) {
  json j = parse_json(text, "hierarchy");
  return guarded("hierarchy", [&] {
    ConceptHierarchy h;
    h.unary = level_from(j.at("unary"), Arity::kUnary, lexicon);
    h.binary = level_from(j.at("binary"), Arity::kBinary, lexicon);
    return h;
  });
}

std::string correlation_csv(const CorrelationTable& table, const Lexicon& lexicon,
                            bool conditional, std::string_view config_hash) {
  std::string out = hash_line(config_hash);
  out += conditional ? "given" : "word";
  for (WordId w : table.words) out += "," + lexicon.word(w);
  out += '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out += lexicon.word(table.words[i]);
    for (std::size_t j = 0; j < table.size(); ++j) {
      out += "," + csv_number(conditional ? table.conditional_at(i, j) : table.at(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string correlation_svg(const CorrelationTable& table, const Lexicon& lexicon,
                            std::string_view config_hash) {
  constexpr int kCell = 18;
  constexpr int kMargin = 80;
  const int n = static_cast<int>(table.size());
  const int side = kMargin + n * kCell + 10;
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" "
      "font-family=\"sans-serif\" font-size=\"10\">\n<!-- config_hash={1} -->\n",
      side, config_hash);
  for (int i = 0; i < n; ++i) {
    const std::string& w = lexicon.word(table.words[static_cast<std::size_t>(i)]);
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", kMargin - 4,
                       kMargin + i * kCell + 13, w);
    out += fmt::format(
        "<text transform=\"translate({},{}) rotate(-60)\">{}</text>\n",
        kMargin + i * kCell + 12, kMargin - 4, w);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double t = table.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) / 2.0;
      int shade = static_cast<int>(255.0 * (1.0 - std::clamp(t, 0.0, 1.0)) + 0.5);
      out += fmt::format(
          "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"rgb({},{},{})\"/>\n",
          kMargin + j * kCell, kMargin + i * kCell, kCell, kCell, shade, shade, shade);
    }
  }
  out += "</svg>\n";
  return out;
}

std::string excluded_report(const BoundaryMap& boundaries, const ConceptHierarchy& hierarchy,
                            const Lexicon& lexicon, std::string_view config_hash) {
  std::string out = hash_line(config_hash);
  out += "word\treason\n";
  for (const auto& ex : boundaries.excluded) {
    out += fmt::format("{}\t{}\n", lexicon.word(ex.word), ex.reason);
  }
  for (const InducedLevel* level : {&hierarchy.unary, &hierarchy.binary}) {
    for (WordId w : level->excluded_words) {
      if (boundaries.has(w)) out += fmt::format("{}\tno positive example in the corpus\n", lexicon.word(w));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Programs and evaluation

std::string answer_json(const Answer& answer, const Lexicon& lexicon) {
  switch (answer.index()) {
    case 0: return json(std::get<0>(answer)).dump();
    case 1: return json(std::get<1>(answer)).dump();
    default: return json(lexicon.concept_info(std::get<2>(answer)).name).dump();
  }
}

std::string program_json(const Program& program, const Lexicon& lexicon) {
  json nodes = json::array();
  for (const auto& n : program.nodes) {
    json j = {{"op", std::string(op_name(n.op))}, {"inputs", n.inputs}};
    switch (n.op) {
      case OpCode::kFilter:
        j["super_concept"] = lexicon.super_concept(n.super_concept).name;
        j["concept"] = lexicon.concept_info(n.concept_id).name;
        break;
      case OpCode::kRelate:
        j["concept"] = lexicon.concept_info(n.concept_id).name;
        break;
      case OpCode::kQuery:
      case OpCode::kCompareAttr:
        j["super_concept"] = lexicon.super_concept(n.super_concept).name;
        break;
      case OpCode::kCompareCount:
        j["comparison"] = std::string(comparison_name(n.comparison));
        break;
      default:
        break;
    }
    nodes.push_back(std::move(j));
  }
  json p = {{"family", std::string(family_name(program.family))}, {"nodes", nodes}};
  return p.dump();
}

Program parse_program(std::string_view text, const Lexicon& lexicon) {
  json j = parse_json(text, "program");
  return guarded("program", [&] {
    Program p;
    auto family = parse_family(j.at("family").get<std::string>());
    if (!family) throw ArtifactError("program: unknown family");
    p.family = *family;
    for (const auto& jn : j.at("nodes")) {
      ProgramNode n;
      auto op = parse_op(jn.at("op").get<std::string>());
      if (!op) throw ArtifactError(fmt::format("program: unknown op '{}'", jn.at("op").dump()));
      n.op = *op;
      n.inputs = jn.at("inputs").get<std::vector<std::size_t>>();
      if (jn.contains("super_concept")) {
        n.super_concept = super_or_throw(lexicon, jn.at("super_concept").get<std::string>(), "program");
      }
      if (jn.contains("concept")) {
        n.concept_id = concept_or_throw(lexicon, jn.at("concept").get<std::string>(), "program");
      }
      if (jn.contains("comparison")) {
        auto c = parse_comparison(jn.at("comparison").get<std::string>());
        if (!c) throw ArtifactError("program: unknown comparison");
        n.comparison = *c;
      }
      p.nodes.push_back(std::move(n));
    }
    return p;
  });
}

void write_questions(std::ostream& out, const std::vector<QuestionOutcome>& outcomes,
                     const Lexicon& lexicon, std::string_view config_hash) {
  out << jsonl_header("questions", config_hash);
  for (std::size_t q = 0; q < outcomes.size(); ++q) {
    const auto& o = outcomes[q];
    json r = {{"question", q},
              {"scene", o.question.scene},
              {"program", json::parse(program_json(o.question.program, lexicon))},
              {"gold", json::parse(answer_json(o.question.gold, lexicon))},
              {"predicted", o.predicted ? json::parse(answer_json(*o.predicted, lexicon)) : json()},
              {"status", o.status}};
    out << r.dump() << '\n';
  }
}

std::string sufficiency_csv(const SufficiencyReport& report, std::string_view config_hash) {
  std::string out = hash_line(config_hash);
  out += "family,total,correct,unanswerable,failed,agreement,noise_sigma\n";
  auto row = [&](std::string_view name, const FamilyStats& s) {
    out += fmt::format("{},{},{},{},{},{:.6f},{}\n", name, s.total, s.correct, s.unanswerable,
                       s.failed, s.agreement(), report.noise_sigma);
  };
  for (Family f : kAllFamilies) row(family_name(f), report.families[static_cast<std::size_t>(f)]);
  row("overall", report.overall);
  return out;
}

std::string sufficiency_summary(const SufficiencyReport& report, std::string_view config_hash) {
  std::string out = hash_line(config_hash);
  out += fmt::format("questions: {}   noise sigma: {}\n\n", report.n_questions, report.noise_sigma);
  std::string head;
  std::string vals;
  for (Family f : kAllFamilies) {
    head += fmt::format("{:>12}", family_name(f));
    vals += fmt::format("{:>11.2f}%", 100.0 * report.families[static_cast<std::size_t>(f)].agreement());
  }
  out += fmt::format("{}{:>12}\n{}{:>11.2f}%\n\n", head, "overall", vals,
                     100.0 * report.overall.agreement());
  out += fmt::format("correct: {}  wrong: {}  unanswerable: {}  failed: {}\n",
                     report.overall.correct,
                     report.overall.total - report.overall.correct - report.overall.unanswerable -
                         report.overall.failed,
                     report.overall.unanswerable, report.overall.failed);
  return out;
}

}  // namespace concept_forge
