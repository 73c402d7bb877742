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

#include "concept_forge_cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "concept_forge/analysis.hpp"
#include "concept_forge/config.hpp"
#include "concept_forge/error.hpp"
#include "concept_forge/io.hpp"
#include "concept_forge/pipeline.hpp"

namespace concept_forge::cli {

namespace {

namespace fs = std::filesystem;

// Unknown scene/object or a malformed reference expression.
class ReferenceError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string config;
  std::optional<std::int64_t> seed;
  std::optional<double> noise_sigma;
  std::optional<std::size_t> questions;
  std::string out = "run";
  bool svg = false;
  bool dump_logits = false;
  // analyze
  std::vector<std::string> refs;
  std::string expression;
  std::string annotations;
  double threshold = 0.5;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "TOML run configuration (default: <out>/config.toml)");
  cmd->add_option("--seed", o.seed, "Override the master seed")->check(CLI::NonNegativeNumber);
  cmd->add_option("--noise-sigma", o.noise_sigma, "Override the logit noise sigma")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", o.out, "Run directory")->capture_default_str();
}

RunConfig effective_config(const Options& o) {
  RunConfig cfg;
  if (!o.config.empty()) {
    cfg = load_config(o.config);
  } else if (fs::exists(fs::path(o.out) / "config.toml")) {
    cfg = load_config(fs::path(o.out) / "config.toml");
  }
  if (o.seed) cfg.ontology.generation.seed = static_cast<std::uint64_t>(*o.seed);
  if (o.noise_sigma) cfg.noise.sigma = *o.noise_sigma;
  if (o.questions) cfg.evaluation.questions = *o.questions;
  return cfg;
}

Corpus load_corpus(const fs::path& dir, const Lexicon& lex) {
  std::istringstream in(read_file(dir / "corpus.jsonl"));
  return read_corpus(in, lex);
}

struct ObjectRef {
  std::uint32_t scene = 0;
  std::size_t object = 0;
};

ObjectRef parse_ref(const std::string& text, const Corpus& corpus) {
  static const std::regex kRef(R"(\s*(\d+):(\d+)\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, kRef)) {
    throw ReferenceError(fmt::format("'{}' is not a scene:object reference", text));
  }
  ObjectRef r{static_cast<std::uint32_t>(std::stoul(m[1])), std::stoul(m[2])};
  try {
    const Scene& s = corpus.by_scene_id(r.scene).scene;
    if (r.object >= s.size()) {
      throw ReferenceError(fmt::format("scene {} has no object {}", r.scene, r.object));
    }
  } catch (const IdError& err) {
    throw ReferenceError(err.what());
  }
  return r;
}

std::string ref_name(const ObjectRef& r) { return fmt::format("{}:{}", r.scene, r.object); }

// Induced concept vectors, computed per scene on demand.
class VectorSource {
 public:
  VectorSource(const Workspace& ws, const Corpus& corpus, const BoundaryMap& boundaries,
               const ConceptHierarchy& hierarchy)
      : corpus_(corpus), hierarchy_(hierarchy), clf_(ws.classifier(boundaries)) {}

  ConceptVector at(const ObjectRef& r) const {
    const Scene& s = corpus_.by_scene_id(r.scene).scene;
    return concept_vector(concept_tensors(s, clf_, hierarchy_), r.object, hierarchy_.unary);
  }

 private:
  const Corpus& corpus_;
  const ConceptHierarchy& hierarchy_;
  ConceptClassifier clf_;
};

std::string describe(const ConceptVector& k, const ConceptHierarchy& h, const Lexicon& lex) {
  std::string s;
  for (std::size_t b = 0; b < h.unary.super_concepts.size(); ++b) {
    std::size_t c = h.unary.super_concepts[b][k.choice(b)];
    if (!s.empty()) s += ' ';
    s += lex.word(h.unary.concepts[c].front());
  }
  return s;
}

int cmd_generate(const Options& o, std::ostream& out) {
  RunConfig cfg = effective_config(o);
  Workspace ws(cfg);
  const std::string hash = config_hash(cfg);
  Corpus corpus = ws.generate();
  fs::path dir(o.out);
  fs::create_directories(dir);
  std::ostringstream corpus_text;
  write_corpus(corpus_text, corpus, ws.lexicon(), hash);
  write_file(dir / "corpus.jsonl", corpus_text.str());
  write_file(dir / "manifest.json", manifest_json(cfg, corpus, sha256_hex(corpus_text.str())));
  write_file(dir / "config.toml", to_toml(cfg));
  out << fmt::format("generated {} scenes ({} objects) into {}\nconfig_hash {}\n", corpus.size(),
                     corpus.total_objects(), dir.string(), hash);
  return kOk;
}

int cmd_induce(const Options& o, std::ostream& out) {
  RunConfig cfg = effective_config(o);
  Workspace ws(cfg);
  const Lexicon& lex = ws.lexicon();
  const std::string hash = config_hash(cfg);
  fs::path dir(o.out);
  Corpus corpus = load_corpus(dir, lex);
  InductionResult r = ws.induce(corpus);

  write_file(dir / "boundaries.json", boundaries_json(r.boundaries, lex, hash));
  for (const GammaMatrix* g : {&r.gamma.unary, &r.gamma.binary}) {
    std::ostringstream bin;
    write_gamma(bin, *g, corpus, lex, hash);
    write_file(dir / fmt::format("gamma_{}.bin", arity_name(g->arity)), bin.str());
  }
  for (Arity a : {Arity::kUnary, Arity::kBinary}) {
    std::ostringstream labels;
    write_labels(labels, r.labels, a, lex, hash);
    write_file(dir / fmt::format("labeled_{}.jsonl", arity_name(a)), labels.str());
  }
  const std::string head = fmt::format("# config_hash={}\n", hash);
  write_file(dir / "hierarchy.txt", head + hierarchy_to_text(r.hierarchy, lex));
  write_file(dir / "ground_truth_hierarchy.txt",
             head + hierarchy_to_text(ground_truth_hierarchy(lex), lex));
  write_file(dir / "hierarchy.json", hierarchy_json(r.hierarchy, lex, hash));
  for (const CorrelationTable* t : {&r.correlations.unary, &r.correlations.binary}) {
    std::string_view arity = arity_name(t->arity);
    write_file(dir / fmt::format("theta_{}.csv", arity), correlation_csv(*t, lex, false, hash));
    write_file(dir / fmt::format("conditional_{}.csv", arity), correlation_csv(*t, lex, true, hash));
    if (o.svg) {
      write_file(dir / fmt::format("theta_{}.svg", arity), correlation_svg(*t, lex, hash));
    }
  }
  write_file(dir / "excluded_words.tsv", excluded_report(r.boundaries, r.hierarchy, lex, hash));
  if (o.dump_logits) {
    std::ostringstream logits;
    logits << head;
    write_logit_dump(logits, corpus, ws.simulator());
    write_file(dir / "logits.csv", logits.str());
  }

  const auto gt = ground_truth_hierarchy(lex);
  const bool match = r.hierarchy.unary.same_partition(gt.unary) &&
                     r.hierarchy.binary.same_partition(gt.binary);
  out << hierarchy_to_text(r.hierarchy, lex);
  out << fmt::format("unary concepts {}, super concepts {}; binary concepts {}, super concepts {}\n",
                     r.hierarchy.unary.concept_count(), r.hierarchy.unary.super_concepts.size(),
                     r.hierarchy.binary.concept_count(), r.hierarchy.binary.super_concepts.size());
  out << fmt::format("excluded words {}; matches ground truth: {}\n", r.boundaries.excluded.size(),
                     match ? "yes" : "no");
  return kOk;
}

struct Artifacts {
  Corpus corpus;
  BoundaryMap boundaries;
  ConceptHierarchy hierarchy;
};

Artifacts load_artifacts(const fs::path& dir, const Lexicon& lex) {
  Artifacts a;
  a.corpus = load_corpus(dir, lex);
  a.boundaries = parse_boundaries(read_file(dir / "boundaries.json"), lex);
  a.hierarchy = parse_hierarchy(read_file(dir / "hierarchy.json"), lex);
  return a;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  RunConfig cfg = effective_config(o);
  Workspace ws(cfg);
  const Lexicon& lex = ws.lexicon();
  const std::string hash = config_hash(cfg);
  fs::path dir(o.out);
  Artifacts a = load_artifacts(dir, lex);
  std::vector<QuestionOutcome> outcomes;
  SufficiencyReport rep = ws.evaluate(a.corpus, a.boundaries, a.hierarchy, &outcomes);
  std::ostringstream questions;
  write_questions(questions, outcomes, lex, hash);
  write_file(dir / "questions.jsonl", questions.str());
  write_file(dir / "sufficiency.csv", sufficiency_csv(rep, hash));
  std::string summary = sufficiency_summary(rep, hash);
  write_file(dir / "sufficiency.txt", summary);
  out << summary;
  return kOk;
}

int cmd_distance(const Options& o, std::ostream& out) {
  RunConfig cfg = effective_config(o);
  Workspace ws(cfg);
  const Lexicon& lex = ws.lexicon();
  fs::path dir(o.out);
  Artifacts a = load_artifacts(dir, lex);
  if (o.refs.size() < 2) throw ReferenceError("distance needs at least two scene:object references");
  std::vector<ObjectRef> refs;
  for (const auto& s : o.refs) refs.push_back(parse_ref(s, a.corpus));
  VectorSource vectors(ws, a.corpus, a.boundaries, a.hierarchy);
  std::string csv = fmt::format("# config_hash={}\na,b,distance\n", config_hash(cfg));
  for (std::size_t i = 0; i < refs.size(); ++i) {
    for (std::size_t j = i + 1; j < refs.size(); ++j) {
      csv += fmt::format("{},{},{}\n", ref_name(refs[i]), ref_name(refs[j]),
                         semantic_distance(vectors.at(refs[i]), vectors.at(refs[j])));
    }
  }
  write_file(dir / "analysis_distance.csv", csv);
  out << csv;
  return kOk;
}

int cmd_analogy(const Options& o, std::ostream& out) {
  RunConfig cfg = effective_config(o);
  Workspace ws(cfg);
  const Lexicon& lex = ws.lexicon();
  fs::path dir(o.out);
  Artifacts a = load_artifacts(dir, lex);
  static const std::regex kExpr(R"(\s*(\d+:\d+)\s*-\s*(\d+:\d+)\s*\+\s*(\d+:\d+)\s*)");
  std::smatch m;
  if (!std::regex_match(o.expression, m, kExpr)) {
    throw ReferenceError(
        fmt::format("'{}' is not of the form \"s:o - s:o + s:o\"", o.expression));
  }
  ObjectRef k0 = parse_ref(m[1], a.corpus);
  ObjectRef ks = parse_ref(m[2], a.corpus);
  ObjectRef ka = parse_ref(m[3], a.corpus);

  ConceptClassifier clf = ws.classifier(a.boundaries);
  std::vector<ConceptTensors> tensors = all_concept_tensors(a.corpus, clf, a.hierarchy);
  std::vector<ConceptVector> pool;
  std::vector<ObjectRef> pool_refs;
  auto vector_of = [&](const ObjectRef& r) -> const ConceptVector& {
    for (std::size_t i = 0; i < pool_refs.size(); ++i) {
      if (pool_refs[i].scene == r.scene && pool_refs[i].object == r.object) return pool[i];
    }
    throw ReferenceError(fmt::format("object {} has no valid concept vector", ref_name(r)));
  };
  std::size_t skipped = 0;
  for (std::size_t s = 0; s < a.corpus.size(); ++s) {
    const Scene& scene = a.corpus.entries[s].scene;
    for (std::size_t i = 0; i < scene.size(); ++i) {
      try {
        pool.push_back(concept_vector(tensors[s], i, a.hierarchy.unary));
        pool_refs.push_back({scene.id, i});
      } catch (const ShapeError&) {
        ++skipped;
      }
    }
  }
  const ConceptVector& v0 = vector_of(k0);
  const ConceptVector& vs = vector_of(ks);
  const ConceptVector& va = vector_of(ka);
  AnalogyResult res = analogy_retrieve(pool, v0, vs, va);
  ConceptVector k3 = concept_plus(concept_minus(v0, vs), va);
  std::string csv = fmt::format(
      "# config_hash={}\nk0,k_sub,k_add,target,retrieved,retrieved_concepts,distance,pool_size\n",
      config_hash(cfg));
  csv += fmt::format("{},{},{},{},{},{},{},{}\n", ref_name(k0), ref_name(ks), ref_name(ka),
                     describe(k3, a.hierarchy, lex), ref_name(pool_refs[res.index]),
                     describe(pool[res.index], a.hierarchy, lex), res.distance, pool.size());
  write_file(dir / "analysis_analogy.csv", csv);
  out << csv;
  if (skipped) out << fmt::format("# {} objects without a valid concept vector left out\n", skipped);
  return kOk;
}

int cmd_metrics(const Options& o, std::ostream& out) {
  RunConfig cfg = effective_config(o);
  Workspace ws(cfg);
  const Lexicon& lex = ws.lexicon();
  fs::path dir(o.out);
  std::istringstream gin(read_file(dir / "gamma_unary.bin"));
  GammaMatrix gamma = read_gamma(gin, lex);
  CorrelationTable table = correlation_set(gamma);
  std::vector<RankingRecord> records;
  std::string source = "synthetic";
  if (!o.annotations.empty()) {
    std::istringstream ain(read_file(o.annotations));
    records = parse_annotations(ain);
    source = o.annotations;
  } else {
    records = synthetic_annotations(lex);
  }
  score_from_conditional(records, table, lex);
  AccuracyReport acc = classification_accuracy(records, o.threshold);
  RankingReport rank = ranking_distance(records);
  std::string csv = fmt::format(
      "# config_hash={}\n# annotations={}\nrecords,threshold,a_pos,a_neg,a,ranking_distance,ties\n",
      config_hash(cfg), source);
  csv += fmt::format("{},{},{},{},{},{},{}\n", records.size(), o.threshold, acc.positive,
                     acc.negative, acc.combined, rank.distance, rank.ties);
  write_file(dir / "analysis_metrics.csv", csv);
  out << csv;
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Concept induction from simulated visual-language attention", "concept_forge"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("generate", "Generate a scene corpus with mention bags");
  add_common(gen, o);

  auto* ind = app.add_subcommand("induce", "Induce concepts and super concepts from a corpus");
  add_common(ind, o);
  ind->add_flag("--svg", o.svg, "Also write theta heatmaps as SVG");
  ind->add_flag("--dump-logits", o.dump_logits, "Also write every simulated logit as CSV");

  auto* ev = app.add_subcommand("evaluate", "Answer generated questions from concept tensors");
  add_common(ev, o);
  ev->add_option("--questions", o.questions, "Number of questions");

  auto* an = app.add_subcommand("analyze", "Concept-space analysis");
  an->require_subcommand(1);
  auto* dist = an->add_subcommand("distance", "Semantic distance between objects");
  add_common(dist, o);
  dist->add_option("refs", o.refs, "Objects as scene:object")->required();
  auto* ana = an->add_subcommand("analogy", "Retrieve the object closest to k0 - k_sub + k_add");
  add_common(ana, o);
  ana->add_option("expression", o.expression, "\"s:o - s:o + s:o\"")->required();
  auto* met = an->add_subcommand("metrics", "Synonym classification accuracy and ranking distance");
  add_common(met, o);
  met->add_option("--annotations", o.annotations, "Annotation file (default: synthetic)");
  met->add_option("--threshold", o.threshold, "Classification threshold")->capture_default_str();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) return cmd_generate(o, out);
    if (ind->parsed()) return cmd_induce(o, out);
    if (ev->parsed()) return cmd_evaluate(o, out);
    if (dist->parsed()) return cmd_distance(o, out);
    if (ana->parsed()) return cmd_analogy(o, out);
    if (met->parsed()) return cmd_metrics(o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ArtifactError& e) {
    err << "artifact error: " << e.what() << '\n';
    return kMissingArtifact;
  } catch (const ReferenceError& e) {
    err << "bad reference: " << e.what() << '\n';
    return kBadReference;
  } catch (const StageError& e) {
    err << "stage '" << e.stage() << "' failed: " << e.what() << '\n';
    return kFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace concept_forge::cli
