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

#include "concept_forge/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "concept_forge/error.hpp"
#include "json.hpp"
#include "toml.hpp"

namespace concept_forge {

namespace {

using nlohmann::json;

int line_of(const toml::node& n) { return static_cast<int>(n.source().begin.line); }

double as_double(const toml::node& n, std::string_view key) {
  if (auto v = n.value_exact<double>()) return *v;
  if (auto v = n.value_exact<std::int64_t>()) return static_cast<double>(*v);
  throw ConfigError(fmt::format("'{}' must be a number", key), line_of(n));
}

std::int64_t as_int(const toml::node& n, std::string_view key) {
  if (auto v = n.value_exact<std::int64_t>()) return *v;
  throw ConfigError(fmt::format("'{}' must be an integer", key), line_of(n));
}

std::size_t as_count(const toml::node& n, std::string_view key) {
  std::int64_t v = as_int(n, key);
  if (v < 0) throw ConfigError(fmt::format("'{}' must be non-negative", key), line_of(n));
  return static_cast<std::size_t>(v);
}

std::string as_string(const toml::node& n, std::string_view key) {
  if (auto v = n.value_exact<std::string>()) return *v;
  throw ConfigError(fmt::format("'{}' must be a string", key), line_of(n));
}

std::vector<std::string> as_words(const toml::node& n, std::string_view key) {
  const toml::array* arr = n.as_array();
  if (!arr) throw ConfigError(fmt::format("'{}' must be an array of words", key), line_of(n));
  std::vector<std::string> out;
  for (const toml::node& w : *arr) out.push_back(as_string(w, key));
  return out;
}

// Dispatches every key of a table to its handler; unknown keys are errors.
using Handler = std::function<void(const toml::node&)>;

void read_table(const toml::table& table, std::string_view section,
                const std::map<std::string, Handler, std::less<>>& handlers) {
  for (auto&& [key, node] : table) {
    auto it = handlers.find(key.str());
    if (it == handlers.end()) {
      throw ConfigError(fmt::format("unknown key '{}' in [{}]", key.str(), section),
                        static_cast<int>(key.source().begin.line));
    }
    it->second(node);
  }
}

const toml::table& require_table(const toml::node& n, std::string_view name) {
  const toml::table* t = n.as_table();
  if (!t) throw ConfigError(fmt::format("'{}' must be a table", name), line_of(n));
  return *t;
}

void read_generation(const toml::table& t, GenerationConfig& g) {
  read_table(t, "generation",
             {
                 {"seed",
                  [&](const toml::node& n) {
                    std::int64_t v = as_int(n, "seed");
                    if (v < 0) throw ConfigError("'seed' must be non-negative", line_of(n));
                    g.seed = static_cast<std::uint64_t>(v);
                  }},
                 {"scenes", [&](const toml::node& n) { g.scenes = as_count(n, "scenes"); }},
                 {"min_objects", [&](const toml::node& n) { g.min_objects = as_count(n, "min_objects"); }},
                 {"max_objects", [&](const toml::node& n) { g.max_objects = as_count(n, "max_objects"); }},
                 {"min_separation",
                  [&](const toml::node& n) { g.min_separation = as_double(n, "min_separation"); }},
                 {"ambiguity_epsilon",
                  [&](const toml::node& n) { g.ambiguity_epsilon = as_double(n, "ambiguity_epsilon"); }},
                 {"relevance_bias",
                  [&](const toml::node& n) { g.relevance_bias = as_double(n, "relevance_bias"); }},
                 {"unary_mentions_min",
                  [&](const toml::node& n) { g.unary_mentions_min = as_count(n, "unary_mentions_min"); }},
                 {"unary_mentions_max",
                  [&](const toml::node& n) { g.unary_mentions_max = as_count(n, "unary_mentions_max"); }},
                 {"binary_mentions_min",
                  [&](const toml::node& n) { g.binary_mentions_min = as_count(n, "binary_mentions_min"); }},
                 {"binary_mentions_max",
                  [&](const toml::node& n) { g.binary_mentions_max = as_count(n, "binary_mentions_max"); }},
                 {"min_mentions", [&](const toml::node& n) { g.min_mentions = as_count(n, "min_mentions"); }},
                 {"max_placement_retries",
                  [&](const toml::node& n) { g.max_placement_retries = as_count(n, "max_placement_retries"); }},
                 {"max_top_up_scenes",
                  [&](const toml::node& n) { g.max_top_up_scenes = as_count(n, "max_top_up_scenes"); }},
             });
}

void check_generation(const GenerationConfig& g, int line) {
  auto fail = [&](std::string msg) { throw ConfigError("[generation] " + msg, line); };
  if (g.scenes == 0) fail("scenes must be positive");
  if (g.min_objects == 0 || g.min_objects > g.max_objects) {
    fail("need 1 <= min_objects <= max_objects");
  }
  if (g.max_objects > 64) fail("max_objects must be at most 64");
  if (!(g.min_separation >= 0.0) || !(g.ambiguity_epsilon >= 0.0)) {
    fail("min_separation and ambiguity_epsilon must be non-negative");
  }
  if (!(g.relevance_bias >= 0.0 && g.relevance_bias <= 1.0)) fail("relevance_bias must be in [0, 1]");
  if (g.unary_mentions_min > g.unary_mentions_max || g.binary_mentions_min > g.binary_mentions_max) {
    fail("mention ranges need min <= max");
  }
}

SuperConceptConfig read_super_concept(const toml::table& t) {
  SuperConceptConfig sc;
  sc.line = line_of(t);
  bool has_concepts = false;
  read_table(t, "super_concepts",
             {
                 {"name", [&](const toml::node& n) { sc.name = as_string(n, "name"); }},
                 {"concepts",
                  [&](const toml::node& n) {
                    const toml::array* arr = n.as_array();
                    if (!arr) {
                      throw ConfigError("'concepts' must be an array of word arrays", line_of(n));
                    }
                    for (const toml::node& c : *arr) sc.concepts.push_back(as_words(c, "concepts"));
                    has_concepts = true;
                  }},
             });
  if (sc.name.empty()) throw ConfigError("super concept needs a 'name'", sc.line);
  if (!has_concepts) throw ConfigError(fmt::format("super concept '{}' needs 'concepts'", sc.name), sc.line);
  return sc;
}

BinaryPairConfig read_binary(const toml::table& t) {
  BinaryPairConfig bc;
  bc.line = line_of(t);
  read_table(t, "binary_concepts",
             {
                 {"name", [&](const toml::node& n) { bc.name = as_string(n, "name"); }},
                 {"axis",
                  [&](const toml::node& n) {
                    std::string a = as_string(n, "axis");
                    if (a == "x") {
                      bc.axis = Axis::kX;
                    } else if (a == "y") {
                      bc.axis = Axis::kY;
                    } else {
                      throw ConfigError(fmt::format("axis must be \"x\" or \"y\", got \"{}\"", a),
                                        line_of(n));
                    }
                  }},
                 {"lower", [&](const toml::node& n) { bc.lower = as_words(n, "lower"); }},
                 {"upper", [&](const toml::node& n) { bc.upper = as_words(n, "upper"); }},
             });
  if (bc.name.empty()) throw ConfigError("binary concept pair needs a 'name'", bc.line);
  return bc;
}

template <typename F>
void for_each_table(const toml::node& n, std::string_view name, F&& fn) {
  const toml::array* arr = n.as_array();
  if (!arr) throw ConfigError(fmt::format("'{}' must be an array of tables ([[{}]])", name, name), line_of(n));
  for (const toml::node& e : *arr) fn(require_table(e, name));
}

std::string hex(const unsigned char* p, std::size_t n) {
  std::string out;
  out.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) out += fmt::format("{:02x}", p[i]);
  return out;
}

// Shortest text that reads back to the same double.
std::string toml_double(double v) {
  std::string s = fmt::format("{}", v);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string toml_words(const std::vector<std::string>& words) {
  std::string s = "[";
  for (std::size_t i = 0; i < words.size(); ++i) {
    s += fmt::format("{}\"{}\"", i ? ", " : "", words[i]);
  }
  return s + "]";
}

}  // namespace

RunConfig parse_config(std::string_view toml_text) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& err) {
    throw ConfigError(std::string(err.description()), static_cast<int>(err.source().begin.line));
  }

  RunConfig cfg;
  std::vector<SuperConceptConfig> supers;
  std::vector<BinaryPairConfig> binaries;
  bool saw_supers = false;
  bool saw_binaries = false;
  int generation_line = 0;
  int noise_line = 0;

  read_table(
      root, "root",
      {
          {"generation",
           [&](const toml::node& n) {
             generation_line = line_of(n);
             read_generation(require_table(n, "generation"), cfg.ontology.generation);
           }},
          {"noise",
           [&](const toml::node& n) {
             noise_line = line_of(n);
             LogitNoiseModel& m = cfg.noise;
             read_table(require_table(n, "noise"), "noise",
                        {
                            {"sigma",
                             [&](const toml::node& v) {
                               m.sigma = as_double(v, "sigma");
                               if (!(m.sigma >= 0.0)) {
                                 throw ConfigError("'sigma' must be non-negative", line_of(v));
                               }
                             }},
                            {"mu_pos", [&](const toml::node& v) { m.mu_pos = as_double(v, "mu_pos"); }},
                            {"mu_neg", [&](const toml::node& v) { m.mu_neg = as_double(v, "mu_neg"); }},
                            {"mu_amb", [&](const toml::node& v) { m.mu_amb = as_double(v, "mu_amb"); }},
                        });
           }},
          {"induction",
           [&](const toml::node& n) {
             InductionConfig& ic = cfg.induction;
             read_table(
                 require_table(n, "induction"), "induction",
                 {
                     {"tau",
                      [&](const toml::node& v) {
                        ic.tau = as_double(v, "tau");
                        if (!(ic.tau > 0.0)) throw ConfigError("'tau' must be positive", line_of(v));
                      }},
                     {"em_tolerance",
                      [&](const toml::node& v) {
                        ic.em.tolerance = as_double(v, "em_tolerance");
                        if (!(ic.em.tolerance > 0.0)) {
                          throw ConfigError("'em_tolerance' must be positive", line_of(v));
                        }
                      }},
                     {"em_max_iterations",
                      [&](const toml::node& v) {
                        ic.em.max_iterations = as_count(v, "em_max_iterations");
                        if (ic.em.max_iterations == 0) {
                          throw ConfigError("'em_max_iterations' must be positive", line_of(v));
                        }
                      }},
                     {"var_floor",
                      [&](const toml::node& v) {
                        ic.em.var_floor = as_double(v, "var_floor");
                        if (!(ic.em.var_floor > 0.0)) {
                          throw ConfigError("'var_floor' must be positive", line_of(v));
                        }
                      }},
                     {"min_separation_d",
                      [&](const toml::node& v) { ic.min_separation_d = as_double(v, "min_separation_d"); }},
                     {"min_samples",
                      [&](const toml::node& v) { ic.min_samples = as_count(v, "min_samples"); }},
                 });
           }},
          {"evaluation",
           [&](const toml::node& n) {
             EvaluationConfig& ec = cfg.evaluation;
             read_table(
                 require_table(n, "evaluation"), "evaluation",
                 {
                     {"questions", [&](const toml::node& v) { ec.questions = as_count(v, "questions"); }},
                     {"max_retries",
                      [&](const toml::node& v) { ec.question.max_retries = as_count(v, "max_retries"); }},
                     {"max_filters",
                      [&](const toml::node& v) { ec.question.max_filters = as_count(v, "max_filters"); }},
                     {"relate_probability",
                      [&](const toml::node& v) {
                        double p = as_double(v, "relate_probability");
                        if (!(p >= 0.0 && p <= 1.0)) {
                          throw ConfigError("'relate_probability' must be in [0, 1]", line_of(v));
                        }
                        ec.question.relate_probability = p;
                      }},
                 });
           }},
          {"super_concepts",
           [&](const toml::node& n) {
             saw_supers = true;
             for_each_table(n, "super_concepts",
                            [&](const toml::table& t) { supers.push_back(read_super_concept(t)); });
           }},
          {"binary_concepts",
           [&](const toml::node& n) {
             saw_binaries = true;
             for_each_table(n, "binary_concepts",
                            [&](const toml::table& t) { binaries.push_back(read_binary(t)); });
           }},
      });

  if (saw_supers) {
    cfg.ontology.super_concepts = std::move(supers);
    cfg.ontology.binary_concepts = std::move(binaries);
  } else if (saw_binaries) {
    cfg.ontology.binary_concepts = std::move(binaries);
  }
  check_generation(cfg.ontology.generation, generation_line);
  try {
    cfg.noise.validate();
  } catch (const ConfigError& err) {
    throw ConfigError(err.what(), noise_line);
  }
  // Surfaces vocabulary problems (duplicate words, unpaired relations) now.
  build_lexicon(cfg.ontology);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& err) {
    throw ConfigError(fmt::format("{}: {}", path.string(), err.what()), err.line());
  }
}

std::string canonical_json(const RunConfig& c) {
  const GenerationConfig& g = c.ontology.generation;
  json j;
  j["generation"] = {
      {"seed", g.seed},
      {"scenes", g.scenes},
      {"min_objects", g.min_objects},
      {"max_objects", g.max_objects},
      {"min_separation", g.min_separation},
      {"ambiguity_epsilon", g.ambiguity_epsilon},
      {"relevance_bias", g.relevance_bias},
      {"unary_mentions_min", g.unary_mentions_min},
      {"unary_mentions_max", g.unary_mentions_max},
      {"binary_mentions_min", g.binary_mentions_min},
      {"binary_mentions_max", g.binary_mentions_max},
      {"min_mentions", g.min_mentions},
      {"max_placement_retries", g.max_placement_retries},
      {"max_top_up_scenes", g.max_top_up_scenes},
  };
  j["noise"] = {{"sigma", c.noise.sigma},
                {"mu_pos", c.noise.mu_pos},
                {"mu_neg", c.noise.mu_neg},
                {"mu_amb", c.noise.mu_amb}};
  j["induction"] = {{"tau", c.induction.tau},
                    {"em_tolerance", c.induction.em.tolerance},
                    {"em_max_iterations", c.induction.em.max_iterations},
                    {"var_floor", c.induction.em.var_floor},
                    {"min_separation_d", c.induction.min_separation_d},
                    {"min_samples", c.induction.min_samples}};
  j["evaluation"] = {{"questions", c.evaluation.questions},
                     {"max_retries", c.evaluation.question.max_retries},
                     {"max_filters", c.evaluation.question.max_filters},
                     {"relate_probability", c.evaluation.question.relate_probability}};
  json supers = json::array();
  for (const auto& s : c.ontology.super_concepts) {
    supers.push_back({{"name", s.name}, {"concepts", s.concepts}});
  }
  json binaries = json::array();
  for (const auto& b : c.ontology.binary_concepts) {
    binaries.push_back({{"name", b.name},
                        {"axis", b.axis == Axis::kX ? "x" : "y"},
                        {"lower", b.lower},
                        {"upper", b.upper}});
  }
  j["super_concepts"] = std::move(supers);
  j["binary_concepts"] = std::move(binaries);
  return j.dump();
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  return hex(digest, len);
}

std::string config_hash(const RunConfig& config) { return sha256_hex(canonical_json(config)); }

std::string to_toml(const RunConfig& c) {
  const GenerationConfig& g = c.ontology.generation;
  std::string out;
  out += "[generation]\n";
  out += fmt::format("seed = {}\nscenes = {}\nmin_objects = {}\nmax_objects = {}\n", g.seed,
                     g.scenes, g.min_objects, g.max_objects);
  out += fmt::format("min_separation = {}\nambiguity_epsilon = {}\nrelevance_bias = {}\n",
                     toml_double(g.min_separation), toml_double(g.ambiguity_epsilon),
                     toml_double(g.relevance_bias));
  out += fmt::format("unary_mentions_min = {}\nunary_mentions_max = {}\n", g.unary_mentions_min,
                     g.unary_mentions_max);
  out += fmt::format("binary_mentions_min = {}\nbinary_mentions_max = {}\n", g.binary_mentions_min,
                     g.binary_mentions_max);
  out += fmt::format("min_mentions = {}\nmax_placement_retries = {}\nmax_top_up_scenes = {}\n\n",
                     g.min_mentions, g.max_placement_retries, g.max_top_up_scenes);
  out += fmt::format("[noise]\nsigma = {}\nmu_pos = {}\nmu_neg = {}\nmu_amb = {}\n\n",
                     toml_double(c.noise.sigma), toml_double(c.noise.mu_pos),
                     toml_double(c.noise.mu_neg), toml_double(c.noise.mu_amb));
  out += fmt::format(
      "[induction]\ntau = {}\nem_tolerance = {}\nem_max_iterations = {}\nvar_floor = {}\n"
      "min_separation_d = {}\nmin_samples = {}\n\n",
      toml_double(c.induction.tau), toml_double(c.induction.em.tolerance),
      c.induction.em.max_iterations, toml_double(c.induction.em.var_floor),
      toml_double(c.induction.min_separation_d), c.induction.min_samples);
  out += fmt::format(
      "[evaluation]\nquestions = {}\nmax_retries = {}\nmax_filters = {}\nrelate_probability = {}\n",
      c.evaluation.questions, c.evaluation.question.max_retries,
      c.evaluation.question.max_filters, toml_double(c.evaluation.question.relate_probability));
  for (const auto& s : c.ontology.super_concepts) {
    out += fmt::format("\n[[super_concepts]]\nname = \"{}\"\nconcepts = [", s.name);
    for (std::size_t i = 0; i < s.concepts.size(); ++i) {
      out += (i ? ", " : "") + toml_words(s.concepts[i]);
    }
    out += "]\n";
  }
  for (const auto& b : c.ontology.binary_concepts) {
    out += fmt::format("\n[[binary_concepts]]\nname = \"{}\"\naxis = \"{}\"\nlower = {}\nupper = {}\n",
                       b.name, b.axis == Axis::kX ? "x" : "y", toml_words(b.lower),
                       toml_words(b.upper));
  }
  return out;
}

}  // namespace concept_forge
