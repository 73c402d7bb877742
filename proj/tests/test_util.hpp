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


// Shared fixtures for the unit and acceptance tests.

#ifndef CONCEPT_FORGE_TESTS_TEST_UTIL_HPP_
#define CONCEPT_FORGE_TESTS_TEST_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "concept_forge/config.hpp"
#include "concept_forge/ontology.hpp"

namespace concept_forge::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(std::string_view label) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("concept_forge_" + std::string(label) + "_" + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& p, std::string_view text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline RunConfig run_config(std::uint64_t seed, double sigma, std::size_t scenes = 500) {
  RunConfig cfg;
  cfg.ontology.generation.seed = seed;
  cfg.ontology.generation.scenes = scenes;
  cfg.noise.sigma = sigma;
  return cfg;
}

inline WordId word(const Lexicon& lex, std::string_view w) { return lex.word_id(w); }

inline ConceptId concept_named(const Lexicon& lex, std::string_view w) {
  return lex.concept_of(lex.word_id(w));
}

inline SuperConceptId super_named(const Lexicon& lex, std::string_view name) {
  return *lex.find_super_concept(name);
}

// Scene with hand-placed objects. Each object lists one word per unary
// super concept, in attribute slot order.
inline Scene make_scene(const Lexicon& lex, std::uint32_t id,
                        const std::vector<std::pair<std::vector<std::string>, Point>>& objects) {
  Scene s;
  s.id = id;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    ObjectInstance o;
    o.id = static_cast<std::uint32_t>(i);
    o.attributes.resize(lex.unary_super_concepts().size());
    for (const auto& w : objects[i].first) {
      ConceptId c = concept_named(lex, w);
      o.attributes[lex.attribute_slot(lex.concept_info(c).super_concept)] = c;
    }
    o.position = objects[i].second;
    s.objects.push_back(o);
  }
  return s;
}

}  // namespace concept_forge::testing

#endif  // CONCEPT_FORGE_TESTS_TEST_UTIL_HPP_
