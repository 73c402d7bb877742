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

#ifndef CONCEPT_FORGE_ERROR_HPP_
#define CONCEPT_FORGE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace concept_forge {

// Base of every error raised by the library. Callers that only care about
// "something in the pipeline failed" catch this; the CLI maps subclasses to
// exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or semantically invalid configuration. `line` is 0 when the
// problem is not tied to a source location.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Invalid argument to a numerical routine.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

class LexiconError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

// Unary word used where a binary one is required or vice versa.
class ArityError : public Error {
 public:
  using Error::Error;
};

// Reference to an object, scene or word that does not exist.
class IdError : public Error {
 public:
  using Error::Error;
};

class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

class NoBoundaryError : public Error {
 public:
  using Error::Error;
};

class EmptyStoreError : public Error {
 public:
  using Error::Error;
};

class ClassifierUnavailableError : public Error {
 public:
  using Error::Error;
};

class UndefinedCorrelationError : public Error {
 public:
  using Error::Error;
};

class ClusteringError : public Error {
 public:
  using Error::Error;
};

// Induced groups violate the all-pairs consistency requirement.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

class HierarchyError : public Error {
 public:
  using Error::Error;
};

class ExecutionError : public Error {
 public:
  using Error::Error;
};

class UnanswerableError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class RecordError : public Error {
 public:
  using Error::Error;
};

// Missing or unreadable artifact file.
class ArtifactError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage failed; what() names the stage and the cause.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause)
      : Error(stage + ": " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace concept_forge

#endif  // CONCEPT_FORGE_ERROR_HPP_
