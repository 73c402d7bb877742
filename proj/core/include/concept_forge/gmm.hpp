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

// One-dimensional Gaussian mixtures fitted by expectation-maximization.
//
// Two-component fits model the bimodal attention-logit distribution of a word
// and yield its Bayes decision boundary. Three-component fits cluster word
// pair correlations into exclusive / unrelated / synonym groups.

#ifndef CONCEPT_FORGE_GMM_HPP_
#define CONCEPT_FORGE_GMM_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace concept_forge {

struct GaussianComponent {
  double weight = 0.0;
  double mean = 0.0;
  double variance = 1.0;
  bool operator==(const GaussianComponent&) const = default;
};

// Immutable mixture with components sorted by ascending mean.
class GmmModel {
 public:
  GmmModel() = default;
  // Sorts by mean. Throws ArgumentError if weights do not sum to 1 within
  // 1e-9, a variance is not positive, or a mean is not finite.
  explicit GmmModel(std::vector<GaussianComponent> components);

  std::size_t size() const { return components_.size(); }
  const std::vector<GaussianComponent>& components() const { return components_; }
  const GaussianComponent& operator[](std::size_t k) const { return components_[k]; }

  // log(weight_k) + log N(x; mean_k, variance_k); -inf for zero weight.
  double weighted_log_density(std::size_t k, double x) const;
  double log_density(double x) const;
  // Posterior component probabilities at x; sums to 1.
  std::vector<double> responsibilities(double x) const;

 private:
  std::vector<GaussianComponent> components_;
};

struct FitOptions {
  double tolerance = 1e-7;
  std::size_t max_iterations = 500;
  double var_floor = 1e-6;
  // fit_em requires at least this many samples per component.
  std::size_t min_samples_per_component = 10;
};

struct FitResult {
  GmmModel model;
  // Log-likelihood of the data at the start of each iteration.
  std::vector<double> log_likelihood_trace;
  std::size_t iterations = 0;
  bool converged = false;
};

// EM until the log-likelihood gain drops below `options.tolerance` or
// `options.max_iterations` is reached. Without explicit `init_means`, two
// components start at the 25th/75th percentiles (min/max if those coincide)
// and three components at 0, 1 and 2. Variances start at the sample variance,
// weights uniform.
//
// Throws ArgumentError when k is not in [1, 3] or there are too few samples,
// DegenerateFitError when every sample is identical.
FitResult fit_em(std::span<const double> samples, std::size_t k,
                 std::optional<std::vector<double>> init_means = std::nullopt,
                 const FitOptions& options = {});

// Point strictly between the two means where the weighted densities cross.
// Throws NoBoundaryError for equal means or densities that never cross.
double decision_boundary(const GmmModel& model);

// argmax_k weight_k * pdf_k(x); exact ties go to the lower-mean component.
std::size_t assign(const GmmModel& model, double x);

// Two-component separation |m1 - m2| * sqrt(2 / (v1 + v2)). Values above 2
// indicate a clearly bimodal fit.
double ashman_d(const GmmModel& model);

// Number of EM iterations, process wide, at which the log-likelihood dropped
// by more than round-off. Should stay 0.
std::size_t em_monotonicity_violations();
// Total EM fits performed in this process.
std::size_t em_fit_count();

// "k weight mean variance" lines.
std::string to_text(const GmmModel& model);

}  // namespace concept_forge

#endif  // CONCEPT_FORGE_GMM_HPP_
