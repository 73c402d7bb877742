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

#include "concept_forge/gmm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "concept_forge/error.hpp"

namespace concept_forge {

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;  // log(2*pi)
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::atomic<std::size_t> g_violations{0};
std::atomic<std::size_t> g_fits{0};

double log_normal_pdf(double x, double mean, double variance) {
  double d = x - mean;
  return -0.5 * (kLogTwoPi + std::log(variance) + d * d / variance);
}

double log_sum_exp(std::span<const double> v) {
  double m = *std::max_element(v.begin(), v.end());
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Linear-interpolated quantile of sorted data.
double quantile(const std::vector<double>& sorted, double q) {
  double pos = q * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

GmmModel::GmmModel(std::vector<GaussianComponent> components) : components_(std::move(components)) {
  double total = 0.0;
  for (const auto& c : components_) {
    if (!std::isfinite(c.mean)) throw ArgumentError("mixture mean is not finite");
    if (!(c.variance > 0.0) || !std::isfinite(c.variance)) {
      throw ArgumentError(fmt::format("mixture variance must be positive, got {}", c.variance));
    }
    if (c.weight < 0.0) throw ArgumentError("negative mixture weight");
    total += c.weight;
  }
  if (components_.empty() || std::abs(total - 1.0) > 1e-9) {
    throw ArgumentError(fmt::format("mixture weights sum to {}, expected 1", total));
  }
  std::stable_sort(components_.begin(), components_.end(),
                   [](const auto& a, const auto& b) { return a.mean < b.mean; });
}

double GmmModel::weighted_log_density(std::size_t k, double x) const {
  const auto& c = components_[k];
  if (c.weight <= 0.0) return kNegInf;
  return std::log(c.weight) + log_normal_pdf(x, c.mean, c.variance);
}

double GmmModel::log_density(double x) const {
  std::vector<double> terms(components_.size());
  for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = weighted_log_density(k, x);
  return log_sum_exp(terms);
}

std::vector<double> GmmModel::responsibilities(double x) const {
  std::vector<double> terms(components_.size());
  for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = weighted_log_density(k, x);
  double norm = log_sum_exp(terms);
  for (double& t : terms) t = std::exp(t - norm);
  return terms;
}

FitResult fit_em(std::span<const double> samples, std::size_t k,
                 std::optional<std::vector<double>> init_means, const FitOptions& options) {
  if (k == 0 || k > 3) throw ArgumentError(fmt::format("component count must be 1..3, got {}", k));
  const std::size_t n = samples.size();
  if (n < options.min_samples_per_component * k || n == 0) {
    throw ArgumentError(
        fmt::format("{} samples is too few for {} components (need {})", n, k,
                    std::max<std::size_t>(1, options.min_samples_per_component * k)));
  }
  for (double x : samples) {
    if (!std::isfinite(x)) throw ArgumentError("non-finite sample");
  }
  auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  if (*lo_it == *hi_it) {
    throw DegenerateFitError(fmt::format("all {} samples equal {}", n, *lo_it));
  }

  const double mean_all = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double var_all = 0.0;
  for (double x : samples) var_all += (x - mean_all) * (x - mean_all);
  var_all = std::max(var_all / n, options.var_floor);

  std::vector<double> means;
  if (init_means) {
    if (init_means->size() != k) {
      throw ArgumentError(fmt::format("{} initial means for {} components", init_means->size(), k));
    }
    means = *init_means;
  } else if (k == 3) {
    means = {0.0, 1.0, 2.0};
  } else {
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    if (k == 1) {
      means = {mean_all};
    } else {
      means = {quantile(sorted, 0.25), quantile(sorted, 0.75)};
      if (means[0] == means[1]) means = {sorted.front(), sorted.back()};
    }
  }
  std::vector<double> vars(k, var_all);
  std::vector<double> weights(k, 1.0 / static_cast<double>(k));

  FitResult result;
  std::vector<double> resp(n * k);
  std::vector<double> terms(k);
  double prev_ll = kNegInf;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    // E-step.
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        terms[j] = weights[j] > 0.0 ? std::log(weights[j]) + log_normal_pdf(samples[i], means[j], vars[j])
                                    : kNegInf;
      }
      double norm = log_sum_exp(terms);
      ll += norm;
      for (std::size_t j = 0; j < k; ++j) resp[i * k + j] = std::exp(terms[j] - norm);
    }
    result.log_likelihood_trace.push_back(ll);
    result.iterations = it + 1;
    if (it > 0) {
      if (ll < prev_ll - 1e-9 * std::max(1.0, std::abs(prev_ll))) {
        g_violations.fetch_add(1, std::memory_order_relaxed);
      }
      if (ll - prev_ll < options.tolerance) {
        result.converged = true;
        break;
      }
    }
    prev_ll = ll;

    // M-step. A component with no responsibility mass keeps its mean and
    // variance; its weight goes to zero.
    for (std::size_t j = 0; j < k; ++j) {
      double nk = 0.0;
      double sx = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nk += resp[i * k + j];
        sx += resp[i * k + j] * samples[i];
      }
      weights[j] = nk / static_cast<double>(n);
      if (nk < 1e-12) continue;
      double mu = sx / nk;
      double sv = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double d = samples[i] - mu;
        sv += resp[i * k + j] * d * d;
      }
      means[j] = mu;
      vars[j] = std::max(sv / nk, options.var_floor);
    }
    double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) w /= wsum;
  }
  g_fits.fetch_add(1, std::memory_order_relaxed);

  std::vector<GaussianComponent> comps(k);
  for (std::size_t j = 0; j < k; ++j) comps[j] = {weights[j], means[j], vars[j]};
  result.model = GmmModel(std::move(comps));
  return result;
}

double decision_boundary(const GmmModel& model) {
  if (model.size() != 2) {
    throw NoBoundaryError(fmt::format("boundary needs 2 components, model has {}", model.size()));
  }
  const auto& c1 = model[0];
  const auto& c2 = model[1];
  if (c1.mean == c2.mean) throw NoBoundaryError("components have equal means");
  if (c1.weight <= 0.0 || c2.weight <= 0.0) throw NoBoundaryError("component with zero weight");

  // g(x) = log w1 N1(x) - log w2 N2(x) = a x^2 + b x + c.
  const double a = 0.5 / c2.variance - 0.5 / c1.variance;
  const double b = c1.mean / c1.variance - c2.mean / c2.variance;
  const double c = c2.mean * c2.mean / (2 * c2.variance) - c1.mean * c1.mean / (2 * c1.variance) +
                   std::log(c1.weight / c2.weight) - 0.5 * std::log(c1.variance / c2.variance);
  auto g = [&](double x) {
    return model.weighted_log_density(0, x) - model.weighted_log_density(1, x);
  };

  std::vector<double> roots;
  const double scale = std::max(std::abs(b), 1e-300);
  if (std::abs(a) <= 1e-12 * scale) {
    if (b != 0.0) roots.push_back(-c / b);
  } else {
    double disc = b * b - 4 * a * c;
    if (disc >= 0.0) {
      double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      if (q != 0.0) {
        roots.push_back(q / a);
        roots.push_back(c / q);
      } else {
        roots.push_back(-b / (2 * a));
      }
    }
  }
  for (double r : roots) {
    if (r > c1.mean && r < c2.mean) return r;
  }
  // Quadratic gave nothing usable inside the interval: bisect if the sign
  // changes there.
  double lo = c1.mean;
  double hi = c2.mean;
  double glo = g(lo);
  double ghi = g(hi);
  if (glo > 0.0 && ghi < 0.0) {
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++i) {
      double mid = 0.5 * (lo + hi);
      (g(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
  // One component dominates the whole interval; the crossing lies outside.
  if (!roots.empty()) {
    double mid = 0.5 * (c1.mean + c2.mean);
    return *std::min_element(roots.begin(), roots.end(), [&](double x, double y) {
      return std::abs(x - mid) < std::abs(y - mid);
    });
  }
  throw NoBoundaryError("weighted densities never cross");
}

std::size_t assign(const GmmModel& model, double x) {
  std::size_t best = 0;
  double best_score = model.weighted_log_density(0, x);
  for (std::size_t k = 1; k < model.size(); ++k) {
    double s = model.weighted_log_density(k, x);
    // Scores within round-off of each other count as a tie.
    double slack = best_score == kNegInf ? 0.0 : 1e-12 * std::max(1.0, std::abs(best_score));
    if (s > best_score + slack) {
      best = k;
      best_score = s;
    }
  }
  return best;
}

double ashman_d(const GmmModel& model) {
  if (model.size() != 2) throw ArgumentError("separation is defined for 2 components");
  return std::abs(model[1].mean - model[0].mean) *
         std::sqrt(2.0 / (model[0].variance + model[1].variance));
}

std::size_t em_monotonicity_violations() { return g_violations.load(); }
std::size_t em_fit_count() { return g_fits.load(); }

std::string to_text(const GmmModel& model) {
  std::string out;
  for (std::size_t k = 0; k < model.size(); ++k) {
    out += fmt::format("{} {:.17g} {:.17g} {:.17g}\n", k, model[k].weight, model[k].mean,
                       model[k].variance);
  }
  return out;
}

}  // namespace concept_forge
