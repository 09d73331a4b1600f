/*
 * Copyright 2026 The cagebo Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cagebo/core.hpp"
#include "cagebo/kernels.hpp"

namespace cagebo {

/// Matern-5/2 kernel hyperparameters.
struct KernelParams {
  double lengthscale = 1.0;
  double signal_variance = 1.0;
  double noise_variance = 1e-6;

  void validate() const;
};

double kernel_eval(const KernelParams& p, const Vector& a, const Vector& b);
/// Matern-5/2 as a function of distance.
double matern52(const KernelParams& p, double r);

/// Kernel matrix K(A, B); columns of A and B are points.
Matrix kernel_matrix(const KernelParams& p, const Matrix& a, const Matrix& b);

/// Exact GP posterior over standardized targets. Immutable after `fit`.
struct GpState {
  Matrix points;  // d x m, one column per observation
  Vector y;       // raw observations
  double y_mean = 0.0;
  double y_scale = 1.0;
  KernelParams params;
  Matrix chol;    // lower factor of K + (noise + jitter) I
  Vector alpha;   // (K + noise I)^-1 standardized y
  double jitter = 0.0;
  double log_marginal_likelihood = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(points.cols()); }
  std::size_t dim() const { return static_cast<std::size_t>(points.rows()); }
};

/// Hyperparameter grid searched by `fit` when no parameters are given.
std::vector<KernelParams> hyperparameter_grid(std::size_t dim);

/// Fits the GP. With `params` unset the log marginal likelihood is maximized
/// over `hyperparameter_grid`. Throws NonPositiveDefinite, DimensionMismatch.
GpState fit(std::span<const Vector> points, std::span<const double> values,
            std::optional<KernelParams> params = std::nullopt, Exec exec = Exec::parallel);

struct PosteriorMoments {
  double mean = 0.0;
  double stddev = 0.0;
};

PosteriorMoments posterior(const GpState& state, const Vector& z);

double lcb(const GpState& state, const Vector& z, double beta);
double lcb_from_moments(const PosteriorMoments& m, double beta);

/// LCB for every candidate; both policies are bit-identical.
std::vector<double> lcb_scores(const GpState& state, std::span<const Vector> candidates,
                               double beta, Exec exec = Exec::parallel);

struct Selection {
  std::size_t index = 0;
  Vector point;
  double value = 0.0;
};

/// Candidate of minimal LCB, lowest index on ties. Throws EmptyCandidates.
Selection select_candidate(const GpState& state, std::span<const Vector> candidates, double beta,
                           Exec exec = Exec::parallel);

/// beta_t = 2 log(m t^2 pi^2 / (6 delta)).
double beta_schedule(std::size_t candidate_count, std::size_t t, double delta = 0.1);

}  // namespace cagebo
