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
#include <functional>
#include <string>
#include <vector>

#include "cagebo/core.hpp"
#include "cagebo/problem.hpp"

namespace cagebo {

enum class TestFunction { keane, michalewicz, ackley };

TestFunction parse_test_function(const std::string& name);
std::string to_string(TestFunction f);

struct SyntheticProblemSpec {
  TestFunction function = TestFunction::michalewicz;
  std::size_t dim = 30;
  Vector lower;
  Vector upper;
  double noise_std = 0.0;

  void validate() const;
};

/// Standard box of each function: Keane [0,10]^d, Michalewicz [0,pi]^d,
/// Ackley [-5,5]^d.
SyntheticProblemSpec default_spec(TestFunction f, std::size_t dim, double noise_std = 0.0);

/// f(x) = -|sum cos^4 x_i - 2 prod cos^2 x_i| / sqrt(sum i x_i^2). Throws SingularInput at x = 0.
double keane_bump(const Vector& x);
/// f(x) = -sum sin(x_i) sin(i x_i^2 / pi)^(2m) on [0,pi]^d. Throws DomainViolation.
double michalewicz(const Vector& x, int m = 10);
/// Ackley with a = 20, b = 0.2, c = 2 pi. Throws DomainViolation outside |x_i| <= half_width.
double ackley(const Vector& x, double half_width = 32.768);

Vector scale_to_box(const Decision& unit, const Vector& lower, const Vector& upper);
Decision unscale_from_box(const Vector& x, const Vector& lower, const Vector& upper);

/// f evaluated at a normalized decision.
double evaluate_synthetic(const SyntheticProblemSpec& spec, const Decision& unit);

struct Disk {
  Vector center;  // normalized coordinates
  double radius = 0.15;
};

/// Box midpoint, radius 30% of the half-width (normalized units).
Disk default_disk(std::size_t dim);
bool in_disk(const Disk& disk, const Decision& x);

struct GeneratedProblem {
  Dataset dataset;
  Problem problem;
  std::vector<Decision> feasible;
};

/// Feasible decisions are images of U(0,1)^{latent_dim} samples under a freshly
/// seeded decoder; infeasible ones are U(0,1)^d. The oracle accepts only exact
/// (1e-9 max-norm) matches of the feasible list.
GeneratedProblem make_random_decoder_dataset(std::uint64_t seed, const SyntheticProblemSpec& spec,
                                             std::size_t n = 2000, std::size_t latent_dim = 10);

/// Uniform samples labeled by a disk oracle.
GeneratedProblem make_disk_dataset(std::uint64_t seed, const SyntheticProblemSpec& spec,
                                   const Disk& disk, std::size_t n);

/// Membership oracle over a fixed list with max-norm tolerance.
std::function<bool(const Decision&)> membership_oracle(std::vector<Decision> feasible,
                                                       double tol = 1e-9);

struct GridMinimum {
  Vector x;
  double value = 0.0;
};

/// Dense grid over the box followed by repeated local regridding around the
/// incumbent; points rejected by `admissible` are skipped. Intended for d <= 3.
GridMinimum grid_refine_minimize(const std::function<double(const Vector&)>& f, const Vector& lower,
                                 const Vector& upper, std::size_t resolution = 201,
                                 std::size_t rounds = 30,
                                 const std::function<bool(const Vector&)>& admissible = {});

}  // namespace cagebo
