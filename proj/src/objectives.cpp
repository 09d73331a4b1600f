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

#include "cagebo/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cagebo/cvae.hpp"

namespace cagebo {

TestFunction parse_test_function(const std::string& name) {
  if (name == "keane") return TestFunction::keane;
  if (name == "michalewicz") return TestFunction::michalewicz;
  if (name == "ackley") return TestFunction::ackley;
  throw Error(Errc::InvalidConfig, "unknown test function '" + name + "'");
}

std::string to_string(TestFunction f) {
  switch (f) {
    case TestFunction::keane: return "keane";
    case TestFunction::michalewicz: return "michalewicz";
    case TestFunction::ackley: return "ackley";
  }
  return "unknown";
}

void SyntheticProblemSpec::validate() const {
  if (dim == 0) throw Error(Errc::InvalidConfig, "dimension must be >= 1");
  require_dim(static_cast<std::size_t>(lower.size()), dim, "spec lower");
  require_dim(static_cast<std::size_t>(upper.size()), dim, "spec upper");
  for (std::size_t i = 0; i < dim; ++i) {
    if (!(upper[static_cast<Eigen::Index>(i)] > lower[static_cast<Eigen::Index>(i)])) {
      throw Error(Errc::InvalidConfig, "box upper must exceed lower");
    }
  }
  if (!(noise_std >= 0.0)) throw Error(Errc::InvalidConfig, "noise_std must be >= 0");
}

SyntheticProblemSpec default_spec(TestFunction f, std::size_t dim, double noise_std) {
  SyntheticProblemSpec s;
  s.function = f;
  s.dim = dim;
  s.noise_std = noise_std;
  const auto n = static_cast<Eigen::Index>(dim);
  switch (f) {
    case TestFunction::keane:
      s.lower = Vector::Zero(n);
      s.upper = Vector::Constant(n, 10.0);
      break;
    case TestFunction::michalewicz:
      s.lower = Vector::Zero(n);
      s.upper = Vector::Constant(n, std::numbers::pi);
      break;
    case TestFunction::ackley:
      s.lower = Vector::Constant(n, -5.0);
      s.upper = Vector::Constant(n, 5.0);
      break;
  }
  return s;
}

double keane_bump(const Vector& x) {
  double sum_c4 = 0.0, prod_c2 = 1.0, weighted = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double c = std::cos(x[i]);
    const double c2 = c * c;
    sum_c4 += c2 * c2;
    prod_c2 *= c2;
    weighted += static_cast<double>(i + 1) * x[i] * x[i];
  }
  if (weighted <= 0.0) throw Error(Errc::SingularInput, "keane_bump: sum i x_i^2 = 0");
  return -std::abs(sum_c4 - 2.0 * prod_c2) / std::sqrt(weighted);
}

double michalewicz(const Vector& x, int m) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0 && x[i] <= std::numbers::pi)) {
      throw Error(Errc::DomainViolation, "michalewicz: x outside [0, pi]^d");
    }
    const double s = std::sin(static_cast<double>(i + 1) * x[i] * x[i] / std::numbers::pi);
    acc += std::sin(x[i]) * std::pow(s, 2 * m);
  }
  return -acc;
}

double ackley(const Vector& x, double half_width) {
  const auto d = static_cast<double>(x.size());
  double sq = 0.0, cs = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(std::abs(x[i]) <= half_width)) throw Error(Errc::DomainViolation, "ackley: x outside box");
    sq += x[i] * x[i];
    cs += std::cos(2.0 * std::numbers::pi * x[i]);
  }
  const double v = 20.0 * (1.0 - std::exp(-0.2 * std::sqrt(sq / d))) +
                   (std::exp(1.0) - std::exp(cs / d));
  return std::max(0.0, v);
}

Vector scale_to_box(const Decision& unit, const Vector& lower, const Vector& upper) {
  require_dim(static_cast<std::size_t>(unit.size()), static_cast<std::size_t>(lower.size()), "scale_to_box");
  return lower + ((upper - lower).array() * unit.array()).matrix();
}

Decision unscale_from_box(const Vector& x, const Vector& lower, const Vector& upper) {
  require_dim(static_cast<std::size_t>(x.size()), static_cast<std::size_t>(lower.size()), "unscale_from_box");
  return ((x - lower).array() / (upper - lower).array()).matrix();
}

double evaluate_synthetic(const SyntheticProblemSpec& spec, const Decision& unit) {
  require_dim(static_cast<std::size_t>(unit.size()), spec.dim, "evaluate_synthetic");
  const Vector x = scale_to_box(unit.cwiseMax(0.0).cwiseMin(1.0), spec.lower, spec.upper);
  switch (spec.function) {
    case TestFunction::keane: return keane_bump(x);
    case TestFunction::michalewicz: return michalewicz(x.cwiseMin(std::numbers::pi).cwiseMax(0.0));
    case TestFunction::ackley: {
      const double hw = std::max(spec.lower.cwiseAbs().maxCoeff(), spec.upper.cwiseAbs().maxCoeff());
      return ackley(x, hw);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

Disk default_disk(std::size_t dim) {
  return {Vector::Constant(static_cast<Eigen::Index>(dim), 0.5), 0.3 * 0.5};
}

bool in_disk(const Disk& disk, const Decision& x) {
  require_dim(static_cast<std::size_t>(x.size()), static_cast<std::size_t>(disk.center.size()), "in_disk");
  return (x - disk.center).norm() <= disk.radius;
}

std::function<bool(const Decision&)> membership_oracle(std::vector<Decision> feasible, double tol) {
  return [pool = std::move(feasible), tol](const Decision& x) {
    for (const auto& p : pool) {
      if (p.size() != x.size()) continue;
      if ((p - x).cwiseAbs().maxCoeff() <= tol) return true;
    }
    return false;
  };
}

namespace {

Problem synthetic_problem(const SyntheticProblemSpec& spec, std::function<bool(const Decision&)> oracle) {
  Problem p;
  p.name = to_string(spec.function);
  p.dim = spec.dim;
  p.noise_std = spec.noise_std;
  p.objective = [spec](const Decision& x) { return evaluate_synthetic(spec, x); };
  p.feasible = std::move(oracle);
  return p;
}

}  // namespace

GeneratedProblem make_random_decoder_dataset(std::uint64_t seed, const SyntheticProblemSpec& spec,
                                             std::size_t n, std::size_t latent_dim) {
  spec.validate();
  if (n % 2 != 0) throw Error(Errc::InvalidConfig, "make_random_decoder_dataset: n must be even");
  RngStream root(RngSeed{seed});
  CvaeConfig cfg;
  cfg.latent_dim = latent_dim;
  cfg.seed = root.derive("random-decoder").key();
  const CvaeModel decoder = init_model(spec.dim, cfg);

  auto latent_rng = root.derive("latent");
  const auto half = static_cast<Eigen::Index>(n / 2);
  Matrix zs(static_cast<Eigen::Index>(latent_dim), half);
  for (Eigen::Index j = 0; j < half; ++j) {
    for (Eigen::Index k = 0; k < zs.rows(); ++k) zs(k, j) = latent_rng.uniform();
  }
  const Matrix xs = decode_batch(decoder, zs, true);

  GeneratedProblem out;
  out.dataset.dim = spec.dim;
  for (Eigen::Index j = 0; j < half; ++j) {
    out.feasible.push_back(xs.col(j));
    out.dataset.items.push_back({xs.col(j), true});
  }
  auto oracle = membership_oracle(out.feasible);
  auto uniform_rng = root.derive("infeasible");
  while (out.dataset.items.size() < n) {
    Vector x(static_cast<Eigen::Index>(spec.dim));
    for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = uniform_rng.uniform();
    if (oracle(x)) continue;
    out.dataset.items.push_back({std::move(x), false});
  }
  out.problem = synthetic_problem(spec, std::move(oracle));
  return out;
}

GeneratedProblem make_disk_dataset(std::uint64_t seed, const SyntheticProblemSpec& spec,
                                   const Disk& disk, std::size_t n) {
  spec.validate();
  RngStream rng = RngStream(RngSeed{seed}).derive("disk-samples");
  GeneratedProblem out;
  out.dataset.dim = spec.dim;
  for (std::size_t i = 0; i < n; ++i) {
    Vector x(static_cast<Eigen::Index>(spec.dim));
    for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = rng.uniform();
    const bool ok = in_disk(disk, x);
    if (ok) out.feasible.push_back(x);
    out.dataset.items.push_back({std::move(x), ok});
  }
  out.problem = synthetic_problem(spec, [disk](const Decision& x) { return in_disk(disk, x); });
  out.problem.name = to_string(spec.function) + "-disk";
  return out;
}

GridMinimum grid_refine_minimize(const std::function<double(const Vector&)>& f, const Vector& lower,
                                 const Vector& upper, std::size_t resolution, std::size_t rounds,
                                 const std::function<bool(const Vector&)>& admissible) {
  const auto d = lower.size();
  if (resolution < 2) resolution = 2;
  GridMinimum best{Vector(), std::numeric_limits<double>::infinity()};
  Vector lo = lower, hi = upper;
  for (std::size_t round = 0; round <= rounds; ++round) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    Vector x(d);
    bool done = false;
    while (!done) {
      for (Eigen::Index k = 0; k < d; ++k) {
        x[k] = lo[k] + (hi[k] - lo[k]) * static_cast<double>(idx[static_cast<std::size_t>(k)]) /
                           static_cast<double>(resolution - 1);
      }
      if (!admissible || admissible(x)) {
        const double v = f(x);
        if (v < best.value) best = {x, v};
      }
      Eigen::Index k = 0;
      for (; k < d; ++k) {
        if (++idx[static_cast<std::size_t>(k)] < resolution) break;
        idx[static_cast<std::size_t>(k)] = 0;
      }
      done = k == d;
    }
    if (best.x.size() == 0) break;
    // Next round: a window of four cells around the incumbent, clipped to the box.
    const Vector step = (hi - lo) / static_cast<double>(resolution - 1);
    lo = (best.x - 2.0 * step).cwiseMax(lower);
    hi = (best.x + 2.0 * step).cwiseMin(upper);
  }
  return best;
}

}  // namespace cagebo
