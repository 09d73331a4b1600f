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

#include "cagebo/gp.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace cagebo {

void KernelParams::validate() const {
  if (!(std::isfinite(lengthscale) && lengthscale > 0.0)) {
    throw Error(Errc::InvalidConfig, "lengthscale must be finite and > 0");
  }
  if (!(std::isfinite(signal_variance) && signal_variance > 0.0)) {
    throw Error(Errc::InvalidConfig, "signal variance must be finite and > 0");
  }
  if (!(std::isfinite(noise_variance) && noise_variance >= 0.0)) {
    throw Error(Errc::InvalidConfig, "noise variance must be finite and >= 0");
  }
}

double matern52(const KernelParams& p, double r) {
  const double s = std::sqrt(5.0) * r / p.lengthscale;
  return p.signal_variance * (1.0 + s + s * s / 3.0) * std::exp(-s);
}

double kernel_eval(const KernelParams& p, const Vector& a, const Vector& b) {
  require_dim(static_cast<std::size_t>(b.size()), static_cast<std::size_t>(a.size()), "kernel_eval");
  return matern52(p, (a - b).norm());
}

Matrix kernel_matrix(const KernelParams& p, const Matrix& a, const Matrix& b) {
  require_dim(static_cast<std::size_t>(b.rows()), static_cast<std::size_t>(a.rows()), "kernel_matrix");
  Matrix k(a.cols(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.cols(); ++i) k(i, j) = matern52(p, (a.col(i) - b.col(j)).norm());
  }
  return k;
}

std::vector<KernelParams> hyperparameter_grid(std::size_t dim) {
  const double root_d = std::sqrt(static_cast<double>(dim));
  std::vector<KernelParams> grid;
  for (double l : {0.1, 0.25, 0.5, 1.0, 2.0, 4.0}) {
    for (double s2 : {0.5, 1.0, 2.0}) {
      for (double n2 : {1e-6, 1e-4, 1e-2}) grid.push_back({l * root_d, s2, n2});
    }
  }
  return grid;
}

namespace {

struct Factorization {
  Matrix chol;
  Vector alpha;
  double jitter = 0.0;
  double lml = -std::numeric_limits<double>::infinity();
  bool ok = false;
};

bool try_cholesky(const Matrix& a, double floor, Matrix& out) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) return false;
  out = llt.matrixL();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double p = out(i, i);
    if (!std::isfinite(p) || p * p <= floor) return false;
  }
  return true;
}

Factorization factorize(const Matrix& gram, double noise, const Vector& y_std) {
  Factorization f;
  const auto m = gram.rows();
  Matrix a = gram;
  a.diagonal().array() += noise;
  const double scale = a.trace() / static_cast<double>(m);
  const double floor = 1e-13 * scale;
  if (!try_cholesky(a, floor, f.chol)) {
    bool done = false;
    for (double j : {1e-10, 1e-9, 1e-8, 1e-7, 1e-6}) {
      Matrix aj = a;
      aj.diagonal().array() += j * scale;
      if (try_cholesky(aj, floor, f.chol)) {
        f.jitter = j * scale;
        done = true;
        break;
      }
    }
    if (!done) return f;
  }
  f.alpha = f.chol.triangularView<Eigen::Lower>().solve(y_std);
  f.chol.triangularView<Eigen::Lower>().transpose().solveInPlace(f.alpha);
  const double logdet_half = f.chol.diagonal().array().log().sum();
  f.lml = -0.5 * y_std.dot(f.alpha) - logdet_half -
          0.5 * static_cast<double>(m) * std::log(2.0 * std::numbers::pi);
  f.ok = true;
  return f;
}

}  // namespace

GpState fit(std::span<const Vector> points, std::span<const double> values,
            std::optional<KernelParams> params, Exec exec) {
  if (points.empty()) throw Error(Errc::DimensionMismatch, "fit: no observations");
  require_dim(values.size(), points.size(), "fit values");
  const auto d = points.front().size();
  GpState st;
  st.points.resize(d, static_cast<Eigen::Index>(points.size()));
  st.y.resize(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    require_dim(static_cast<std::size_t>(points[i].size()), static_cast<std::size_t>(d), "fit points");
    st.points.col(static_cast<Eigen::Index>(i)) = points[i];
    st.y[static_cast<Eigen::Index>(i)] = values[i];
  }
  const auto m = st.y.size();
  st.y_mean = st.y.mean();
  const double var = m > 1 ? (st.y.array() - st.y_mean).square().sum() / static_cast<double>(m - 1) : 0.0;
  st.y_scale = var > 0.0 ? std::sqrt(var) : 1.0;
  const Vector y_std = (st.y.array() - st.y_mean) / st.y_scale;

  // Distances are shared by every grid point.
  Matrix dist(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) dist(i, j) = (st.points.col(i) - st.points.col(j)).norm();
  }
  auto gram_for = [&](const KernelParams& p) {
    return dist.unaryExpr([&](double r) { return matern52(p, r); }).eval();
  };

  std::vector<KernelParams> grid;
  if (params) {
    params->validate();
    grid.push_back(*params);
  } else {
    grid = hyperparameter_grid(static_cast<std::size_t>(d));
  }

  std::vector<Factorization> results(grid.size());
  const auto g = static_cast<std::ptrdiff_t>(grid.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < g; ++i) {
      results[i] = factorize(gram_for(grid[i]), grid[i].noise_variance, y_std);
    }
  } else {
    for (std::ptrdiff_t i = 0; i < g; ++i) {
      results[i] = factorize(gram_for(grid[i]), grid[i].noise_variance, y_std);
    }
  }

  std::ptrdiff_t best = -1;
  for (std::ptrdiff_t i = 0; i < g; ++i) {
    if (!results[i].ok) continue;
    if (best < 0 || results[i].lml > results[best].lml) best = i;
  }
  if (best < 0) throw Error(Errc::NonPositiveDefinite, "fit: factorization failed after jitter");
  st.params = grid[best];
  st.chol = std::move(results[best].chol);
  st.alpha = std::move(results[best].alpha);
  st.jitter = results[best].jitter;
  st.log_marginal_likelihood = results[best].lml;
  return st;
}

namespace {

PosteriorMoments posterior_unchecked(const GpState& st, const Vector& z) {
  const auto m = st.points.cols();
  Vector k(m);
  for (Eigen::Index i = 0; i < m; ++i) k[i] = matern52(st.params, (st.points.col(i) - z).norm());
  const double mean_std = k.dot(st.alpha);
  st.chol.triangularView<Eigen::Lower>().solveInPlace(k);
  const double var = std::max(0.0, st.params.signal_variance - k.squaredNorm());
  return {st.y_mean + st.y_scale * mean_std, st.y_scale * std::sqrt(var)};
}

}  // namespace

PosteriorMoments posterior(const GpState& state, const Vector& z) {
  require_dim(static_cast<std::size_t>(z.size()), state.dim(), "posterior");
  return posterior_unchecked(state, z);
}

double lcb_from_moments(const PosteriorMoments& m, double beta) {
  return m.mean - std::sqrt(beta) * m.stddev;
}

double lcb(const GpState& state, const Vector& z, double beta) {
  return lcb_from_moments(posterior(state, z), beta);
}

std::vector<double> lcb_scores(const GpState& state, std::span<const Vector> candidates,
                               double beta, Exec exec) {
  for (const auto& c : candidates) require_dim(static_cast<std::size_t>(c.size()), state.dim(), "lcb_scores");
  std::vector<double> out(candidates.size());
  const auto n = static_cast<std::ptrdiff_t>(candidates.size());
  if (exec == Exec::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      out[i] = lcb_from_moments(posterior_unchecked(state, candidates[i]), beta);
    }
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      out[i] = lcb_from_moments(posterior_unchecked(state, candidates[i]), beta);
    }
  }
  return out;
}

Selection select_candidate(const GpState& state, std::span<const Vector> candidates, double beta,
                           Exec exec) {
  if (candidates.empty()) throw Error(Errc::EmptyCandidates, "select_candidate: no candidates");
  const auto scores = lcb_scores(state, candidates, beta, exec);
  const std::size_t idx = argmin_first(scores);
  return {idx, candidates[idx], scores[idx]};
}

double beta_schedule(std::size_t candidate_count, std::size_t t, double delta) {
  const double m = static_cast<double>(candidate_count);
  const double tt = static_cast<double>(t);
  return 2.0 * std::log(m * tt * tt * std::numbers::pi * std::numbers::pi / (6.0 * delta));
}

}  // namespace cagebo
