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

#include "cagebo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_set>

namespace cagebo {

void CageboConfig::validate() const {
  if (initial < 1) throw Error(Errc::InvalidConfig, "initial must be >= 1");
  if (pool_size < 1) throw Error(Errc::InvalidConfig, "pool_size must be >= 1");
  if (!(beta >= 0.0)) throw Error(Errc::InvalidConfig, "beta must be >= 0");
  if (!(perturbation > 0.0)) throw Error(Errc::InvalidConfig, "perturbation must be > 0");
}

void SaConfig::validate() const {
  if (initial < 1) throw Error(Errc::InvalidConfig, "initial must be >= 1");
  if (initial_temperature && !(*initial_temperature >= 0.0)) {
    throw Error(Errc::InvalidConfig, "initial_temperature must be >= 0");
  }
  if (!(cooling > 0.0 && cooling <= 1.0)) throw Error(Errc::InvalidConfig, "cooling must be in (0, 1]");
  if (!(step > 0.0)) throw Error(Errc::InvalidConfig, "step must be > 0");
  if (max_proposals < 1) throw Error(Errc::InvalidConfig, "max_proposals must be >= 1");
}

double RunResult::initial_best() const {
  return *std::min_element(initial_values.begin(), initial_values.end());
}

std::vector<TraceRow> RunResult::trace_rows() const {
  std::vector<TraceRow> rows;
  const double b0 = initial_best();
  rows.push_back({0, b0, b0, false, 0.0});
  for (const auto& r : trace) rows.push_back({r.iteration, r.y, r.best, r.projected, r.seconds});
  return rows;
}

Evaluator::Evaluator(const Problem& problem, RngStream noise) : problem_(problem), noise_(noise) {}

double Evaluator::operator()(const Decision& x) {
  evaluated_.push_back(x);
  double y = problem_.objective(x);
  if (problem_.noise_std > 0.0) y += problem_.noise_std * noise_.normal();
  return y;
}

std::size_t post_decode_index(const Decision& x, std::span<const Decision> pool, Exec exec) {
  if (pool.empty()) throw Error(Errc::EmptyFeasibleSet, "post_decode: empty feasible pool");
  return nearest_index(x, pool, exec);
}

Decision post_decode(const Decision& x, std::span<const Decision> pool, Exec exec) {
  return pool[post_decode_index(x, pool, exec)];
}

IndirectEvaluation indirect_objective(const LatentPoint& z, const CvaeModel& model,
                                      const Problem& problem, std::span<const Decision> pool,
                                      Evaluator& evaluate, Exec exec) {
  if (pool.empty()) throw Error(Errc::EmptyFeasibleSet, "indirect_objective: empty feasible pool");
  const Decision x = problem.canonical(decode(model, z, true));
  if (problem.feasible(x)) return {evaluate(x), x, false};
  const Decision projected = post_decode(x, pool, exec);
  return {evaluate(projected), projected, true};
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Uniform draw of k distinct indices from [0, n).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, RngStream& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
  idx.resize(k);
  return idx;
}

std::string decision_key(const Decision& x) {
  return std::string(reinterpret_cast<const char*>(x.data()), sizeof(double) * static_cast<std::size_t>(x.size()));
}

// Decision that would be evaluated for a canonical candidate.
Decision resolve(const Decision& x, const Problem& problem, std::span<const Decision> pool, Exec exec) {
  return problem.feasible(x) ? x : post_decode(x, pool, exec);
}

template <typename T>
std::vector<T> keep_unseen(std::vector<T> candidates, const std::vector<Decision>& resolved,
                           const std::unordered_set<std::string>& seen) {
  std::vector<T> kept;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (!seen.count(decision_key(resolved[k]))) kept.push_back(std::move(candidates[k]));
  }
  return kept.empty() ? candidates : kept;
}

struct InitialDesign {
  std::vector<Decision> pool;
  std::vector<Decision> xs;
  std::vector<double> ys;
};

InitialDesign initial_design(const Dataset& dataset, const Problem& problem, std::size_t count,
                             RngStream rng, Evaluator& evaluate) {
  require_dim(dataset.dim, problem.dim, "dataset vs problem");
  InitialDesign d;
  d.pool = feasible_subset(dataset);
  if (d.pool.size() < count) {
    throw Error(Errc::EmptyFeasibleSet, "need " + std::to_string(count) + " feasible decisions, have " +
                                            std::to_string(d.pool.size()));
  }
  for (auto i : sample_without_replacement(d.pool.size(), count, rng)) {
    d.xs.push_back(d.pool[i]);
    d.ys.push_back(evaluate(d.pool[i]));
  }
  return d;
}

void finish(RunResult& r, Evaluator& evaluate, Clock::time_point start) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.initial_values.size(); ++i) {
    if (r.initial_values[i] < r.initial_values[best]) best = i;
  }
  r.incumbent = r.initial_decisions[best];
  r.incumbent_value = r.initial_values[best];
  for (const auto& rec : r.trace) {
    if (rec.y < r.incumbent_value) {
      r.incumbent_value = rec.y;
      r.incumbent = rec.x;
    }
  }
  r.evaluations = evaluate.count();
  r.evaluated = evaluate.take_evaluated();
  r.seconds = since(start);
}

RunResult latent_loop(const std::string& method, const CvaeModel& model, const Dataset& dataset,
                      const Problem& problem, const CageboConfig& config, Clock::time_point start) {
  config.validate();
  const RngStream root(RngSeed{config.seed});
  Evaluator evaluate(problem, root.derive("noise"));
  InitialDesign init = initial_design(dataset, problem, config.initial, root.derive("x0"), evaluate);

  RunResult r;
  r.method = method;
  r.initial_decisions = init.xs;
  r.initial_values = init.ys;
  std::vector<Decision>& pool = init.pool;

  // Posteriors q(z | x, c = 1) of the pool, extended as the pool grows.
  std::vector<LatentGaussian> posteriors;
  {
    Matrix xs(static_cast<Eigen::Index>(problem.dim), static_cast<Eigen::Index>(pool.size()));
    for (std::size_t i = 0; i < pool.size(); ++i) xs.col(static_cast<Eigen::Index>(i)) = pool[i];
    const auto [means, log_vars] = encode_batch(model, xs, true);
    for (Eigen::Index j = 0; j < means.cols(); ++j) posteriors.push_back({means.col(j), log_vars.col(j)});
  }

  std::vector<Vector> zs;
  std::vector<double> ys = init.ys;
  for (const auto& x : init.xs) zs.push_back(encode(model, x, true).mean);

  std::unordered_set<std::string> seen;
  for (const auto& x : init.xs) seen.insert(decision_key(x));
  double best = *std::min_element(ys.begin(), ys.end());
  const auto cand_root = root.derive("candidates");
  for (std::size_t t = 1; t <= config.iterations; ++t) {
    const GpState gp = fit(zs, ys, std::nullopt, config.exec);
    auto cand_rng = cand_root.derive(t);
    auto candidates = sample_from_posteriors(posteriors, config.pool_size, cand_rng);
    if (config.skip_evaluated) {
      Matrix zm(static_cast<Eigen::Index>(model.config.latent_dim), static_cast<Eigen::Index>(candidates.size()));
      for (std::size_t k = 0; k < candidates.size(); ++k) zm.col(static_cast<Eigen::Index>(k)) = candidates[k];
      const Matrix decoded = decode_batch(model, zm, true);
      std::vector<Decision> resolved;
      for (Eigen::Index k = 0; k < decoded.cols(); ++k) {
        resolved.push_back(resolve(problem.canonical(decoded.col(k)), problem, pool, config.exec));
      }
      candidates = keep_unseen(std::move(candidates), resolved, seen);
    }
    const double beta = config.beta_schedule ? beta_schedule(config.pool_size, t) : config.beta;
    const Selection sel = select_candidate(gp, candidates, beta, config.exec);

    const IndirectEvaluation ev = indirect_objective(sel.point, model, problem, pool, evaluate, config.exec);
    if (ev.projected) {
      ++r.projections;
    } else {
      pool.push_back(ev.x_used);
      posteriors.push_back(encode(model, ev.x_used, true));
    }
    seen.insert(decision_key(ev.x_used));
    zs.push_back(sel.point);
    ys.push_back(ev.y);
    best = std::min(best, ev.y);
    r.trace.push_back({t, sel.point, ev.x_used, ev.projected, ev.y, best, since(start)});
  }
  r.final_pool = std::move(pool);
  finish(r, evaluate, start);
  return r;
}

}  // namespace

RunResult cagebo_run_with_model(const CvaeModel& model, const Dataset& dataset,
                                const Problem& problem, const CageboConfig& config) {
  return latent_loop(model.config.conditional ? "cagebo" : "vae-bo", model, dataset, problem, config,
                     Clock::now());
}

RunResult cagebo_run(const Dataset& dataset, const Problem& problem, const CvaeConfig& cvae,
                     const CageboConfig& config) {
  const auto start = Clock::now();
  CvaeConfig c = cvae;
  c.conditional = true;
  const auto [model, report] = train(dataset, c);
  return latent_loop("cagebo", model, dataset, problem, config, start);
}

RunResult vae_bo_run(const Dataset& dataset, const Problem& problem, const CvaeConfig& vae,
                     const CageboConfig& config) {
  const auto start = Clock::now();
  CvaeConfig c = vae;
  c.conditional = false;
  const auto [model, report] = train(dataset, c);
  return latent_loop("vae-bo", model, dataset, problem, config, start);
}

RunResult vanilla_bo_run(const Dataset& dataset, const Problem& problem, const CageboConfig& config) {
  config.validate();
  const auto start = Clock::now();
  const RngStream root(RngSeed{config.seed});
  Evaluator evaluate(problem, root.derive("noise"));
  InitialDesign init = initial_design(dataset, problem, config.initial, root.derive("x0"), evaluate);

  RunResult r;
  r.method = "bo";
  r.initial_decisions = init.xs;
  r.initial_values = init.ys;
  std::vector<Decision>& pool = init.pool;
  std::vector<Vector> xs = init.xs;
  std::vector<double> ys = init.ys;
  std::unordered_set<std::string> seen;
  for (const auto& x : init.xs) seen.insert(decision_key(x));
  double best = *std::min_element(ys.begin(), ys.end());

  const auto d = static_cast<Eigen::Index>(problem.dim);
  const auto cand_root = root.derive("candidates");
  for (std::size_t t = 1; t <= config.iterations; ++t) {
    const GpState gp = fit(xs, ys, std::nullopt, config.exec);
    auto rng = cand_root.derive(t);
    std::vector<Vector> candidates;
    candidates.reserve(config.pool_size);
    for (std::size_t k = 0; k < config.pool_size; ++k) {
      Vector c(d);
      if (k % 2 == 0) {
        for (Eigen::Index i = 0; i < d; ++i) c[i] = rng.uniform();
      } else {
        const Decision& base = pool[rng.below(pool.size())];
        for (Eigen::Index i = 0; i < d; ++i) {
          c[i] = std::clamp(base[i] + config.perturbation * rng.normal(), 0.0, 1.0);
        }
      }
      candidates.push_back(problem.canonical(c));
    }
    if (config.skip_evaluated) {
      std::vector<Decision> resolved;
      for (const auto& c : candidates) resolved.push_back(resolve(c, problem, pool, config.exec));
      candidates = keep_unseen(std::move(candidates), resolved, seen);
    }
    const double beta = config.beta_schedule ? beta_schedule(config.pool_size, t) : config.beta;
    const Selection sel = select_candidate(gp, candidates, beta, config.exec);

    EvaluationRecord rec;
    rec.iteration = t;
    if (problem.feasible(sel.point)) {
      rec.x = sel.point;
      rec.y = evaluate(sel.point);
      pool.push_back(sel.point);
    } else {
      rec.x = post_decode(sel.point, pool, config.exec);
      rec.y = evaluate(rec.x);
      rec.projected = true;
      ++r.projections;
    }
    seen.insert(decision_key(rec.x));
    xs.push_back(sel.point);
    ys.push_back(rec.y);
    best = std::min(best, rec.y);
    rec.best = best;
    rec.seconds = since(start);
    r.trace.push_back(std::move(rec));
  }
  r.final_pool = std::move(pool);
  finish(r, evaluate, start);
  return r;
}

RunResult simulated_annealing_run(const Dataset& dataset, const Problem& problem,
                                  const SaConfig& config) {
  config.validate();
  const auto start = Clock::now();
  const RngStream root(RngSeed{config.seed});
  Evaluator evaluate(problem, root.derive("noise"));
  InitialDesign init = initial_design(dataset, problem, config.initial, root.derive("x0"), evaluate);

  RunResult r;
  r.method = "sa";
  r.initial_decisions = init.xs;
  r.initial_values = init.ys;

  std::size_t start_idx = 0;
  for (std::size_t i = 1; i < init.ys.size(); ++i) {
    if (init.ys[i] < init.ys[start_idx]) start_idx = i;
  }
  Decision current = init.xs[start_idx];
  double current_y = init.ys[start_idx];
  double best = current_y;

  double temperature = 1.0;
  if (config.initial_temperature) {
    temperature = *config.initial_temperature;
  } else if (init.ys.size() > 1) {
    const double mean = std::accumulate(init.ys.begin(), init.ys.end(), 0.0) / static_cast<double>(init.ys.size());
    double var = 0.0;
    for (double y : init.ys) var += (y - mean) * (y - mean);
    var /= static_cast<double>(init.ys.size() - 1);
    if (var > 0.0) temperature = std::sqrt(var);
  }

  auto move_rng = root.derive("moves");
  auto accept_rng = root.derive("accept");
  for (std::size_t t = 1; t <= config.iterations; ++t) {
    Decision proposal = current;
    bool found = false;
    for (std::size_t attempt = 0; attempt < config.max_proposals && !found; ++attempt) {
      Decision cand;
      if (problem.neighbor) {
        cand = problem.neighbor(current, move_rng);
      } else {
        cand = current;
        const auto i = static_cast<Eigen::Index>(move_rng.below(problem.dim));
        cand[i] = std::clamp(cand[i] + config.step * move_rng.normal(), 0.0, 1.0);
      }
      if (problem.feasible(cand)) {
        proposal = std::move(cand);
        found = true;
      }
    }
    const double y = evaluate(proposal);
    const double u = accept_rng.uniform();
    bool accept = y <= current_y;
    if (!accept && temperature > 0.0) accept = u < std::exp(-(y - current_y) / temperature);
    if (accept) {
      current = proposal;
      current_y = y;
    }
    best = std::min(best, y);
    r.trace.push_back({t, Vector(), proposal, false, y, best, since(start)});
    temperature *= config.cooling;
  }
  r.final_pool = std::move(init.pool);
  finish(r, evaluate, start);
  return r;
}

}  // namespace cagebo
