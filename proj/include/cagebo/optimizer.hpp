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

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cagebo/core.hpp"
#include "cagebo/cvae.hpp"
#include "cagebo/gp.hpp"
#include "cagebo/kernels.hpp"
#include "cagebo/problem.hpp"

namespace cagebo {

struct CageboConfig {
  std::size_t iterations = 100;    // T
  std::size_t initial = 10;        // |X0|
  std::size_t pool_size = 512;     // candidates per iteration
  double beta = 1.0;
  bool beta_schedule = false;
  /// Std of the Gaussian perturbations in vanilla BO candidate pools.
  double perturbation = 0.2;
  /// Drop candidates whose resolved decision was already evaluated, unless
  /// every candidate would be dropped.
  bool skip_evaluated = true;
  std::uint64_t seed = 0;
  Exec exec = Exec::parallel;

  void validate() const;
};

struct SaConfig {
  std::size_t iterations = 100;
  std::size_t initial = 10;
  /// Unset picks the sample std of the initial values (1 when degenerate).
  std::optional<double> initial_temperature;
  double cooling = 0.95;
  /// Std of the single-coordinate move for continuous problems.
  double step = 0.1;
  std::size_t max_proposals = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

struct RunResult {
  std::string method;
  std::vector<EvaluationRecord> trace;
  std::vector<Decision> initial_decisions;
  std::vector<double> initial_values;
  Decision incumbent;
  double incumbent_value = 0.0;
  double seconds = 0.0;
  std::size_t projections = 0;
  std::size_t evaluations = 0;
  /// Every decision handed to the objective, in order.
  std::vector<Decision> evaluated;
  /// Feasible pool at the end of the run.
  std::vector<Decision> final_pool;

  double initial_best() const;
  /// Rows for the trace CSV: iteration 0 summarizes the initial design.
  std::vector<TraceRow> trace_rows() const;
};

/// Noisy objective f + N(0, noise_std^2) that counts and records evaluations.
class Evaluator {
 public:
  Evaluator(const Problem& problem, RngStream noise);

  double operator()(const Decision& x);
  std::size_t count() const { return evaluated_.size(); }
  const std::vector<Decision>& evaluated() const { return evaluated_; }
  std::vector<Decision> take_evaluated() { return std::move(evaluated_); }

 private:
  const Problem& problem_;
  RngStream noise_;
  std::vector<Decision> evaluated_;
};

/// Nearest observed feasible decision, lowest index on ties. Throws EmptyFeasibleSet.
std::size_t post_decode_index(const Decision& x, std::span<const Decision> pool,
                              Exec exec = Exec::parallel);
Decision post_decode(const Decision& x, std::span<const Decision> pool, Exec exec = Exec::parallel);

struct IndirectEvaluation {
  double y = 0.0;
  Decision x_used;
  bool projected = false;
};

/// Decodes z with c = 1; evaluates it when feasible, otherwise evaluates its
/// post-decoded projection. The caller appends feasible decodes to the pool.
IndirectEvaluation indirect_objective(const LatentPoint& z, const CvaeModel& model,
                                      const Problem& problem, std::span<const Decision> pool,
                                      Evaluator& evaluate, Exec exec = Exec::parallel);

RunResult cagebo_run(const Dataset& dataset, const Problem& problem, const CvaeConfig& cvae,
                     const CageboConfig& config);
/// Optimization loop with an already trained model.
RunResult cagebo_run_with_model(const CvaeModel& model, const Dataset& dataset,
                                const Problem& problem, const CageboConfig& config);

/// Same loop with an unconditioned VAE trained on feasible decisions only.
RunResult vae_bo_run(const Dataset& dataset, const Problem& problem, const CvaeConfig& vae,
                     const CageboConfig& config);

/// GP-LCB directly on [0,1]^d; infeasible picks are post-decoded.
RunResult vanilla_bo_run(const Dataset& dataset, const Problem& problem, const CageboConfig& config);

RunResult simulated_annealing_run(const Dataset& dataset, const Problem& problem,
                                  const SaConfig& config);

}  // namespace cagebo
