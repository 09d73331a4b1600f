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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cagebo/cvae.hpp"
#include "cagebo/objectives.hpp"
#include "cagebo/optimizer.hpp"
#include "cagebo/redistricting.hpp"

namespace cagebo {

enum class Method { cagebo, bo, sa, vae_bo };

Method parse_method(const std::string& name);
std::string to_string(Method m);

enum class ProblemKind { synthetic, ackley_disk, districting };

struct ProblemBlock {
  ProblemKind kind = ProblemKind::synthetic;
  // synthetic and ackley-disk
  TestFunction function = TestFunction::michalewicz;
  std::size_t dim = 30;
  double noise_std = 0.0;
  std::size_t latent_dim = 10;  // random decoder latent width
  std::optional<Vector> center;
  double radius = 0.15;
  // districting
  std::string instance = "grid";  // "grid", "atlanta" or a path
  std::size_t width = 6;
  std::size_t height = 6;
  std::size_t regions = 78;
  std::size_t zones = 4;
  std::uint64_t instance_seed = 0;
  std::size_t locality_radius = 3;
  std::size_t max_zone_size = kMaxZoneSize;
  // shared
  std::size_t n = 2000;
  std::uint64_t data_seed = 0;
};

struct ExperimentConfig {
  ProblemBlock problem;
  Method method = Method::cagebo;
  CvaeConfig cvae;
  CageboConfig optimizer;
  SaConfig sa;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output = "runs";
  bool timing = true;
};

/// Parses a JSON experiment config; unknown keys are rejected with InvalidConfig.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Dataset, problem and (for districting) instance described by a problem block.
struct ProblemSetup {
  Dataset dataset;
  Problem problem;
  std::optional<DistrictingInstance> instance;
};

ProblemSetup generate_problem(const ProblemBlock& block);
/// Rebuilds the problem from files written by `cmd_gen_data`.
ProblemSetup load_problem(const ProblemBlock& block, const std::filesystem::path& dir);

struct SeriesStats {
  std::vector<double> median;
  std::vector<double> mean;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
};

/// Per-iteration statistics of the best-so-far column across seeds;
/// CI is mean +- 1.96 * sample std / sqrt(seeds).
SeriesStats summarize_best(const std::vector<std::vector<TraceRow>>& traces);
double median_of(std::vector<double> values);

RunResult run_method(const ExperimentConfig& cfg, const ProblemSetup& setup, std::uint64_t seed,
                     const std::optional<CvaeModel>& model);

void cmd_gen_data(const ExperimentConfig& cfg, std::ostream& log);
void cmd_train_cvae(const ExperimentConfig& cfg, std::ostream& log);
void cmd_optimize(const ExperimentConfig& cfg, std::ostream& log);
void cmd_plot(const std::vector<std::filesystem::path>& run_dirs, const std::filesystem::path& out,
              std::ostream& log);
void cmd_plot_plan(const std::filesystem::path& instance, const std::filesystem::path& plan,
                   const std::filesystem::path& out, std::ostream& log);
/// Prints the plan report; throws InfeasiblePlan naming the violated rule.
PlanEvaluation cmd_eval_plan(const std::filesystem::path& instance, const std::filesystem::path& plan,
                             std::ostream& out);

/// Exit code for an error: 2 invalid config, 3 infeasible input, 4 numerical failure, 1 otherwise.
int exit_code_for(Errc code);

}  // namespace cagebo
