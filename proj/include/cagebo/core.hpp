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

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cagebo/error.hpp"
#include "cagebo/rng.hpp"

namespace cagebo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point of the decision space, normalized to [0,1]^d at the codec boundary.
using Decision = Vector;
/// A point of the learned latent space.
using LatentPoint = Vector;

struct LabeledDecision {
  Decision x;
  bool feasible = false;
};

struct Dataset {
  std::size_t dim = 0;
  std::vector<LabeledDecision> items;

  std::size_t size() const { return items.size(); }
  std::size_t feasible_count() const;

  /// Throws DimensionMismatch or DomainViolation on a malformed dataset.
  void validate() const;
};

struct EvaluationRecord {
  std::size_t iteration = 0;
  LatentPoint z;
  Decision x;
  bool projected = false;
  double y = 0.0;
  double best = 0.0;
  double seconds = 0.0;
};

/// Decisions with c = 1, in dataset order. Throws EmptyFeasibleSet.
std::vector<Decision> feasible_subset(const Dataset& dataset);
std::vector<Decision> infeasible_subset(const Dataset& dataset);

/// Minimum observed y. Throws EmptyTrace.
double best_so_far(std::span<const EvaluationRecord> records);

/// True when every coordinate is finite and inside [0,1].
bool in_unit_box(const Decision& x);

Dataset read_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, const Dataset& dataset);
std::string dataset_to_json(const Dataset& dataset);
Dataset dataset_from_json(const std::string& text);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

struct TraceRow {
  std::size_t iteration = 0;
  double y = 0.0;
  double best = 0.0;
  bool projected = false;
  double seconds = 0.0;
};

void write_trace_csv(const std::filesystem::path& path, std::span<const TraceRow> rows,
                     bool with_timing = true);
std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace cagebo
