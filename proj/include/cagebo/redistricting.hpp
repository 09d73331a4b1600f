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

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "cagebo/core.hpp"
#include "cagebo/kernels.hpp"
#include "cagebo/problem.hpp"

namespace cagebo {

/// Police districting scenario: regions, each patrolled by one unit, to be
/// grouped into zones whose units only serve calls inside the zone.
struct DistrictingInstance {
  std::size_t regions = 0;
  std::size_t zones = 0;
  std::vector<std::vector<std::size_t>> neighbors;  // sorted adjacency lists
  Matrix travel;                                    // travel[u][l]: unit home u to call at l
  std::vector<double> arrival;                      // calls per unit time
  double service_rate = 1.0;
  std::vector<std::size_t> base_plan;
  std::vector<std::array<double, 2>> coords;        // optional, for rendering

  bool adjacent(std::size_t a, std::size_t b) const;
  /// Throws InvalidConfig on a malformed instance.
  void validate() const;
};

struct Plan {
  std::vector<std::size_t> zone;  // zone index per region

  bool operator==(const Plan&) const = default;
};

Decision plan_encode(const Plan& plan, std::size_t zones);
/// Per-region argmax over the zone block, ties to the lowest zone index.
Plan plan_decode(const Decision& x, std::size_t regions, std::size_t zones);

enum class PlanViolation { none, primal, empty_zone, contiguity };
const char* violation_name(PlanViolation v);

PlanViolation check_plan(const DistrictingInstance& inst, const Plan& plan);
/// Every zone non-empty and inducing a connected subgraph.
bool feasibility_oracle(const DistrictingInstance& inst, const Plan& plan);

std::vector<std::vector<std::size_t>> zone_members(const Plan& plan, std::size_t zones);

inline constexpr std::size_t kMaxZoneSize = 14;

enum class BalanceSolver { automatic, dense, iterative };

/// Stationary distribution of the zero-capacity hypercube model of one zone.
/// Entry b is the probability that exactly the units whose bits are set in b
/// (bit k = members[k]) are busy. Throws ZoneTooLarge, SingularBalance.
Vector hypercube_steady_state(const DistrictingInstance& inst, std::span<const std::size_t> members,
                              BalanceSolver solver = BalanceSolver::automatic);

struct ZoneEvaluation {
  std::size_t zone = 0;
  std::vector<std::size_t> members;
  double arrival = 0.0;       // lambda_j
  double mean_travel = 0.0;   // tau_j, over served calls
  double workload = 0.0;      // rho_j = (tau_j + 1/mu) lambda_j
  double loss_probability = 0.0;
};

ZoneEvaluation zone_workload(const DistrictingInstance& inst, std::span<const std::size_t> members,
                             BalanceSolver solver = BalanceSolver::automatic);

struct PlanEvaluation {
  std::vector<ZoneEvaluation> zones;
  double variance = 0.0;
};

/// Throws InfeasiblePlan when a zone is empty.
PlanEvaluation evaluate_plan(const DistrictingInstance& inst, const Plan& plan,
                             Exec exec = Exec::parallel);
double workload_variance(const DistrictingInstance& inst, const Plan& plan,
                         Exec exec = Exec::parallel);

/// Reassigns a random border region to the zone of one of its neighbors.
/// Returns false when the plan has no border region.
bool random_border_move(const DistrictingInstance& inst, Plan& plan, RngStream& rng);

/// Labeled neighbors of a base plan: each applies k ~ U{1..radius} border moves.
Dataset generate_labeled_plans(const DistrictingInstance& inst, const Plan& base, std::size_t n,
                               std::uint64_t seed, std::size_t radius);

/// width x height grid, 4-neighborhood, Manhattan travel, lambda ~ U(0,1), mu = 1,
/// banded base plan.
DistrictingInstance grid_instance(std::size_t width, std::size_t height, std::size_t zones,
                                  std::uint64_t seed);

/// Random points in the plane joined by their Gabriel graph, Euclidean travel,
/// lognormal(0, 0.75) arrivals, mu set for 40% utilization, region-growth base plan.
DistrictingInstance atlanta_like_instance(std::size_t regions, std::size_t zones, std::uint64_t seed);

std::string instance_to_json(const DistrictingInstance& inst);
DistrictingInstance instance_from_json(const std::string& text);
void save_instance(const std::filesystem::path& path, const DistrictingInstance& inst);
DistrictingInstance load_instance(const std::filesystem::path& path);

Plan load_plan(const std::filesystem::path& path);
std::string plan_report_json(const Plan& plan, const PlanEvaluation& eval);

/// Problem over the one-hot codec. Feasible means contiguous, non-empty zones
/// of at most `max_zone_size` regions.
Problem make_districting_problem(const DistrictingInstance& inst,
                                 std::size_t max_zone_size = kMaxZoneSize);

}  // namespace cagebo
