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

#include <string>
#include <vector>

#include "cagebo/redistricting.hpp"

namespace cagebo {

struct MethodSeries {
  std::string method;
  std::vector<double> median;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
};

/// Convergence figure: one median line and shaded band per method.
std::string convergence_svg(const std::vector<MethodSeries>& series, const std::string& title);

/// Regions drawn at their coordinates, colored by the workload of their zone.
std::string district_map_svg(const DistrictingInstance& inst, const Plan& plan,
                             const PlanEvaluation& eval);

}  // namespace cagebo
