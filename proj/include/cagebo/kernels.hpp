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
#include <span>

#include "cagebo/core.hpp"

namespace cagebo {

/// Execution policy for the data-parallel kernels. `serial` is the reference
/// path; `parallel` uses OpenMP and must produce bit-identical results.
enum class Exec { serial, parallel };

int max_threads();

/// Index of the smallest value; ties go to the lowest index. NaN never wins.
std::size_t argmin_first(std::span<const double> values);

/// Squared Euclidean distance from x to every pool member.
void squared_distances(const Vector& x, std::span<const Decision> pool, std::span<double> out,
                       Exec exec = Exec::parallel);

/// Index of the pool member nearest to x, lowest index on ties.
std::size_t nearest_index(const Vector& x, std::span<const Decision> pool,
                          Exec exec = Exec::parallel);

}  // namespace cagebo
