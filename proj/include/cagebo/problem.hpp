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

#include "cagebo/core.hpp"

namespace cagebo {

/// A black-box minimization problem over [0,1]^d with an implicit feasibility oracle.
struct Problem {
  std::string name;
  std::size_t dim = 0;
  /// Noiseless objective f; the optimizers add noise of `noise_std`.
  std::function<double(const Decision&)> objective;
  /// Feasibility oracle h, deterministic in x.
  std::function<bool(const Decision&)> feasible;
  double noise_std = 0.0;
  /// Codec normalization applied to decoder output; identity when empty.
  std::function<Decision(const Decision&)> canonicalize;
  /// Local move used by simulated annealing; coordinate perturbation when empty.
  std::function<Decision(const Decision&, RngStream&)> neighbor;

  Decision canonical(const Decision& x) const { return canonicalize ? canonicalize(x) : x; }
};

}  // namespace cagebo
