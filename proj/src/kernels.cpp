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

#include "cagebo/kernels.hpp"

#include <cmath>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cagebo {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::size_t argmin_first(std::span<const double> values) {
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) continue;
    if (!found || values[i] < best_value) {
      best = i;
      best_value = values[i];
      found = true;
    }
  }
  return best;
}

void squared_distances(const Vector& x, std::span<const Decision> pool, std::span<double> out,
                       Exec exec) {
  const auto n = static_cast<std::ptrdiff_t>(pool.size());
  for (const auto& p : pool) require_dim(static_cast<std::size_t>(p.size()),
                                         static_cast<std::size_t>(x.size()), "squared_distances");
  if (exec == Exec::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double diff = pool[i][k] - x[k];
        acc += diff * diff;
      }
      out[i] = acc;
    }
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      const double diff = pool[i][k] - x[k];
      acc += diff * diff;
    }
    out[i] = acc;
  }
}

std::size_t nearest_index(const Vector& x, std::span<const Decision> pool, Exec exec) {
  if (pool.empty()) throw Error(Errc::EmptyFeasibleSet, "nearest_index: empty pool");
  std::vector<double> d(pool.size());
  squared_distances(x, pool, d, exec);
  return argmin_first(d);
}

}  // namespace cagebo
