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
#include <limits>
#include <string_view>
#include <vector>

namespace cagebo {

struct RngSeed {
  std::uint64_t seed = 0;
};

/// Counter-based random stream. Each draw is a pure function of (key, counter),
/// so a stream derived from a label is independent of how many draws other
/// streams have made. Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(RngSeed seed);

  /// Child stream keyed by a stable label.
  RngStream derive(std::string_view label) const;
  RngStream derive(std::uint64_t index) const;

  result_type operator()();
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Uniform on [0, 1).
  double uniform();
  double normal();
  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n);

  std::vector<double> normal_vector(std::size_t n);
  std::vector<double> uniform_vector(std::size_t n);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  RngStream(std::uint64_t key, int) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace cagebo
