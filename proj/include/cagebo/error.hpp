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

#include <stdexcept>
#include <string>

namespace cagebo {

enum class Errc {
  DimensionMismatch,
  EmptyFeasibleSet,
  EmptyTrace,
  EmptyBatch,
  EmptyDataset,
  EmptyCandidates,
  DivergedTraining,
  NonPositiveDefinite,
  SingularInput,
  DomainViolation,
  ZoneTooLarge,
  SingularBalance,
  InfeasiblePlan,
  InfeasibleBase,
  InvalidConfig,
  IoError,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline void require_dim(std::size_t got, std::size_t want, const char* where) {
  if (got != want) {
    throw Error(Errc::DimensionMismatch, std::string(where) + ": expected dimension " +
                                             std::to_string(want) + ", got " + std::to_string(got));
  }
}

}  // namespace cagebo
