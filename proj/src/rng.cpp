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

#include "cagebo/rng.hpp"

#include <cmath>
#include <numbers>

namespace cagebo {

std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RngStream::RngStream(RngSeed seed) : key_(mix64(seed.seed ^ 0x6a09e667f3bcc909ULL)) {}

RngStream RngStream::derive(std::string_view label) const {
  return RngStream(mix64(key_ ^ mix64(fnv1a(label))), 0);
}

RngStream RngStream::derive(std::uint64_t index) const {
  return RngStream(mix64(key_ + mix64(index ^ 0xa54ff53a5f1d36f1ULL)), 0);
}

RngStream::result_type RngStream::operator()() {
  return mix64(key_ ^ mix64(counter_++));
}

double RngStream::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  // Box-Muller without caching; one normal per two uniforms keeps the
  // stream position a simple function of the number of draws.
  double u1 = uniform();
  const double u2 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t RngStream::below(std::size_t n) {
  if (n <= 1) return 0;
  // Lemire's multiply-shift; bias is below 2^-64 * n.
  const unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
  return static_cast<std::size_t>(m >> 64);
}

std::vector<double> RngStream::normal_vector(std::size_t n) {
  std::vector<double> out(n);
  for (auto& v : out) v = normal();
  return out;
}

std::vector<double> RngStream::uniform_vector(std::size_t n) {
  std::vector<double> out(n);
  for (auto& v : out) v = uniform();
  return out;
}

}  // namespace cagebo
