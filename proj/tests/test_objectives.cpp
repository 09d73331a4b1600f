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

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cagebo/error.hpp"
#include "cagebo/objectives.hpp"
#include "cagebo/rng.hpp"
#include "oracles.hpp"

using namespace cagebo;

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector random_in(RngStream& rng, const Vector& lo, const Vector& hi) {
  Vector x(lo.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * rng.uniform();
  return x;
}

}  // namespace

TEST_CASE("Keane bump") {
  CHECK(keane_bump(Vector::Constant(2, 1.0)) == 0.0);
  CHECK_THROWS_AS(keane_bump(Vector::Zero(3)), Error);
  Vector x(2);
  x << 1.60086, 0.46850;
  const double want = oracle::keane({1.60086, 0.46850});
  CHECK(want == doctest::Approx(-0.36498).epsilon(1e-4));
  CHECK(keane_bump(x) == doctest::Approx(want).epsilon(1e-14));
  // Under Keane's original product and sum constraints the grid oracle lands on this point.
  const auto g = grid_refine_minimize([](const Vector& v) { return keane_bump(v); }, Vector::Constant(2, 0.01),
                                      Vector::Constant(2, 10.0), 401, 40,
                                      [](const Vector& v) { return v.prod() >= 0.75 && v.sum() <= 15.0; });
  CHECK(g.value == doctest::Approx(want).epsilon(1e-4));
}

TEST_CASE("Michalewicz") {
  CHECK(michalewicz(Vector::Zero(5)) == 0.0);
  CHECK_THROWS_AS(michalewicz(Vector::Constant(2, 4.0)), Error);
  RngStream rng(RngSeed{5});
  for (int i = 0; i < 100; ++i) {
    const Vector x = random_in(rng, Vector::Zero(4), Vector::Constant(4, std::numbers::pi));
    CHECK(michalewicz(x) >= -4.0);
  }
  const auto g = grid_refine_minimize([](const Vector& v) { return michalewicz(v); }, Vector::Zero(2),
                                      Vector::Constant(2, std::numbers::pi));
  CHECK(g.value == doctest::Approx(-1.8013).epsilon(1e-3 / 1.8013));
}

TEST_CASE("Ackley") {
  CHECK(ackley(Vector::Zero(2)) == 0.0);
  CHECK(ackley(Vector::Zero(7)) == 0.0);
  const double want = oracle::ackley({1.0, 1.0});
  CHECK(want == doctest::Approx(3.6254).epsilon(1e-4));
  CHECK(ackley(Vector::Constant(2, 1.0)) == doctest::Approx(want).epsilon(1e-14));
  Vector x(3);
  x << 0.3, -1.7, 2.2;
  CHECK(ackley(x) == ackley(-x));
  CHECK_THROWS_AS(ackley(Vector::Constant(2, 40.0)), Error);
}

TEST_CASE("reference implementations agree on random points") {
  RngStream rng(RngSeed{6});
  for (int i = 0; i < 100; ++i) {
    const Vector k = random_in(rng, Vector::Constant(5, 0.01), Vector::Constant(5, 10.0));
    CHECK(std::abs(keane_bump(k) - oracle::keane(to_std(k))) <= 1e-12);
    const Vector m = random_in(rng, Vector::Zero(5), Vector::Constant(5, std::numbers::pi));
    CHECK(std::abs(michalewicz(m) - oracle::michalewicz(to_std(m))) <= 1e-12);
    const Vector a = random_in(rng, Vector::Constant(5, -5.0), Vector::Constant(5, 5.0));
    CHECK(std::abs(ackley(a) - oracle::ackley(to_std(a))) <= 1e-12);
  }
}

TEST_CASE("box codec composes with the raw functions") {
  RngStream rng(RngSeed{8});
  for (auto f : {TestFunction::keane, TestFunction::michalewicz, TestFunction::ackley}) {
    const auto spec = default_spec(f, 4);
    for (int i = 0; i < 50; ++i) {
      const auto u = rng.uniform_vector(4);
      const Vector unit = Eigen::Map<const Vector>(u.data(), 4);
      const Vector raw = spec.lower.array() + (spec.upper - spec.lower).array() * unit.array();
      CHECK((scale_to_box(unit, spec.lower, spec.upper) - raw).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((unscale_from_box(raw, spec.lower, spec.upper) - unit).cwiseAbs().maxCoeff() <= 1e-12);
      const double direct = f == TestFunction::keane         ? oracle::keane(to_std(raw))
                            : f == TestFunction::michalewicz ? oracle::michalewicz(to_std(raw))
                                                             : oracle::ackley(to_std(raw));
      CHECK(std::abs(evaluate_synthetic(spec, unit) - direct) <= 1e-12);
    }
  }
  CHECK(parse_test_function("ackley") == TestFunction::ackley);
  CHECK_THROWS_AS(parse_test_function("rosenbrock"), Error);
}

TEST_CASE("random decoder dataset") {
  const auto spec = default_spec(TestFunction::michalewicz, 30);
  const auto g = make_random_decoder_dataset(4, spec, 2000, 10);
  CHECK(g.dataset.size() == 2000);
  CHECK(g.dataset.feasible_count() == 1000);
  CHECK(feasible_subset(g.dataset).size() == 1000);
  for (const auto& it : g.dataset.items) CHECK(g.problem.feasible(it.x) == it.feasible);
  RngStream rng(RngSeed{44});
  int hits = 0;
  for (int i = 0; i < 200; ++i) {
    const auto u = rng.uniform_vector(30);
    hits += g.problem.feasible(Eigen::Map<const Vector>(u.data(), 30));
  }
  CHECK(hits == 0);
  const auto again = make_random_decoder_dataset(4, spec, 2000, 10);
  CHECK(dataset_to_json(again.dataset) == dataset_to_json(g.dataset));
}

TEST_CASE("disk constraint") {
  const Disk d = default_disk(2);
  CHECK(d.radius == doctest::Approx(0.15));
  CHECK(in_disk(d, Vector::Constant(2, 0.5)));
  Vector edge(2);
  edge << 0.5, 0.66;
  CHECK_FALSE(in_disk(d, edge));
  const auto g = make_disk_dataset(1, default_spec(TestFunction::ackley, 2), d, 500);
  CHECK(g.dataset.size() == 500);
  for (const auto& it : g.dataset.items) CHECK(in_disk(d, it.x) == it.feasible);
}
