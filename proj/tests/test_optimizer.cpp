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

#include <algorithm>

#include "cagebo/error.hpp"
#include "cagebo/objectives.hpp"
#include "cagebo/optimizer.hpp"
#include "cagebo/rng.hpp"

using namespace cagebo;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Problem quadratic(std::size_t d, std::function<bool(const Decision&)> feasible) {
  Problem p;
  p.name = "quadratic";
  p.dim = d;
  p.objective = [](const Decision& x) { return (x.array() - 0.3).square().sum(); };
  p.feasible = std::move(feasible);
  return p;
}

Dataset uniform_dataset(std::size_t d, std::size_t n, const Problem& p, std::uint64_t seed) {
  Dataset ds;
  ds.dim = d;
  RngStream rng(RngSeed{seed});
  for (std::size_t i = 0; i < n; ++i) {
    const auto u = rng.uniform_vector(d);
    const Vector x = Eigen::Map<const Vector>(u.data(), static_cast<Eigen::Index>(d));
    ds.items.push_back({x, p.feasible(x)});
  }
  return ds;
}

CvaeConfig tiny_cvae() {
  CvaeConfig c;
  c.latent_dim = 2;
  c.epochs = 5;
  c.learning_rate = 1e-3;
  c.encoder_hidden = {8};
  c.decoder_hidden = {8};
  return c;
}

void check_run(const RunResult& r, std::size_t initial, std::size_t iterations) {
  CHECK(r.trace.size() == iterations);
  CHECK(r.evaluations == initial + iterations);
  CHECK(r.evaluated.size() == initial + iterations);
  double best = r.initial_best();
  for (const auto& rec : r.trace) {
    best = std::min(best, rec.y);
    CHECK(rec.best == best);
  }
  const auto rows = r.trace_rows();
  CHECK(rows.size() == iterations + 1);
  CHECK(rows.front().iteration == 0);
  CHECK(rows.front().best == r.initial_best());
  CHECK(r.incumbent_value == best);
}

}  // namespace

TEST_CASE("post-decode picks the nearest pool member") {
  std::vector<Decision> pool{vec({0, 0}), vec({1, 1})};
  CHECK(post_decode(vec({0.1, 0.2}), pool) == vec({0, 0}));
  CHECK(post_decode(vec({1, 1}), pool) == vec({1, 1}));
  std::vector<Decision> tie{vec({0, 0}), vec({1, 0})};
  CHECK(post_decode_index(vec({0.5, 0}), tie, Exec::serial) == 0);
  CHECK(post_decode_index(vec({0.5, 0}), tie, Exec::parallel) == 0);
  std::vector<Decision> empty;
  CHECK_THROWS_AS(post_decode(vec({0, 0}), empty), Error);
}

TEST_CASE("indirect objective branches") {
  CvaeModel m = init_model(2, tiny_cvae());
  for (auto& l : m.decoder.layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
  std::vector<Decision> pool{vec({0.9, 0.9}), vec({0.1, 0.1}), vec({0.6, 0.2})};

  const Problem open = quadratic(2, [](const Decision&) { return true; });
  Evaluator e1(open, RngStream(RngSeed{1}));
  const auto a = indirect_objective(Vector::Zero(2), m, open, pool, e1);
  CHECK_FALSE(a.projected);
  CHECK(a.x_used == vec({0.5, 0.5}));
  CHECK(a.y == open.objective(vec({0.5, 0.5})));

  const Problem closed = quadratic(2, [](const Decision&) { return false; });
  Evaluator e2(closed, RngStream(RngSeed{1}));
  RngStream rng(RngSeed{2});
  for (int i = 0; i < 20; ++i) {
    const auto z = rng.normal_vector(2);
    const auto b = indirect_objective(Eigen::Map<const Vector>(z.data(), 2), m, closed, pool, e2);
    CHECK(b.projected);
    CHECK(b.x_used == pool[2]);
    CHECK(b.y == closed.objective(pool[2]));
  }
}

TEST_CASE("always-infeasible oracle keeps every evaluation on the pool") {
  std::vector<Decision> pool{vec({0.2, 0.2}), vec({0.8, 0.1}), vec({0.5, 0.9})};
  const Problem p = quadratic(2, [](const Decision&) { return false; });
  Dataset ds{2, {}};
  for (const auto& x : pool) ds.items.push_back({x, true});
  RngStream rng(RngSeed{3});
  for (int i = 0; i < 40; ++i) {
    const auto u = rng.uniform_vector(2);
    ds.items.push_back({Eigen::Map<const Vector>(u.data(), 2), false});
  }
  CageboConfig cfg;
  cfg.iterations = 6;
  cfg.initial = 2;
  cfg.pool_size = 32;
  for (const auto& r : {cagebo_run(ds, p, tiny_cvae(), cfg), vanilla_bo_run(ds, p, cfg)}) {
    for (const auto& x : r.evaluated) {
      CHECK(std::find(pool.begin(), pool.end(), x) != pool.end());
    }
    CHECK(r.final_pool.size() == pool.size());
  }
}

TEST_CASE("runs honour budgets, traces and determinism") {
  const Disk disk{Vector::Constant(2, 0.5), 0.3};
  const Problem p = quadratic(2, [disk](const Decision& x) { return in_disk(disk, x); });
  const Dataset ds = uniform_dataset(2, 300, p, 4);
  CageboConfig cfg;
  cfg.iterations = 12;
  cfg.initial = 4;
  cfg.pool_size = 64;
  cfg.seed = 5;
  SaConfig sa;
  sa.iterations = 12;
  sa.initial = 4;
  sa.seed = 5;
  check_run(cagebo_run(ds, p, tiny_cvae(), cfg), 4, 12);
  check_run(vae_bo_run(ds, p, tiny_cvae(), cfg), 4, 12);
  check_run(vanilla_bo_run(ds, p, cfg), 4, 12);
  check_run(simulated_annealing_run(ds, p, sa), 4, 12);

  const auto r1 = cagebo_run(ds, p, tiny_cvae(), cfg);
  const auto r2 = cagebo_run(ds, p, tiny_cvae(), cfg);
  for (std::size_t i = 0; i < r1.trace.size(); ++i) {
    CHECK(r1.trace[i].y == r2.trace[i].y);
    CHECK(r1.trace[i].z == r2.trace[i].z);
  }
  CHECK(simulated_annealing_run(ds, p, sa).evaluated == simulated_annealing_run(ds, p, sa).evaluated);

  cfg.iterations = 0;
  sa.iterations = 0;
  for (const auto& r : {cagebo_run(ds, p, tiny_cvae(), cfg), vanilla_bo_run(ds, p, cfg),
                        vae_bo_run(ds, p, tiny_cvae(), cfg), simulated_annealing_run(ds, p, sa)}) {
    CHECK(r.trace.empty());
    CHECK(r.incumbent_value == r.initial_best());
  }
}

TEST_CASE("simulated annealing regimes") {
  const Problem p = quadratic(3, [](const Decision&) { return true; });
  const Dataset ds = uniform_dataset(3, 50, p, 6);
  SaConfig sa;
  sa.iterations = 1000;
  sa.initial = 1;
  sa.step = 0.05;
  const auto r = simulated_annealing_run(ds, p, sa);
  CHECK(r.incumbent_value < 0.05);

  // Zero temperature: the walk never moves uphill, so every accepted point improves.
  sa.iterations = 200;
  sa.initial_temperature = 0.0;
  const auto cold = simulated_annealing_run(ds, p, sa);
  double current = cold.initial_best();
  for (const auto& rec : cold.trace) {
    if (rec.y <= current) current = rec.y;
    CHECK(rec.best == std::min(current, rec.best));
  }

  // Constant objective: every proposal is accepted, so the walk drifts from its start.
  Problem flat = p;
  flat.objective = [](const Decision&) { return 1.0; };
  sa.initial_temperature = 1.0;
  sa.iterations = 30;
  const auto walk = simulated_annealing_run(ds, flat, sa);
  std::size_t moved = 0;
  for (std::size_t i = 1; i < walk.trace.size(); ++i) {
    moved += walk.trace[i].x != walk.trace[i - 1].x;
    CHECK((walk.trace[i].x - walk.trace[i - 1].x).cwiseAbs().maxCoeff() <= 1.0);
  }
  CHECK(moved >= 20);
}

TEST_CASE("configuration checks") {
  CageboConfig c;
  c.initial = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  SaConfig s;
  s.cooling = 1.5;
  CHECK_THROWS_AS(s.validate(), Error);
}
