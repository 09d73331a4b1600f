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

#include "cagebo/error.hpp"
#include "cagebo/gp.hpp"
#include "cagebo/rng.hpp"
#include "oracles.hpp"

using namespace cagebo;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("Matern 5/2 values") {
  KernelParams p{1.0, 1.0, 0.0};
  CHECK(matern52(p, 0.0) == 1.0);
  const double want = oracle::matern52(1.0, 1.0, 1.0);
  CHECK(want == doctest::Approx(0.5240).epsilon(1e-4));
  CHECK(matern52(p, 1.0) == doctest::Approx(want).epsilon(1e-15));
  KernelParams q{0.5, 2.0, 0.0};
  CHECK(matern52(q, 100 * 0.5) < 1e-30 * 2.0);
  CHECK_THROWS_AS(kernel_eval(p, vec({0, 0}), vec({0})), Error);
}

TEST_CASE("fit interpolates a single observation") {
  std::vector<Vector> z{vec({0.3, 0.4})};
  std::vector<double> y{2.5};
  const auto st = fit(z, y, KernelParams{1.0, 1.0, 1e-12});
  const auto m = posterior(st, z[0]);
  CHECK(m.mean == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(m.stddev <= 1e-5);
}

TEST_CASE("fit survives duplicated points without noise") {
  std::vector<Vector> z{vec({0.1}), vec({0.1}), vec({0.5})};
  std::vector<double> y{1.0, 1.0, 0.0};
  KernelParams p{0.3, 1.0, 1e-300};
  CHECK_NOTHROW(fit(z, y, p));
  const auto st = fit(z, y, p);
  CHECK(st.jitter > 0.0);
  CHECK(posterior(st, z[0]).mean == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("posterior matches the dense inverse oracle and reverts far away") {
  RngStream rng(RngSeed{11});
  std::vector<Vector> z;
  std::vector<double> y;
  for (int i = 0; i < 5; ++i) {
    const auto u = rng.uniform_vector(3);
    z.push_back(Eigen::Map<const Vector>(u.data(), 3));
    y.push_back(rng.normal());
  }
  const auto st = fit(z, y);
  for (const auto& q : z) {
    const auto got = posterior(st, q);
    const auto want = oracle::gp_dense(st, q);
    CHECK(std::abs(got.mean - want.mean) <= 1e-8);
    CHECK(std::abs(got.stddev - want.stddev) <= 1e-8);
  }
  const auto far = posterior(st, Vector::Constant(3, 1e4));
  CHECK(far.mean == doctest::Approx(st.y_mean).epsilon(1e-9));
  CHECK(far.stddev == doctest::Approx(std::sqrt(st.params.signal_variance) * st.y_scale).epsilon(1e-9));
  CHECK_THROWS_AS(posterior(st, vec({0.0})), Error);
}

TEST_CASE("fit picks the maximum likelihood grid point") {
  RngStream rng(RngSeed{12});
  std::vector<Vector> z;
  std::vector<double> y;
  for (int i = 0; i < 8; ++i) {
    const auto u = rng.uniform_vector(2);
    z.push_back(Eigen::Map<const Vector>(u.data(), 2));
    y.push_back(std::sin(4 * z.back()[0]) + z.back()[1]);
  }
  const auto st = fit(z, y, std::nullopt, Exec::serial);
  for (const auto& p : hyperparameter_grid(2)) {
    CHECK(fit(z, y, p).log_marginal_likelihood <= st.log_marginal_likelihood + 1e-12);
  }
  const auto par = fit(z, y, std::nullopt, Exec::parallel);
  CHECK(par.log_marginal_likelihood == st.log_marginal_likelihood);
  CHECK(par.alpha == st.alpha);
}

TEST_CASE("lcb and candidate selection") {
  CHECK(lcb_from_moments({1.0, 1.0}, 1.0) == 0.0);
  CHECK(lcb_from_moments({0.5, 0.0}, 7.0) == 0.5);
  CHECK(lcb_from_moments({0.3, 2.0}, 0.0) == 0.3);

  std::vector<Vector> z{vec({0.0}), vec({1.0})};
  std::vector<double> y{0.0, 1.0};
  const auto st = fit(z, y, KernelParams{0.5, 1.0, 1e-6});
  std::vector<Vector> one{vec({0.2})};
  CHECK(select_candidate(st, one, 1.0).index == 0);
  std::vector<Vector> none;
  CHECK_THROWS_AS(select_candidate(st, none, 1.0), Error);
  // Duplicate best candidates resolve to the first.
  std::vector<Vector> c{vec({1.0}), vec({0.0}), vec({0.0})};
  CHECK(select_candidate(st, c, 0.0).index == 1);

  std::vector<double> shifted{100.0, 101.0};
  const auto st2 = fit(z, shifted, KernelParams{0.5, 1.0, 1e-6});
  std::vector<Vector> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(vec({i / 20.0}));
  CHECK(select_candidate(st, grid, 1.0).index == select_candidate(st2, grid, 1.0).index);
  CHECK(lcb_scores(st, grid, 2.0, Exec::serial) == lcb_scores(st, grid, 2.0, Exec::parallel));
}

TEST_CASE("confidence schedule") {
  const double b = beta_schedule(512, 3, 0.1);
  CHECK(b == doctest::Approx(2.0 * std::log(512 * 9 * M_PI * M_PI / (6 * 0.1))));
  CHECK(beta_schedule(512, 4, 0.1) > b);
}
