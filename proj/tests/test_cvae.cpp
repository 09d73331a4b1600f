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
#include <filesystem>

#include "cagebo/cvae.hpp"
#include "cagebo/error.hpp"
#include "cagebo/rng.hpp"

using namespace cagebo;

namespace {

void zero(Mlp& net) {
  for (auto& l : net.layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
}

CvaeConfig small_config() {
  CvaeConfig c;
  c.latent_dim = 2;
  c.encoder_hidden = {4};
  c.decoder_hidden = {5};
  c.epochs = 0;
  c.seed = 9;
  return c;
}

// Straight-loop forward pass: tanh hidden layers, identity output.
std::vector<double> loop_forward(const Mlp& net, std::vector<double> a) {
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& L = net.layers[l];
    std::vector<double> next(static_cast<std::size_t>(L.weight.rows()));
    for (Eigen::Index i = 0; i < L.weight.rows(); ++i) {
      double s = L.bias[i];
      for (Eigen::Index j = 0; j < L.weight.cols(); ++j) s += L.weight(i, j) * a[static_cast<std::size_t>(j)];
      next[static_cast<std::size_t>(i)] = l + 1 < net.layers.size() ? std::tanh(s) : s;
    }
    a = next;
  }
  return a;
}

}  // namespace

TEST_CASE("zero-weight encoder and decoder") {
  CvaeModel m = init_model(3, small_config());
  zero(m.encoder);
  zero(m.decoder);
  const auto g = encode(m, Vector::Constant(3, 0.7), true);
  CHECK(g.mean.isZero());
  CHECK(g.log_var.isZero());
  const Vector x = decode(m, Vector::Constant(2, 3.0), true);
  CHECK(x.size() == 3);
  CHECK((x.array() == 0.5).all());
  CHECK_THROWS_AS(encode(m, Vector::Zero(2), true), Error);
  CHECK_THROWS_AS(decode(m, Vector::Zero(3), true), Error);
}

TEST_CASE("forward pass matches a straight-loop network") {
  RngStream rng(RngSeed{4});
  const std::vector<std::size_t> widths{4, 3, 5, 2};
  const Mlp net = make_mlp(widths, rng);
  const auto u = rng.uniform_vector(4);
  const Matrix in = Eigen::Map<const Matrix>(u.data(), 4, 1);
  const Matrix got = net.forward(in);
  const auto want = loop_forward(net, u);
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(got(static_cast<Eigen::Index>(i), 0) == doctest::Approx(want[i]).epsilon(1e-14));
}

TEST_CASE("reparameterization") {
  LatentGaussian g{Vector::Constant(1, 1.0), Vector::Constant(1, 2.0 * std::log(2.0))};
  CHECK(reparameterize(g, Vector::Constant(1, 0.5))[0] == doctest::Approx(2.0));
  CHECK(reparameterize(g, Vector::Zero(1))[0] == 1.0);
  LatentGaussian s{Vector::Zero(2), Vector::Zero(2)};
  const Vector e = Vector::LinSpaced(2, -0.3, 0.8);
  CHECK(reparameterize(s, e) == e);
}

TEST_CASE("KL divergence to the standard normal") {
  CHECK(kl_to_standard_normal({Vector::Zero(3), Vector::Zero(3)}) == 0.0);
  CHECK(kl_to_standard_normal({Vector::Constant(1, 1.0), Vector::Zero(1)}) == doctest::Approx(0.5));
  const double want = 0.5 * (4.0 - std::log(4.0) - 1.0);
  CHECK(want == doctest::Approx(0.8069).epsilon(1e-4));
  CHECK(kl_to_standard_normal({Vector::Zero(1), Vector::Constant(1, std::log(4.0))}) == doctest::Approx(want));
}

TEST_CASE("loss limits") {
  CvaeConfig c = small_config();
  CvaeModel m = init_model(3, c);
  zero(m.encoder);
  zero(m.decoder);
  std::vector<LabeledDecision> batch{{Vector::Constant(3, 0.5), true}};
  const Matrix eps = Matrix::Constant(2, 1, 0.4);
  const auto perfect = elbo_loss(m, batch, eps, {1.0, 1.0}, nullptr);
  CHECK(perfect.loss == doctest::Approx(0.0));

  CvaeModel r = init_model(3, c);
  r.config.kl_weight = 0.0;
  std::vector<LabeledDecision> two{{Vector::Constant(3, 0.9), true}, {Vector::Constant(3, 0.1), false}};
  const Matrix e2 = Matrix::Constant(2, 2, -0.2);
  const auto t = elbo_loss(r, two, e2, {0.5, 2.0}, nullptr);
  // Per-item reconstruction errors, recomputed from the decoded outputs.
  double weighted = 0.0;
  for (int i = 0; i < 2; ++i) {
    const auto g = encode(r, two[i].x, two[i].feasible);
    const Vector x_hat = decode(r, reparameterize(g, e2.col(i)), two[i].feasible);
    weighted += (two[i].feasible ? 2.0 : 0.5) * (x_hat - two[i].x).squaredNorm();
  }
  CHECK(t.loss == doctest::Approx(weighted / 2.0).epsilon(1e-12));
}

TEST_CASE("training") {
  Dataset d;
  d.dim = 4;
  RngStream rng(RngSeed{21});
  for (int i = 0; i < 60; ++i) {
    Vector x(4);
    for (int j = 0; j < 4; ++j) x[j] = rng.uniform() < 0.5 ? 0.2 : 0.8;
    d.items.push_back({x, x[0] < 0.5});
  }
  CvaeConfig c = small_config();
  const auto [m0, r0] = train(d, c);
  CHECK(r0.elbo.empty());
  const CvaeModel fresh = init_model(4, c);
  CHECK(m0.encoder.layers[0].weight == fresh.encoder.layers[0].weight);

  c.epochs = 150;
  c.learning_rate = 1e-2;
  c.batch_size = 16;
  const auto [m1, r1] = train(d, c);
  REQUIRE(r1.elbo.size() == 150);
  CHECK(r1.elbo.back() > r1.elbo.front());
  const auto [m2, r2] = train(d, c);
  CHECK(r1.elbo == r2.elbo);

  Dataset none{4, {{Vector::Constant(4, 0.5), false}}};
  c.conditional = false;
  CHECK_THROWS_AS(train(none, c), Error);
}

TEST_CASE("latent samples around feasible decisions") {
  const CvaeModel m = init_model(3, small_config());
  std::vector<Decision> one{Vector::Constant(3, 0.3)};
  RngStream rng(RngSeed{1});
  const auto z = sample_feasible_latents(m, one, 1, rng, 0.0);
  REQUIRE(z.size() == 1);
  CHECK(z[0] == encode(m, one[0], true).mean);
  CHECK(sample_feasible_latents(m, one, 512, rng).size() == 512);
  std::vector<Decision> empty;
  CHECK_THROWS_AS(sample_feasible_latents(m, empty, 4, rng), Error);
}

TEST_CASE("model JSON round trip") {
  CvaeConfig c = small_config();
  c.reconstruction = Reconstruction::bernoulli;
  const CvaeModel m = init_model(3, c);
  const auto path = std::filesystem::temp_directory_path() / "cagebo_cvae_test" / "model.json";
  save_model(path, m);
  const CvaeModel back = load_model(path);
  std::filesystem::remove_all(path.parent_path());
  RngStream rng(RngSeed{2});
  for (int i = 0; i < 5; ++i) {
    const auto u = rng.uniform_vector(3);
    const Vector x = Eigen::Map<const Vector>(u.data(), 3);
    CHECK(encode(m, x, i % 2).mean == encode(back, x, i % 2).mean);
    CHECK(decode(m, x.head(2), true) == decode(back, x.head(2), true));
  }
  CHECK(back.config.reconstruction == Reconstruction::bernoulli);
}
