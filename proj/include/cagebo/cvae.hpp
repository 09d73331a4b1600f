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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cagebo/core.hpp"

namespace cagebo {

enum class Reconstruction { squared_error, bernoulli };
enum class Activation { identity, tanh };

struct CvaeConfig {
  std::size_t latent_dim = 10;
  /// Empty means two layers of width max(32, 4 * latent_dim).
  std::vector<std::size_t> encoder_hidden;
  std::vector<std::size_t> decoder_hidden;
  std::size_t epochs = 1000;
  std::size_t batch_size = 64;
  double learning_rate = 1e-4;
  double kl_weight = 0.1;
  /// Weight of infeasible items; unset means n_feasible / n_infeasible.
  std::optional<double> infeasible_weight;
  double feasible_weight = 1.0;
  Reconstruction reconstruction = Reconstruction::squared_error;
  /// false trains a plain VAE on feasible items only (no label input).
  bool conditional = true;
  std::uint64_t seed = 0;

  void validate() const;
  std::vector<std::size_t> resolved_encoder_hidden() const;
  std::vector<std::size_t> resolved_decoder_hidden() const;
};

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
};

/// Fully connected network; columns of the batch matrix are samples.
struct Mlp {
  std::vector<DenseLayer> layers;
  std::vector<Activation> activations;

  std::size_t input_dim() const { return static_cast<std::size_t>(layers.front().weight.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(layers.back().weight.rows()); }
  std::size_t parameter_count() const;

  Matrix forward(const Matrix& input) const;

  /// Forward pass that keeps every layer's post-activation for backprop.
  std::vector<Matrix> forward_cached(const Matrix& input) const;
  /// Accumulates parameter gradients into `grads` and returns d(loss)/d(input).
  Matrix backward(const std::vector<Matrix>& cache, const Matrix& grad_output,
                  std::vector<DenseLayer>& grads) const;
};

Mlp make_mlp(std::span<const std::size_t> widths, RngStream& rng);
std::vector<DenseLayer> zeros_like(const Mlp& net);

struct LatentGaussian {
  Vector mean;
  Vector log_var;
};

struct CvaeModel {
  CvaeConfig config;
  std::size_t data_dim = 0;
  Mlp encoder;  // [x; onehot(c)] -> [mean; log_var]
  Mlp decoder;  // [z; onehot(c)] -> logits, squashed by a sigmoid

  std::size_t latent_dim() const { return config.latent_dim; }
  std::size_t condition_width() const { return config.conditional ? 2 : 0; }
};

/// Freshly initialized model (Glorot-uniform weights, zero biases).
CvaeModel init_model(std::size_t data_dim, const CvaeConfig& config);

LatentGaussian encode(const CvaeModel& model, const Decision& x, bool feasible);
/// Batched encoder: columns of `xs` are decisions. Returns (means, log_vars).
std::pair<Matrix, Matrix> encode_batch(const CvaeModel& model, const Matrix& xs, bool feasible);

LatentPoint reparameterize(const LatentGaussian& g, const Vector& eps);

Decision decode(const CvaeModel& model, const LatentPoint& z, bool feasible);
Matrix decode_batch(const CvaeModel& model, const Matrix& zs, bool feasible);

double kl_to_standard_normal(const LatentGaussian& g);

struct CvaeGradient {
  std::vector<DenseLayer> encoder;
  std::vector<DenseLayer> decoder;
};

struct LossTerms {
  double loss = 0.0;
  double reconstruction = 0.0;  // unweighted, batch mean
  double kl = 0.0;              // batch mean
};

/// Per-item weights w(c) resolved from the config and the training labels.
struct ClassWeights {
  double infeasible = 1.0;
  double feasible = 1.0;
};

/// Negated weighted ELBO, single-sample Monte Carlo, batch mean. `eps` has one
/// column per batch item. Fills `grad` when non-null.
LossTerms elbo_loss(const CvaeModel& model, std::span<const LabeledDecision> batch,
                    const Matrix& eps, const ClassWeights& weights, CvaeGradient* grad);

struct TrainReport {
  std::vector<double> elbo;
  std::vector<double> reconstruction;
  std::vector<double> kl;
};

ClassWeights resolve_weights(const CvaeConfig& config, const Dataset& dataset);

std::pair<CvaeModel, TrainReport> train(const Dataset& dataset, const CvaeConfig& config);

/// Latent samples around observed feasible decisions: pick one uniformly,
/// encode it with c = 1 and draw from its posterior.
std::vector<LatentPoint> sample_feasible_latents(const CvaeModel& model,
                                                 std::span<const Decision> feasible,
                                                 std::size_t count, RngStream& rng,
                                                 double noise_scale = 1.0);
std::vector<LatentPoint> sample_from_posteriors(std::span<const LatentGaussian> posteriors,
                                                std::size_t count, RngStream& rng,
                                                double noise_scale = 1.0);

std::string model_to_json(const CvaeModel& model);
CvaeModel model_from_json(const std::string& text);
void save_model(const std::filesystem::path& path, const CvaeModel& model);
CvaeModel load_model(const std::filesystem::path& path);

}  // namespace cagebo
