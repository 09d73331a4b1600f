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

#include "cagebo/cvae.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

namespace cagebo {

void CvaeConfig::validate() const {
  if (latent_dim < 1) throw Error(Errc::InvalidConfig, "latent_dim must be >= 1");
  if (!(kl_weight >= 0.0)) throw Error(Errc::InvalidConfig, "kl_weight must be >= 0");
  if (!(feasible_weight >= 0.0)) throw Error(Errc::InvalidConfig, "feasible_weight must be >= 0");
  if (infeasible_weight && !(*infeasible_weight >= 0.0)) {
    throw Error(Errc::InvalidConfig, "infeasible_weight must be >= 0");
  }
  if (!(learning_rate > 0.0)) throw Error(Errc::InvalidConfig, "learning_rate must be > 0");
  if (batch_size < 1) throw Error(Errc::InvalidConfig, "batch_size must be >= 1");
}

std::vector<std::size_t> CvaeConfig::resolved_encoder_hidden() const {
  if (!encoder_hidden.empty()) return encoder_hidden;
  const std::size_t w = std::max<std::size_t>(32, 4 * latent_dim);
  return {w, w};
}

std::vector<std::size_t> CvaeConfig::resolved_decoder_hidden() const {
  if (!decoder_hidden.empty()) return decoder_hidden;
  const std::size_t w = std::max<std::size_t>(32, 4 * latent_dim);
  return {w, w};
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

namespace {

void activate(Activation act, Matrix& a) {
  if (act == Activation::tanh) a = a.array().tanh().matrix();
}

Vector sigmoid(const Vector& v) {
  return (1.0 / (1.0 + (-v.array()).exp())).matrix();
}

Matrix sigmoid(const Matrix& m) {
  return (1.0 / (1.0 + (-m.array()).exp())).matrix();
}

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

Matrix with_condition(const Matrix& body, std::size_t cond_width,
                      std::span<const std::uint8_t> labels) {
  Matrix in(body.rows() + static_cast<Eigen::Index>(cond_width), body.cols());
  in.topRows(body.rows()) = body;
  if (cond_width == 2) {
    for (Eigen::Index j = 0; j < body.cols(); ++j) {
      const bool c = labels[static_cast<std::size_t>(j)] != 0;
      in(body.rows(), j) = c ? 0.0 : 1.0;
      in(body.rows() + 1, j) = c ? 1.0 : 0.0;
    }
  }
  return in;
}

Matrix with_condition(const Matrix& body, std::size_t cond_width, bool label) {
  Matrix in(body.rows() + static_cast<Eigen::Index>(cond_width), body.cols());
  in.topRows(body.rows()) = body;
  if (cond_width == 2) {
    in.row(body.rows()).setConstant(label ? 0.0 : 1.0);
    in.row(body.rows() + 1).setConstant(label ? 1.0 : 0.0);
  }
  return in;
}

std::vector<std::size_t> widths_of(std::size_t in, const std::vector<std::size_t>& hidden,
                                   std::size_t out) {
  std::vector<std::size_t> w{in};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}

}  // namespace

Matrix Mlp::forward(const Matrix& input) const {
  Matrix a = input;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Matrix next = layers[l].weight * a;
    next.colwise() += layers[l].bias;
    activate(activations[l], next);
    a = std::move(next);
  }
  return a;
}

std::vector<Matrix> Mlp::forward_cached(const Matrix& input) const {
  std::vector<Matrix> cache;
  cache.reserve(layers.size() + 1);
  cache.push_back(input);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Matrix next = layers[l].weight * cache.back();
    next.colwise() += layers[l].bias;
    activate(activations[l], next);
    cache.push_back(std::move(next));
  }
  return cache;
}

Matrix Mlp::backward(const std::vector<Matrix>& cache, const Matrix& grad_output,
                     std::vector<DenseLayer>& grads) const {
  Matrix g = grad_output;
  for (std::size_t l = layers.size(); l-- > 0;) {
    if (activations[l] == Activation::tanh) {
      g.array() *= 1.0 - cache[l + 1].array().square();
    }
    grads[l].weight.noalias() += g * cache[l].transpose();
    grads[l].bias += g.rowwise().sum();
    g = layers[l].weight.transpose() * g;
  }
  return g;
}

Mlp make_mlp(std::span<const std::size_t> widths, RngStream& rng) {
  Mlp net;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(widths[l]);
    const auto out = static_cast<Eigen::Index>(widths[l + 1]);
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    DenseLayer layer{Matrix(out, in), Vector::Zero(out)};
    for (Eigen::Index j = 0; j < in; ++j) {
      for (Eigen::Index i = 0; i < out; ++i) layer.weight(i, j) = bound * (2.0 * rng.uniform() - 1.0);
    }
    net.layers.push_back(std::move(layer));
    net.activations.push_back(l + 2 < widths.size() ? Activation::tanh : Activation::identity);
  }
  return net;
}

std::vector<DenseLayer> zeros_like(const Mlp& net) {
  std::vector<DenseLayer> out;
  for (const auto& l : net.layers) {
    out.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
  }
  return out;
}

CvaeModel init_model(std::size_t data_dim, const CvaeConfig& config) {
  config.validate();
  CvaeModel model;
  model.config = config;
  model.data_dim = data_dim;
  RngStream root(RngSeed{config.seed});
  auto enc_rng = root.derive("cvae-init").derive("encoder");
  auto dec_rng = root.derive("cvae-init").derive("decoder");
  const std::size_t cw = model.condition_width();
  const auto enc_w = widths_of(data_dim + cw, config.resolved_encoder_hidden(), 2 * config.latent_dim);
  const auto dec_w = widths_of(config.latent_dim + cw, config.resolved_decoder_hidden(), data_dim);
  model.encoder = make_mlp(enc_w, enc_rng);
  model.decoder = make_mlp(dec_w, dec_rng);
  return model;
}

std::pair<Matrix, Matrix> encode_batch(const CvaeModel& model, const Matrix& xs, bool feasible) {
  require_dim(static_cast<std::size_t>(xs.rows()), model.data_dim, "encode");
  const Matrix out = model.encoder.forward(with_condition(xs, model.condition_width(), feasible));
  const auto dz = static_cast<Eigen::Index>(model.latent_dim());
  return {out.topRows(dz), out.bottomRows(dz)};
}

LatentGaussian encode(const CvaeModel& model, const Decision& x, bool feasible) {
  require_dim(static_cast<std::size_t>(x.size()), model.data_dim, "encode");
  auto [mean, log_var] = encode_batch(model, x, feasible);
  return {mean.col(0), log_var.col(0)};
}

LatentPoint reparameterize(const LatentGaussian& g, const Vector& eps) {
  require_dim(static_cast<std::size_t>(eps.size()), static_cast<std::size_t>(g.mean.size()),
              "reparameterize");
  require_dim(static_cast<std::size_t>(g.log_var.size()), static_cast<std::size_t>(g.mean.size()),
              "reparameterize");
  return g.mean + ((0.5 * g.log_var.array()).exp() * eps.array()).matrix();
}

Matrix decode_batch(const CvaeModel& model, const Matrix& zs, bool feasible) {
  require_dim(static_cast<std::size_t>(zs.rows()), model.latent_dim(), "decode");
  return sigmoid(model.decoder.forward(with_condition(zs, model.condition_width(), feasible)));
}

Decision decode(const CvaeModel& model, const LatentPoint& z, bool feasible) {
  require_dim(static_cast<std::size_t>(z.size()), model.latent_dim(), "decode");
  return decode_batch(model, z, feasible).col(0);
}

double kl_to_standard_normal(const LatentGaussian& g) {
  const auto& m = g.mean.array();
  const auto& lv = g.log_var.array();
  return 0.5 * (m.square() + lv.exp() - lv - 1.0).sum();
}

LossTerms elbo_loss(const CvaeModel& model, std::span<const LabeledDecision> batch,
                    const Matrix& eps, const ClassWeights& weights, CvaeGradient* grad) {
  if (batch.empty()) throw Error(Errc::EmptyBatch, "elbo_loss: empty batch");
  const auto B = static_cast<Eigen::Index>(batch.size());
  const auto dz = static_cast<Eigen::Index>(model.latent_dim());
  const auto d = static_cast<Eigen::Index>(model.data_dim);
  require_dim(static_cast<std::size_t>(eps.rows()), model.latent_dim(), "elbo_loss eps");
  require_dim(static_cast<std::size_t>(eps.cols()), batch.size(), "elbo_loss eps");

  Matrix xs(d, B);
  std::vector<std::uint8_t> labels(batch.size());
  Vector w(B);
  for (Eigen::Index j = 0; j < B; ++j) {
    const auto& item = batch[static_cast<std::size_t>(j)];
    require_dim(static_cast<std::size_t>(item.x.size()), model.data_dim, "elbo_loss");
    xs.col(j) = item.x;
    labels[static_cast<std::size_t>(j)] = item.feasible ? 1 : 0;
    w[j] = model.config.conditional ? (item.feasible ? weights.feasible : weights.infeasible) : 1.0;
  }
  const std::span<const std::uint8_t> label_span(labels);
  const std::size_t cw = model.condition_width();

  const auto enc_cache = model.encoder.forward_cached(with_condition(xs, cw, label_span));
  const Matrix mean = enc_cache.back().topRows(dz);
  const Matrix log_var = enc_cache.back().bottomRows(dz);
  const Matrix std_dev = (0.5 * log_var.array()).exp().matrix();
  const Matrix zs = mean + (std_dev.array() * eps.array()).matrix();

  const auto dec_cache = model.decoder.forward_cached(with_condition(zs, cw, label_span));
  const Matrix& logits = dec_cache.back();
  const Matrix xhat = sigmoid(logits);

  Vector rec(B);
  Matrix dlogits(d, B);
  if (model.config.reconstruction == Reconstruction::squared_error) {
    const Matrix diff = xhat - xs;
    rec = diff.array().square().colwise().sum().transpose();
    dlogits = (2.0 * diff.array() * xhat.array() * (1.0 - xhat.array())).matrix();
  } else {
    for (Eigen::Index j = 0; j < B; ++j) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) acc += softplus(logits(i, j)) - xs(i, j) * logits(i, j);
      rec[j] = acc;
    }
    dlogits = xhat - xs;
  }
  const Vector kl =
      (0.5 * (mean.array().square() + log_var.array().exp() - log_var.array() - 1.0))
          .colwise()
          .sum()
          .transpose();

  const double eta = model.config.kl_weight;
  const double inv_b = 1.0 / static_cast<double>(B);
  LossTerms terms;
  terms.loss = (w.array() * rec.array() + eta * kl.array()).sum() * inv_b;
  terms.reconstruction = rec.mean();
  terms.kl = kl.mean();

  if (grad != nullptr) {
    if (grad->encoder.empty()) grad->encoder = zeros_like(model.encoder);
    if (grad->decoder.empty()) grad->decoder = zeros_like(model.decoder);
    for (Eigen::Index j = 0; j < B; ++j) dlogits.col(j) *= w[j] * inv_b;
    const Matrix dz_in = model.decoder.backward(dec_cache, dlogits, grad->decoder);
    const Matrix dzs = dz_in.topRows(dz);
    Matrix denc(2 * dz, B);
    denc.topRows(dz) = dzs + (eta * inv_b) * mean;
    denc.bottomRows(dz) =
        (dzs.array() * eps.array() * 0.5 * std_dev.array() +
         (eta * inv_b) * 0.5 * (log_var.array().exp() - 1.0))
            .matrix();
    model.encoder.backward(enc_cache, denc, grad->encoder);
  }
  return terms;
}

ClassWeights resolve_weights(const CvaeConfig& config, const Dataset& dataset) {
  ClassWeights w;
  w.feasible = config.feasible_weight;
  if (config.infeasible_weight) {
    w.infeasible = *config.infeasible_weight;
  } else {
    const std::size_t nf = dataset.feasible_count();
    const std::size_t ni = dataset.size() - nf;
    w.infeasible = ni > 0 ? static_cast<double>(nf) / static_cast<double>(ni) : 1.0;
  }
  return w;
}

namespace {

struct AdamState {
  std::vector<DenseLayer> m, v;
};

void adam_step(std::vector<DenseLayer>& params, const std::vector<DenseLayer>& grads,
               AdamState& st, double lr, std::size_t t) {
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
  auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
    m = b1 * m + (1.0 - b1) * g;
    v = (b2 * v.array() + (1.0 - b2) * g.array().square()).matrix();
    p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < params.size(); ++l) {
    update(params[l].weight, grads[l].weight, st.m[l].weight, st.v[l].weight);
    update(params[l].bias, grads[l].bias, st.m[l].bias, st.v[l].bias);
  }
}

void zero(std::vector<DenseLayer>& g) {
  for (auto& l : g) {
    l.weight.setZero();
    l.bias.setZero();
  }
}

}  // namespace

std::pair<CvaeModel, TrainReport> train(const Dataset& dataset, const CvaeConfig& config) {
  config.validate();
  if (dataset.items.empty()) throw Error(Errc::EmptyDataset, "train: empty dataset");
  dataset.validate();

  std::vector<LabeledDecision> items;
  if (config.conditional) {
    items = dataset.items;
  } else {
    for (const auto& it : dataset.items) {
      if (it.feasible) items.push_back(it);
    }
    if (items.empty()) throw Error(Errc::EmptyDataset, "train: no feasible items for a VAE");
  }
  const ClassWeights weights = resolve_weights(config, dataset);

  CvaeModel model = init_model(dataset.dim, config);
  TrainReport report;
  if (config.epochs == 0) return {std::move(model), std::move(report)};

  RngStream root(RngSeed{config.seed});
  const auto shuffle_root = root.derive("shuffle");
  const auto eps_root = root.derive("eps");

  CvaeGradient grad{zeros_like(model.encoder), zeros_like(model.decoder)};
  AdamState enc_state{zeros_like(model.encoder), zeros_like(model.encoder)};
  AdamState dec_state{zeros_like(model.decoder), zeros_like(model.decoder)};

  const std::size_t n = items.size();
  const std::size_t bs = std::min(config.batch_size, n);
  const auto dz = static_cast<Eigen::Index>(config.latent_dim);
  std::vector<std::size_t> order(n);
  std::vector<LabeledDecision> batch;
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    auto shuffle_rng = shuffle_root.derive(epoch);
    auto eps_rng = eps_root.derive(epoch);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.below(i)]);

    double loss_sum = 0.0, rec_sum = 0.0, kl_sum = 0.0;
    for (std::size_t start = 0; start < n; start += bs) {
      const std::size_t end = std::min(n, start + bs);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(items[order[i]]);
      Matrix eps(dz, static_cast<Eigen::Index>(batch.size()));
      for (Eigen::Index j = 0; j < eps.cols(); ++j) {
        for (Eigen::Index k = 0; k < dz; ++k) eps(k, j) = eps_rng.normal();
      }
      zero(grad.encoder);
      zero(grad.decoder);
      const LossTerms terms = elbo_loss(model, batch, eps, weights, &grad);
      if (!std::isfinite(terms.loss)) {
        throw Error(Errc::DivergedTraining, "non-finite loss at epoch " + std::to_string(epoch));
      }
      ++step;
      adam_step(model.encoder.layers, grad.encoder, enc_state, config.learning_rate, step);
      adam_step(model.decoder.layers, grad.decoder, dec_state, config.learning_rate, step);
      const auto cnt = static_cast<double>(batch.size());
      loss_sum += terms.loss * cnt;
      rec_sum += terms.reconstruction * cnt;
      kl_sum += terms.kl * cnt;
    }
    const auto dn = static_cast<double>(n);
    report.elbo.push_back(-loss_sum / dn);
    report.reconstruction.push_back(rec_sum / dn);
    report.kl.push_back(kl_sum / dn);
  }
  return {std::move(model), std::move(report)};
}

std::vector<LatentPoint> sample_from_posteriors(std::span<const LatentGaussian> posteriors,
                                                std::size_t count, RngStream& rng,
                                                double noise_scale) {
  if (posteriors.empty()) throw Error(Errc::EmptyFeasibleSet, "no feasible posteriors to sample");
  std::vector<LatentPoint> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto& g = posteriors[rng.below(posteriors.size())];
    Vector eps(g.mean.size());
    for (Eigen::Index i = 0; i < eps.size(); ++i) eps[i] = noise_scale * rng.normal();
    out.push_back(reparameterize(g, eps));
  }
  return out;
}

std::vector<LatentPoint> sample_feasible_latents(const CvaeModel& model,
                                                 std::span<const Decision> feasible,
                                                 std::size_t count, RngStream& rng,
                                                 double noise_scale) {
  if (feasible.empty()) throw Error(Errc::EmptyFeasibleSet, "sample_feasible_latents: empty pool");
  Matrix xs(static_cast<Eigen::Index>(model.data_dim), static_cast<Eigen::Index>(feasible.size()));
  for (std::size_t i = 0; i < feasible.size(); ++i) {
    require_dim(static_cast<std::size_t>(feasible[i].size()), model.data_dim,
                "sample_feasible_latents");
    xs.col(static_cast<Eigen::Index>(i)) = feasible[i];
  }
  const auto [means, log_vars] = encode_batch(model, xs, true);
  std::vector<LatentGaussian> post;
  post.reserve(feasible.size());
  for (Eigen::Index j = 0; j < means.cols(); ++j) post.push_back({means.col(j), log_vars.col(j)});
  return sample_from_posteriors(post, count, rng, noise_scale);
}

namespace {

nlohmann::json layers_to_json(const Mlp& net) {
  auto out = nlohmann::json::array();
  for (const auto& l : net.layers) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < l.weight.rows(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(l.weight.cols()) + 1);
      for (Eigen::Index j = 0; j < l.weight.cols(); ++j) row[static_cast<std::size_t>(j)] = l.weight(i, j);
      row.back() = l.bias[i];
      rows.push_back(std::move(row));
    }
    out.push_back(std::move(rows));
  }
  return out;
}

void layers_from_json(const nlohmann::json& j, Mlp& net) {
  if (j.size() != net.layers.size()) throw Error(Errc::InvalidConfig, "model: layer count mismatch");
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto& layer = net.layers[l];
    const auto& rows = j[l];
    if (rows.size() != static_cast<std::size_t>(layer.weight.rows())) {
      throw Error(Errc::InvalidConfig, "model: layer shape mismatch");
    }
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
      const auto row = rows[static_cast<std::size_t>(i)].get<std::vector<double>>();
      if (row.size() != static_cast<std::size_t>(layer.weight.cols()) + 1) {
        throw Error(Errc::InvalidConfig, "model: layer shape mismatch");
      }
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(i, c) = row[static_cast<std::size_t>(c)];
      layer.bias[i] = row.back();
    }
  }
}

}  // namespace

std::string model_to_json(const CvaeModel& model) {
  const auto& c = model.config;
  nlohmann::json cfg = {
      {"latent_dim", c.latent_dim},
      {"encoder_hidden", c.resolved_encoder_hidden()},
      {"decoder_hidden", c.resolved_decoder_hidden()},
      {"epochs", c.epochs},
      {"batch_size", c.batch_size},
      {"learning_rate", c.learning_rate},
      {"kl_weight", c.kl_weight},
      {"feasible_weight", c.feasible_weight},
      {"reconstruction", c.reconstruction == Reconstruction::bernoulli ? "bernoulli" : "squared_error"},
      {"conditional", c.conditional},
      {"seed", c.seed},
      {"data_dim", model.data_dim},
  };
  cfg["infeasible_weight"] = c.infeasible_weight ? nlohmann::json(*c.infeasible_weight) : nlohmann::json(nullptr);
  nlohmann::json doc = {{"version", 1},
                        {"config", cfg},
                        {"phi", layers_to_json(model.encoder)},
                        {"theta", layers_to_json(model.decoder)}};
  return doc.dump();
}

CvaeModel model_from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.at("version").get<int>() != 1) throw Error(Errc::InvalidConfig, "model: unsupported version");
    const auto& j = doc.at("config");
    CvaeConfig c;
    c.latent_dim = j.at("latent_dim").get<std::size_t>();
    c.encoder_hidden = j.at("encoder_hidden").get<std::vector<std::size_t>>();
    c.decoder_hidden = j.at("decoder_hidden").get<std::vector<std::size_t>>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.kl_weight = j.at("kl_weight").get<double>();
    c.feasible_weight = j.at("feasible_weight").get<double>();
    if (!j.at("infeasible_weight").is_null()) c.infeasible_weight = j.at("infeasible_weight").get<double>();
    c.reconstruction = j.at("reconstruction").get<std::string>() == "bernoulli"
                           ? Reconstruction::bernoulli
                           : Reconstruction::squared_error;
    c.conditional = j.at("conditional").get<bool>();
    c.seed = j.at("seed").get<std::uint64_t>();
    CvaeModel model = init_model(j.at("data_dim").get<std::size_t>(), c);
    layers_from_json(doc.at("phi"), model.encoder);
    layers_from_json(doc.at("theta"), model.decoder);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("model: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const CvaeModel& model) {
  write_file(path, model_to_json(model) + "\n");
}

CvaeModel load_model(const std::filesystem::path& path) { return model_from_json(read_file(path)); }

}  // namespace cagebo
