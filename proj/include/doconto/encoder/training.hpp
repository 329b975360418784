#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "doconto/encoder/cae.hpp"
#include "doconto/encoder/optimizer.hpp"
#include "doconto/encoder/vae.hpp"
#include "doconto/errors.hpp"

namespace doconto {

struct TrainConfig {
  std::size_t length = 15;
  std::size_t embed = 100;
  std::size_t hidden = 100;
  std::size_t latent = 32;
  std::size_t batch_size = 64;
  std::size_t epochs = 1000;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::rmsprop;
  std::uint64_t seed = 7;
  double validation_fraction = 0.1;
  double epsilon_std = 1.0;

  // CAE only.
  std::size_t channels = 64;
  std::size_t width = 3;
  std::size_t pool = 2;
  std::size_t upsample = 2;

  static TrainConfig vae_defaults() { return {}; }

  static TrainConfig cae_defaults() {
    TrainConfig c;
    c.optimizer = OptimizerKind::adam;
    return c;
  }

  void validate() const {
    if (length < 1 || embed < 1 || hidden < 1 || latent < 1 || batch_size < 1 || epochs < 1)
      throw ParameterError("training sizes must be positive");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ParameterError("learning rate must be >= 0");
    if (!(validation_fraction > 0.0 && validation_fraction <= 0.5))
      throw ParameterError("validation fraction must be in (0, 0.5]");
    if (!(epsilon_std > 0.0)) throw ParameterError("epsilon_std must be positive");
  }
};

// Mean per-example loss over the train and validation splits, measured
// after each epoch in evaluation mode (VAE noise fixed at zero).
struct EpochLoss {
  std::size_t epoch = 0;  // 1-based
  double train_total = 0.0;
  double val_total = 0.0;

  bool operator==(const EpochLoss&) const = default;
};

template <class Params>
struct TrainResult {
  Params params;
  std::vector<EpochLoss> history;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> val_rows;
};

struct DataSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Seeded shuffle; the last ceil(n * fraction) rows are held out.
template <class Rng>
DataSplit split_rows(std::size_t n, double fraction, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_val = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * fraction));
  if (n_val >= n) throw ParameterError("corpus too small to hold out a validation split");
  DataSplit s;
  s.train.assign(order.begin(), order.end() - static_cast<long>(n_val));
  s.validation.assign(order.end() - static_cast<long>(n_val), order.end());
  return s;
}

struct VaeModel {
  using Params = VaeParameters;

  template <class Rng>
  static Params init(const TrainConfig& c, std::size_t vocab, Rng& rng) {
    return VaeParameters::initialize({vocab, c.embed, c.hidden, c.latent, c.length}, rng, c.epsilon_std);
  }

  template <class Rng>
  static double accumulate(const Params& p, const EncodedHeader& x, Rng& rng, Params& grad) {
    std::vector<double> eps(p.shape.latent);
    std::normal_distribution<double> dist(0.0, p.epsilon_std);
    for (double& e : eps) e = dist(rng);
    auto fwd = vae_forward(p, x, eps);
    const double loss = vae_loss(fwd, x).total;
    vae_backward(p, x, eps, fwd, grad);
    return loss;
  }

  static double evaluate(const Params& p, const EncodedHeader& x) {
    const std::vector<double> eps(p.shape.latent, 0.0);
    return vae_loss(vae_forward(p, x, eps), x).total;
  }
};

struct CaeModel {
  using Params = CaeParameters;

  template <class Rng>
  static Params init(const TrainConfig& c, std::size_t vocab, Rng& rng) {
    return CaeParameters::initialize({vocab, c.embed, c.length, c.channels, c.width, c.pool, c.upsample}, rng);
  }

  template <class Rng>
  static double accumulate(const Params& p, const EncodedHeader& x, Rng&, Params& grad) {
    auto fwd = cae_forward(p, x);
    const double loss = cae_loss(fwd, x);
    cae_backward(p, x, fwd, grad);
    return loss;
  }

  static double evaluate(const Params& p, const EncodedHeader& x) { return cae_loss(cae_forward(p, x), x); }
};

template <class Model>
double mean_loss(const typename Model::Params& p, std::span<const EncodedHeader> corpus,
                 std::span<const std::size_t> rows) {
  double s = 0.0;
  for (std::size_t r : rows) s += Model::evaluate(p, corpus[r]);
  return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
}

// Minibatch training with batch-mean gradients. Deterministic for a fixed
// seed: one generator drives the split, initialization, epoch shuffles and
// noise draws in that order.
template <class Model>
TrainResult<typename Model::Params> train_model(std::span<const EncodedHeader> corpus, std::size_t vocab_size,
                                                const TrainConfig& cfg) {
  using Params = typename Model::Params;
  cfg.validate();
  if (corpus.empty()) throw ParameterError("training corpus is empty");

  std::mt19937_64 rng(cfg.seed);
  DataSplit split = split_rows(corpus.size(), cfg.validation_fraction, rng);

  TrainResult<Params> result{Model::init(cfg, vocab_size, rng), {}, split.train, split.validation};
  Params& params = result.params;
  Params grad = params;
  OptimizerSettings os;
  os.kind = cfg.optimizer;
  os.learning_rate = cfg.learning_rate;
  Optimizer opt(os, params);

  std::vector<std::size_t> order = split.train;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_no) {
      const std::size_t end = std::min(start + cfg.batch_size, order.size());
      for (auto& [name, t] : grad.tensors()) t->zero();
      double batch_loss = 0.0;
      try {
        for (std::size_t i = start; i < end; ++i) batch_loss += Model::accumulate(params, corpus[order[i]], rng, grad);
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_no) + ": " + e.what());
      }
      if (!std::isfinite(batch_loss))
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_no) + ": non-finite loss");
      const double scale = 1.0 / static_cast<double>(end - start);
      for (auto& [name, t] : grad.tensors())
        for (double& g : t->data) g *= scale;
      opt.step(params, grad);
    }
    EpochLoss rec{epoch, mean_loss<Model>(params, corpus, split.train), mean_loss<Model>(params, corpus, split.validation)};
    if (!std::isfinite(rec.train_total) || !std::isfinite(rec.val_total))
      throw NumericError("training diverged at epoch " + std::to_string(epoch) + ": non-finite evaluation loss");
    result.history.push_back(rec);
  }
  return result;
}

inline TrainResult<VaeParameters> train_vae(std::span<const EncodedHeader> corpus, std::size_t vocab_size,
                                            const TrainConfig& cfg) {
  return train_model<VaeModel>(corpus, vocab_size, cfg);
}

inline TrainResult<CaeParameters> train_cae(std::span<const EncodedHeader> corpus, std::size_t vocab_size,
                                            const TrainConfig& cfg) {
  return train_model<CaeModel>(corpus, vocab_size, cfg);
}

}  // namespace doconto
