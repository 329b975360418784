#pragma once

// Variational autoencoder over fixed-length token-index sequences.
//
//   tokens -> embedding (ReLU) -> dense hidden (ReLU) -> {mu, log_sigma}
//   z = mu + exp(log_sigma) * eps
//   z -> dense hidden (ReLU) -> dense L*V -> sigmoid
//
// Gradients are written out by hand; tests check them against central
// finite differences.

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "doconto/encoder/losses.hpp"
#include "doconto/encoder/tensor.hpp"
#include "doconto/encoder/vocabulary.hpp"
#include "doconto/errors.hpp"

namespace doconto {

struct VaeShape {
  std::size_t vocab = 0;
  std::size_t embed = 100;
  std::size_t hidden = 100;
  std::size_t latent = 32;
  std::size_t length = 15;

  bool operator==(const VaeShape&) const = default;
};

struct VaeParameters {
  VaeShape shape;
  double epsilon_std = 1.0;

  Tensor embedding;  // V × E
  Tensor enc_w;      // (L·E) × H
  Tensor enc_b;      // 1 × H
  Tensor mu_w;       // H × d
  Tensor mu_b;
  Tensor logsig_w;   // H × d
  Tensor logsig_b;
  Tensor dec_w;      // d × H
  Tensor dec_b;
  Tensor out_w;      // H × (L·V)
  Tensor out_b;

  static VaeParameters zeros(const VaeShape& s, double epsilon_std = 1.0) {
    if (s.vocab < 2 || s.embed < 1 || s.hidden < 1 || s.latent < 1 || s.length < 1)
      throw ParameterError("invalid VAE shape");
    VaeParameters p;
    p.shape = s;
    p.epsilon_std = epsilon_std;
    p.embedding = Tensor(s.vocab, s.embed);
    p.enc_w = Tensor(s.length * s.embed, s.hidden);
    p.enc_b = Tensor(1, s.hidden);
    p.mu_w = Tensor(s.hidden, s.latent);
    p.mu_b = Tensor(1, s.latent);
    p.logsig_w = Tensor(s.hidden, s.latent);
    p.logsig_b = Tensor(1, s.latent);
    p.dec_w = Tensor(s.latent, s.hidden);
    p.dec_b = Tensor(1, s.hidden);
    p.out_w = Tensor(s.hidden, s.length * s.vocab);
    p.out_b = Tensor(1, s.length * s.vocab);
    return p;
  }

  template <class Rng>
  static VaeParameters initialize(const VaeShape& s, Rng& rng, double epsilon_std = 1.0) {
    VaeParameters p = zeros(s, epsilon_std);
    uniform_init(p.embedding, 0.05, rng);
    glorot_uniform(p.enc_w, s.length * s.embed, s.hidden, rng);
    glorot_uniform(p.mu_w, s.hidden, s.latent, rng);
    glorot_uniform(p.logsig_w, s.hidden, s.latent, rng);
    glorot_uniform(p.dec_w, s.latent, s.hidden, rng);
    glorot_uniform(p.out_w, s.hidden, s.length * s.vocab, rng);
    return p;
  }

  std::vector<std::pair<std::string_view, Tensor*>> tensors() {
    return {{"embedding", &embedding}, {"enc_w", &enc_w},       {"enc_b", &enc_b},       {"mu_w", &mu_w},
            {"mu_b", &mu_b},           {"logsig_w", &logsig_w}, {"logsig_b", &logsig_b}, {"dec_w", &dec_w},
            {"dec_b", &dec_b},         {"out_w", &out_w},       {"out_b", &out_b}};
  }
  std::vector<std::pair<std::string_view, const Tensor*>> tensors() const {
    auto ts = const_cast<VaeParameters*>(this)->tensors();
    return {ts.begin(), ts.end()};
  }

  bool operator==(const VaeParameters&) const = default;
};

struct VaeForwardOutput {
  std::vector<double> mu;         // z̄
  std::vector<double> log_sigma;  // z·log σ
  std::vector<double> z;
  Tensor reconstruction;          // L × V, clamped into (0, 1)

  // Cached activations for the backward pass.
  std::vector<double> embedded;    // L·E, post-ReLU
  std::vector<double> hidden;      // H, post-ReLU
  std::vector<double> dec_hidden;  // H, post-ReLU
};

struct VaeLoss {
  double recon = 0.0;
  double kl = 0.0;
  double total = 0.0;
};

namespace detail {

inline void check_input(const VaeShape& s, const EncodedHeader& x) {
  if (x.indices.size() != s.length) throw ParameterError("encoded header length does not match model length");
  for (TokenIndex t : x.indices)
    if (t >= s.vocab) throw ParameterError("token index out of vocabulary range");
}

inline void relu_inplace(std::span<double> xs) {
  for (double& x : xs) x = x > 0.0 ? x : 0.0;
}

inline void relu_mask(std::span<const double> act, std::span<double> grad) {
  for (std::size_t i = 0; i < act.size(); ++i)
    if (act[i] <= 0.0) grad[i] = 0.0;
}

inline void add_to(std::span<const double> g, Tensor& bias) {
  for (std::size_t i = 0; i < g.size(); ++i) bias.data[i] += g[i];
}

}  // namespace detail

// Encoder half only: fills embedded/hidden/mu/log_sigma.
inline void vae_encode(const VaeParameters& p, const EncodedHeader& x, VaeForwardOutput& out) {
  const auto& s = p.shape;
  detail::check_input(s, x);
  out.embedded.assign(s.length * s.embed, 0.0);
  for (std::size_t l = 0; l < s.length; ++l) {
    const auto row = p.embedding.row(x.indices[l]);
    std::copy(row.begin(), row.end(), out.embedded.begin() + l * s.embed);
  }
  detail::relu_inplace(out.embedded);

  out.hidden.assign(p.enc_b.data.begin(), p.enc_b.data.end());
  affine_accumulate(out.embedded, p.enc_w, out.hidden);
  detail::relu_inplace(out.hidden);
  require_finite(out.hidden, "encoder_hidden");

  out.mu.assign(p.mu_b.data.begin(), p.mu_b.data.end());
  affine_accumulate(out.hidden, p.mu_w, out.mu);
  out.log_sigma.assign(p.logsig_b.data.begin(), p.logsig_b.data.end());
  affine_accumulate(out.hidden, p.logsig_w, out.log_sigma);
  require_finite(out.mu, "z_mean");
  require_finite(out.log_sigma, "z_log_sigma");
}

// Full forward pass with an explicit noise vector eps (length d).
inline VaeForwardOutput vae_forward(const VaeParameters& p, const EncodedHeader& x, std::span<const double> eps) {
  const auto& s = p.shape;
  if (eps.size() != s.latent) throw ParameterError("noise vector length does not match latent dimension");
  VaeForwardOutput out;
  vae_encode(p, x, out);

  out.z.resize(s.latent);
  for (std::size_t j = 0; j < s.latent; ++j) out.z[j] = out.mu[j] + std::exp(out.log_sigma[j]) * eps[j];
  require_finite(out.z, "z");

  out.dec_hidden.assign(p.dec_b.data.begin(), p.dec_b.data.end());
  affine_accumulate(out.z, p.dec_w, out.dec_hidden);
  detail::relu_inplace(out.dec_hidden);
  require_finite(out.dec_hidden, "decoder_hidden");

  out.reconstruction = Tensor(s.length, s.vocab);
  auto& logits = out.reconstruction.data;
  std::copy(p.out_b.data.begin(), p.out_b.data.end(), logits.begin());
  affine_accumulate(out.dec_hidden, p.out_w, logits);
  require_finite(logits, "decoder_output");
  for (double& v : logits) v = clamp_probability(sigmoid(v));
  return out;
}

// Draws eps ~ Normal(0, epsilon_std^2), one row per example.
template <class Rng>
Tensor sample_noise(const VaeParameters& p, std::size_t rows, Rng& rng) {
  Tensor eps(rows, p.shape.latent);
  std::normal_distribution<double> dist(0.0, p.epsilon_std);
  for (double& e : eps.data) e = dist(rng);
  return eps;
}

inline std::vector<VaeForwardOutput> vae_forward(const VaeParameters& p, std::span<const EncodedHeader> batch,
                                                 const Tensor& noise) {
  if (noise.rows != batch.size() || noise.cols != p.shape.latent) throw ParameterError("noise matrix shape mismatch");
  std::vector<VaeForwardOutput> outs;
  outs.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) outs.push_back(vae_forward(p, batch[i], noise.row(i)));
  return outs;
}

inline VaeLoss vae_loss(const VaeForwardOutput& out, const EncodedHeader& target) {
  if (target.indices.size() != out.reconstruction.rows) throw ParameterError("target length mismatch");
  VaeLoss l;
  l.recon = bce_one_hot(out.reconstruction, target);
  l.kl = kl_unit_gaussian(out.mu, out.log_sigma);
  l.total = l.recon + l.kl;
  return l;
}

// Accumulates d(total loss)/d(params) for one example into grad.
inline void vae_backward(const VaeParameters& p, const EncodedHeader& x, std::span<const double> eps,
                         const VaeForwardOutput& fwd, VaeParameters& grad) {
  const auto& s = p.shape;

  std::vector<double> g_logit(s.length * s.vocab);
  bce_one_hot_logit_grad(fwd.reconstruction, x, g_logit);
  outer_accumulate(fwd.dec_hidden, g_logit, grad.out_w);
  detail::add_to(g_logit, grad.out_b);

  std::vector<double> g_dec(s.hidden, 0.0);
  backprop_accumulate(p.out_w, g_logit, g_dec);
  detail::relu_mask(fwd.dec_hidden, g_dec);
  outer_accumulate(fwd.z, g_dec, grad.dec_w);
  detail::add_to(g_dec, grad.dec_b);

  std::vector<double> g_z(s.latent, 0.0);
  backprop_accumulate(p.dec_w, g_dec, g_z);

  // The KL term contributes mu to d/dmu and exp(2 log_sigma) - 1 to d/dlog_sigma.
  std::vector<double> g_mu(s.latent), g_ls(s.latent);
  for (std::size_t j = 0; j < s.latent; ++j) {
    const double sigma = std::exp(fwd.log_sigma[j]);
    g_mu[j] = g_z[j] + fwd.mu[j];
    g_ls[j] = g_z[j] * eps[j] * sigma + std::expm1(2.0 * fwd.log_sigma[j]);
  }
  outer_accumulate(fwd.hidden, g_mu, grad.mu_w);
  detail::add_to(g_mu, grad.mu_b);
  outer_accumulate(fwd.hidden, g_ls, grad.logsig_w);
  detail::add_to(g_ls, grad.logsig_b);

  std::vector<double> g_hidden(s.hidden, 0.0);
  backprop_accumulate(p.mu_w, g_mu, g_hidden);
  backprop_accumulate(p.logsig_w, g_ls, g_hidden);
  detail::relu_mask(fwd.hidden, g_hidden);
  outer_accumulate(fwd.embedded, g_hidden, grad.enc_w);
  detail::add_to(g_hidden, grad.enc_b);

  std::vector<double> g_emb(s.length * s.embed, 0.0);
  backprop_accumulate(p.enc_w, g_hidden, g_emb);
  detail::relu_mask(fwd.embedded, g_emb);
  for (std::size_t l = 0; l < s.length; ++l) {
    auto row = grad.embedding.row(x.indices[l]);
    for (std::size_t e = 0; e < s.embed; ++e) row[e] += g_emb[l * s.embed + e];
  }
}

// Noise-free bottleneck: the mean vector z̄.
inline std::vector<double> vae_embed(const VaeParameters& p, const EncodedHeader& x) {
  VaeForwardOutput out;
  vae_encode(p, x, out);
  return out.mu;
}

}  // namespace doconto
