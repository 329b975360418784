#pragma once

// Convolutional autoencoder over fixed-length token-index sequences.
//
//   tokens -> embedding -> Conv1D (same padding, ReLU) -> MaxPool1D(pool)
//          = bottleneck (ceil(L/pool) × C)
//   bottleneck -> Conv1D deconvolution (ReLU) -> UpSampling1D(up), crop to L
//          -> per-position dense C→V -> sigmoid

#include <algorithm>
#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "doconto/encoder/losses.hpp"
#include "doconto/encoder/tensor.hpp"
#include "doconto/encoder/vocabulary.hpp"
#include "doconto/errors.hpp"

namespace doconto {

struct CaeShape {
  std::size_t vocab = 0;
  std::size_t embed = 100;
  std::size_t length = 15;
  std::size_t channels = 64;
  std::size_t width = 3;  // odd
  std::size_t pool = 2;
  std::size_t upsample = 2;

  std::size_t pooled_length() const { return (length + pool - 1) / pool; }
  std::size_t bottleneck_size() const { return pooled_length() * channels; }

  void validate() const {
    if (vocab < 2 || embed < 1 || length < 1 || channels < 1 || pool < 1 || upsample < 1)
      throw ParameterError("invalid CAE shape");
    if (width % 2 == 0) throw ParameterError("CAE filter width must be odd");
    if (pooled_length() * upsample < length)
      throw ParameterError("CAE upsampling factor too small to restore the input length");
  }

  bool operator==(const CaeShape&) const = default;
};

struct CaeParameters {
  CaeShape shape;

  Tensor embedding;  // V × E
  Tensor conv_w;     // (width·E) × C, row index = tap·E + e
  Tensor conv_b;     // 1 × C
  Tensor deconv_w;   // (width·C) × C
  Tensor deconv_b;   // 1 × C
  Tensor out_w;      // (width·C) × V, same-padded Conv1D over the upsampled sequence
  Tensor out_b;      // 1 × V

  static CaeParameters zeros(const CaeShape& s) {
    s.validate();
    CaeParameters p;
    p.shape = s;
    p.embedding = Tensor(s.vocab, s.embed);
    p.conv_w = Tensor(s.width * s.embed, s.channels);
    p.conv_b = Tensor(1, s.channels);
    p.deconv_w = Tensor(s.width * s.channels, s.channels);
    p.deconv_b = Tensor(1, s.channels);
    p.out_w = Tensor(s.width * s.channels, s.vocab);
    p.out_b = Tensor(1, s.vocab);
    return p;
  }

  template <class Rng>
  static CaeParameters initialize(const CaeShape& s, Rng& rng) {
    CaeParameters p = zeros(s);
    uniform_init(p.embedding, 0.05, rng);
    glorot_uniform(p.conv_w, s.width * s.embed, s.width * s.channels, rng);
    glorot_uniform(p.deconv_w, s.width * s.channels, s.width * s.channels, rng);
    glorot_uniform(p.out_w, s.width * s.channels, s.width * s.vocab, rng);
    return p;
  }

  std::vector<std::pair<std::string_view, Tensor*>> tensors() {
    return {{"embedding", &embedding}, {"conv_w", &conv_w}, {"conv_b", &conv_b}, {"deconv_w", &deconv_w},
            {"deconv_b", &deconv_b},   {"out_w", &out_w},   {"out_b", &out_b}};
  }
  std::vector<std::pair<std::string_view, const Tensor*>> tensors() const {
    auto ts = const_cast<CaeParameters*>(this)->tensors();
    return {ts.begin(), ts.end()};
  }

  bool operator==(const CaeParameters&) const = default;
};

struct CaeForwardOutput {
  Tensor embedded;        // L × E
  Tensor conv;            // L × C, post-ReLU
  Tensor pooled;          // Lp × C  (bottleneck)
  std::vector<std::size_t> pool_argmax;  // Lp·C, source row in conv
  Tensor deconv;          // Lp × C, post-ReLU
  Tensor upsampled;       // L × C
  Tensor reconstruction;  // L × V, clamped into (0, 1)
};

namespace detail {

// Same-padded 1-D convolution: out(t, c) += Σ_k Σ_i in(t + k - w/2, i) · w(k·I + i, c)
inline void conv1d_same(const Tensor& in, const Tensor& w, std::size_t width, Tensor& out) {
  const std::size_t half = width / 2;
  const std::size_t in_ch = in.cols;
  for (std::size_t t = 0; t < in.rows; ++t) {
    for (std::size_t k = 0; k < width; ++k) {
      const long src = static_cast<long>(t + k) - static_cast<long>(half);
      if (src < 0 || src >= static_cast<long>(in.rows)) continue;
      const auto x = in.row(static_cast<std::size_t>(src));
      for (std::size_t i = 0; i < in_ch; ++i) {
        const double a = x[i];
        if (a == 0.0) continue;
        const double* wr = w.data.data() + (k * in_ch + i) * w.cols;
        auto o = out.row(t);
        for (std::size_t c = 0; c < w.cols; ++c) o[c] += a * wr[c];
      }
    }
  }
}

// Gradients of conv1d_same given g_out (already masked by the activation).
inline void conv1d_same_backward(const Tensor& in, const Tensor& w, std::size_t width, const Tensor& g_out,
                                 Tensor& g_w, Tensor* g_in) {
  const std::size_t half = width / 2;
  const std::size_t in_ch = in.cols;
  for (std::size_t t = 0; t < in.rows; ++t) {
    const auto g = g_out.row(t);
    for (std::size_t k = 0; k < width; ++k) {
      const long src = static_cast<long>(t + k) - static_cast<long>(half);
      if (src < 0 || src >= static_cast<long>(in.rows)) continue;
      const auto x = in.row(static_cast<std::size_t>(src));
      for (std::size_t i = 0; i < in_ch; ++i) {
        const std::size_t r = k * in_ch + i;
        double* gw = g_w.data.data() + r * g_w.cols;
        const double* wr = w.data.data() + r * w.cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < g_out.cols; ++c) {
          gw[c] += x[i] * g[c];
          acc += wr[c] * g[c];
        }
        if (g_in) (*g_in)(static_cast<std::size_t>(src), i) += acc;
      }
    }
  }
}

inline void add_bias_relu(Tensor& t, const Tensor& b) {
  for (std::size_t r = 0; r < t.rows; ++r) {
    auto row = t.row(r);
    for (std::size_t c = 0; c < t.cols; ++c) {
      const double v = row[c] + b.data[c];
      row[c] = v > 0.0 ? v : 0.0;
    }
  }
}

inline void check_cae_input(const CaeShape& s, const EncodedHeader& x) {
  if (x.indices.size() != s.length) throw ParameterError("encoded header length does not match model length");
  for (TokenIndex t : x.indices)
    if (t >= s.vocab) throw ParameterError("token index out of vocabulary range");
}

}  // namespace detail

inline void cae_encode(const CaeParameters& p, const EncodedHeader& x, CaeForwardOutput& out) {
  const auto& s = p.shape;
  detail::check_cae_input(s, x);
  out.embedded = Tensor(s.length, s.embed);
  for (std::size_t l = 0; l < s.length; ++l) {
    const auto row = p.embedding.row(x.indices[l]);
    std::copy(row.begin(), row.end(), out.embedded.row(l).begin());
  }
  out.conv = Tensor(s.length, s.channels);
  detail::conv1d_same(out.embedded, p.conv_w, s.width, out.conv);
  detail::add_bias_relu(out.conv, p.conv_b);
  require_finite(out.conv.data, "conv1d");

  const std::size_t lp = s.pooled_length();
  out.pooled = Tensor(lp, s.channels);
  out.pool_argmax.assign(lp * s.channels, 0);
  for (std::size_t i = 0; i < lp; ++i) {
    const std::size_t lo = i * s.pool;
    const std::size_t hi = std::min(lo + s.pool, s.length);
    for (std::size_t c = 0; c < s.channels; ++c) {
      std::size_t best = lo;
      for (std::size_t t = lo + 1; t < hi; ++t)
        if (out.conv(t, c) > out.conv(best, c)) best = t;
      out.pooled(i, c) = out.conv(best, c);
      out.pool_argmax[i * s.channels + c] = best;
    }
  }
}

inline CaeForwardOutput cae_forward(const CaeParameters& p, const EncodedHeader& x) {
  const auto& s = p.shape;
  CaeForwardOutput out;
  cae_encode(p, x, out);

  out.deconv = Tensor(s.pooled_length(), s.channels);
  detail::conv1d_same(out.pooled, p.deconv_w, s.width, out.deconv);
  detail::add_bias_relu(out.deconv, p.deconv_b);
  require_finite(out.deconv.data, "deconv1d");

  out.upsampled = Tensor(s.length, s.channels);
  for (std::size_t l = 0; l < s.length; ++l) {
    const auto src = out.deconv.row(l / s.upsample);
    std::copy(src.begin(), src.end(), out.upsampled.row(l).begin());
  }

  out.reconstruction = Tensor(s.length, s.vocab);
  for (std::size_t l = 0; l < s.length; ++l) {
    auto o = out.reconstruction.row(l);
    std::copy(p.out_b.data.begin(), p.out_b.data.end(), o.begin());
  }
  detail::conv1d_same(out.upsampled, p.out_w, s.width, out.reconstruction);
  require_finite(out.reconstruction.data, "decoder_output");
  for (double& v : out.reconstruction.data) v = clamp_probability(sigmoid(v));
  return out;
}

inline double cae_loss(const CaeForwardOutput& out, const EncodedHeader& target) {
  if (target.indices.size() != out.reconstruction.rows) throw ParameterError("target length mismatch");
  return bce_one_hot(out.reconstruction, target);
}

inline void cae_backward(const CaeParameters& p, const EncodedHeader& x, const CaeForwardOutput& fwd,
                         CaeParameters& grad) {
  const auto& s = p.shape;
  const std::size_t lp = s.pooled_length();

  Tensor g_logit(s.length, s.vocab);
  bce_one_hot_logit_grad(fwd.reconstruction, x, g_logit.data);

  Tensor g_up(s.length, s.channels);
  detail::conv1d_same_backward(fwd.upsampled, p.out_w, s.width, g_logit, grad.out_w, &g_up);
  for (std::size_t l = 0; l < s.length; ++l)
    for (std::size_t v = 0; v < s.vocab; ++v) grad.out_b.data[v] += g_logit(l, v);

  Tensor g_deconv(lp, s.channels);
  for (std::size_t l = 0; l < s.length; ++l) {
    auto dst = g_deconv.row(l / s.upsample);
    const auto src = g_up.row(l);
    for (std::size_t c = 0; c < s.channels; ++c) dst[c] += src[c];
  }
  for (std::size_t i = 0; i < g_deconv.size(); ++i)
    if (fwd.deconv.data[i] <= 0.0) g_deconv.data[i] = 0.0;
  for (std::size_t i = 0; i < lp; ++i)
    for (std::size_t c = 0; c < s.channels; ++c) grad.deconv_b.data[c] += g_deconv(i, c);

  Tensor g_pooled(lp, s.channels);
  detail::conv1d_same_backward(fwd.pooled, p.deconv_w, s.width, g_deconv, grad.deconv_w, &g_pooled);

  Tensor g_conv(s.length, s.channels);
  for (std::size_t i = 0; i < lp; ++i)
    for (std::size_t c = 0; c < s.channels; ++c) g_conv(fwd.pool_argmax[i * s.channels + c], c) += g_pooled(i, c);
  for (std::size_t i = 0; i < g_conv.size(); ++i)
    if (fwd.conv.data[i] <= 0.0) g_conv.data[i] = 0.0;
  for (std::size_t t = 0; t < s.length; ++t)
    for (std::size_t c = 0; c < s.channels; ++c) grad.conv_b.data[c] += g_conv(t, c);

  Tensor g_emb(s.length, s.embed);
  detail::conv1d_same_backward(fwd.embedded, p.conv_w, s.width, g_conv, grad.conv_w, &g_emb);
  for (std::size_t l = 0; l < s.length; ++l) {
    auto row = grad.embedding.row(x.indices[l]);
    const auto g = g_emb.row(l);
    for (std::size_t e = 0; e < s.embed; ++e) row[e] += g[e];
  }
}

// Bottleneck activations flattened position-major (Lp·C values).
inline std::vector<double> cae_embed(const CaeParameters& p, const EncodedHeader& x) {
  CaeForwardOutput out;
  cae_encode(p, x, out);
  return out.pooled.data;
}

}  // namespace doconto
