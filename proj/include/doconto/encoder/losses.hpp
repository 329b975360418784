#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "doconto/encoder/tensor.hpp"
#include "doconto/encoder/vocabulary.hpp"

namespace doconto {

inline constexpr double kProbLo = 1e-7;
inline constexpr double kProbHi = 1.0 - 1e-7;

inline double clamp_probability(double p) { return std::clamp(p, kProbLo, kProbHi); }

// Summed binary cross-entropy between an L×V probability matrix and the
// one-hot expansion of the target indices.
inline double bce_one_hot(const Tensor& probs, const EncodedHeader& target) {
  double loss = 0.0;
  for (std::size_t l = 0; l < probs.rows; ++l) {
    const auto row = probs.row(l);
    const TokenIndex y = target.indices[l];
    for (std::size_t v = 0; v < probs.cols; ++v) {
      const double p = clamp_probability(row[v]);
      loss -= (v == y) ? std::log(p) : std::log1p(-p);
    }
  }
  return loss;
}

// d(bce)/d(logit) for sigmoid outputs; zero where the clamp is active.
inline void bce_one_hot_logit_grad(const Tensor& probs, const EncodedHeader& target, std::span<double> out) {
  for (std::size_t l = 0; l < probs.rows; ++l) {
    const TokenIndex y = target.indices[l];
    for (std::size_t v = 0; v < probs.cols; ++v) {
      const double p = probs(l, v);
      const std::size_t k = l * probs.cols + v;
      out[k] = (p <= kProbLo || p >= kProbHi) ? 0.0 : p - (v == y ? 1.0 : 0.0);
    }
  }
}

// KL(N(mu, exp(log_sigma)^2) || N(0, 1)), summed over coordinates.
inline double kl_unit_gaussian(std::span<const double> mu, std::span<const double> log_sigma) {
  // 1 + 2s - e^{2s} written with expm1 so the per-coordinate term stays <= 0.
  double s = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j)
    s += 2.0 * log_sigma[j] - std::expm1(2.0 * log_sigma[j]) - mu[j] * mu[j];
  return -0.5 * s;
}

}  // namespace doconto
