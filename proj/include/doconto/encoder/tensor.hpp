#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "doconto/errors.hpp"

namespace doconto {

// Dense row-major matrix of doubles. Vectors are 1×n.
struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  std::size_t size() const { return data.size(); }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
  void zero() { std::fill(data.begin(), data.end(), 0.0); }

  bool operator==(const Tensor&) const = default;
};

inline bool all_finite(std::span<const double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

inline void require_finite(std::span<const double> xs, const std::string& layer) {
  if (!all_finite(xs)) throw NumericError("non-finite activation in layer '" + layer + "'");
}

// Glorot-uniform initialization.
template <class Rng>
void glorot_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& x : t.data) x = dist(rng);
}

template <class Rng>
void uniform_init(Tensor& t, double limit, Rng& rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& x : t.data) x = dist(rng);
}

// out[j] += Σ_i in[i] * w(i, j)
inline void affine_accumulate(std::span<const double> in, const Tensor& w, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double a = in[i];
    if (a == 0.0) continue;
    const double* wr = w.data.data() + i * w.cols;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += a * wr[j];
  }
}

// grad_w(i, j) += in[i] * g[j]
inline void outer_accumulate(std::span<const double> in, std::span<const double> g, Tensor& grad_w) {
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double a = in[i];
    if (a == 0.0) continue;
    double* gr = grad_w.data.data() + i * grad_w.cols;
    for (std::size_t j = 0; j < g.size(); ++j) gr[j] += a * g[j];
  }
}

// out[i] += Σ_j w(i, j) * g[j]
inline void backprop_accumulate(const Tensor& w, std::span<const double> g, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double* wr = w.data.data() + i * w.cols;
    double s = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) s += wr[j] * g[j];
    out[i] += s;
  }
}

inline double sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace doconto
