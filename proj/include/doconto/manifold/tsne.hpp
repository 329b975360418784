#pragma once

// Exact O(n^2) t-SNE: per-point Gaussian bandwidths from a perplexity
// bisection, symmetrized joint probabilities, Student-t similarities in the
// output space, and gradient descent with momentum and per-coordinate gains.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "doconto/encoder/embedding.hpp"
#include "doconto/encoder/tensor.hpp"
#include "doconto/errors.hpp"
#include "doconto/util/numfmt.hpp"

namespace doconto {

struct TsneOptions {
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  double learning_rate = 200.0;
  double exaggeration = 12.0;
  std::size_t exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  std::size_t momentum_switch = 250;
  double init_sd = 1e-4;
  double perplexity_tolerance = 1e-5;
  std::size_t max_bisection_steps = 50;
  std::uint64_t seed = 7;
  bool record_kl = false;  // KL after every iteration (O(n^2) each)
};

// n × 2 output coordinates, row-aligned with the source labels.
struct LowDimEmbedding {
  std::vector<std::string> labels;
  Tensor points;

  std::size_t size() const { return labels.size(); }

  bool operator==(const LowDimEmbedding&) const = default;
};

struct TsneResult {
  LowDimEmbedding embedding;
  std::vector<double> achieved_perplexity;  // per input row
  double post_exaggeration_kl = 0.0;        // KL(P||Q) after the first unexaggerated iteration
  double final_kl = 0.0;
  std::vector<double> kl_history;  // only when record_kl; entry t is after iteration t+1
};

inline Tensor squared_distances(const Tensor& x) {
  const std::size_t n = x.rows;
  Tensor d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = x.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto b = x.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < x.cols; ++k) {
        const double diff = a[k] - b[k];
        s += diff * diff;
      }
      d(i, j) = s;
      d(j, i) = s;
    }
  }
  return d;
}

struct ConditionalAffinities {
  Tensor p;  // row i is p_{j|i}; diagonal zero
  std::vector<double> perplexity;
};

// Bisection on the Gaussian precision of each row until the row's perplexity
// exp(H) is within `tolerance` of the target or `max_steps` is reached.
inline ConditionalAffinities conditional_affinities(const Tensor& sq_dist, double perplexity, double tolerance,
                                                    std::size_t max_steps) {
  const std::size_t n = sq_dist.rows;
  ConditionalAffinities out{Tensor(n, n), std::vector<double>(n, 0.0)};
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) d_min = std::min(d_min, sq_dist(i, j));

    double beta = 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double achieved = 0.0;
    auto evaluate = [&](double b) {
      double sum = 0.0, weighted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
          row[j] = 0.0;
          continue;
        }
        const double shifted = sq_dist(i, j) - d_min;
        row[j] = std::exp(-b * shifted);
        sum += row[j];
        weighted += shifted * row[j];
      }
      for (double& v : row) v /= sum;
      return std::exp(std::log(sum) + b * weighted / sum);
    };

    for (std::size_t step = 0; step < max_steps; ++step) {
      achieved = evaluate(beta);
      const double diff = achieved - perplexity;
      if (std::abs(diff) < tolerance) break;
      if (diff > 0) {  // too flat: sharpen
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    achieved = evaluate(beta);
    std::copy(row.begin(), row.end(), out.p.row(i).begin());
    out.perplexity[i] = achieved;
  }
  return out;
}

// p_ij = (p_{j|i} + p_{i|j}) / 2n
inline Tensor joint_probabilities(const Tensor& conditional) {
  const std::size_t n = conditional.rows;
  Tensor p(n, n);
  const double denom = 2.0 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p(i, j) = (conditional(i, j) + conditional(j, i)) / denom;
  return p;
}

// Unnormalized Student-t kernel; returns the normalizer Σ_{i≠j} num_ij.
inline double student_kernel(const Tensor& y, Tensor& num) {
  const std::size_t n = y.rows;
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num(i, i) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = y(i, 0) - y(j, 0);
      const double dy = y(i, 1) - y(j, 1);
      const double v = 1.0 / (1.0 + dx * dx + dy * dy);
      num(i, j) = v;
      num(j, i) = v;
      z += 2.0 * v;
    }
  }
  return z;
}

inline double kl_divergence(const Tensor& p, const Tensor& y) {
  Tensor num(y.rows, y.rows);
  const double z = student_kernel(y, num);
  double kl = 0.0;
  for (std::size_t i = 0; i < p.rows; ++i)
    for (std::size_t j = 0; j < p.cols; ++j) {
      if (i == j || p(i, j) <= 0.0) continue;
      const double q = std::max(num(i, j) / z, std::numeric_limits<double>::min());
      kl += p(i, j) * std::log(p(i, j) / q);
    }
  return kl;
}

inline TsneResult tsne(const EmbeddingMatrix& em, const TsneOptions& opt) {
  const std::size_t n = em.size();
  if (n < 4) throw ParameterError("t-SNE needs at least 4 points");
  if (!(opt.perplexity > 0.0) || !(3.0 * opt.perplexity < static_cast<double>(n - 1)))
    throw ParameterError("perplexity must satisfy 0 < perplexity < (n - 1) / 3");
  if (opt.iterations < 1) throw ParameterError("t-SNE needs at least one iteration");

  const Tensor dist = squared_distances(em.rows);
  ConditionalAffinities cond = conditional_affinities(dist, opt.perplexity, opt.perplexity_tolerance,
                                                      opt.max_bisection_steps);
  const Tensor p = joint_probabilities(cond.p);

  TsneResult result;
  result.achieved_perplexity = std::move(cond.perplexity);
  Tensor& y = result.embedding.points;
  y = Tensor(n, 2);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, opt.init_sd);
  for (double& v : y.data) v = normal(rng);

  Tensor num(n, n);
  Tensor grad(n, 2);
  Tensor velocity(n, 2);
  Tensor gains(n, 2, 1.0);

  for (std::size_t iter = 0; iter < opt.iterations; ++iter) {
    const double exaggeration = iter < opt.exaggeration_iterations ? opt.exaggeration : 1.0;
    const double momentum = iter < opt.momentum_switch ? opt.initial_momentum : opt.final_momentum;

    const double z = student_kernel(y, num);
    grad.zero();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double mult = (exaggeration * p(i, j) - num(i, j) / z) * num(i, j);
        grad(i, 0) += 4.0 * mult * (y(i, 0) - y(j, 0));
        grad(i, 1) += 4.0 * mult * (y(i, 1) - y(j, 1));
      }
    }
    if (!all_finite(grad.data)) throw NumericError("t-SNE gradient is non-finite at iteration " + std::to_string(iter + 1));

    for (std::size_t k = 0; k < y.size(); ++k) {
      const bool same_sign = (grad.data[k] > 0.0) == (velocity.data[k] > 0.0);
      gains.data[k] = same_sign ? gains.data[k] * 0.8 : gains.data[k] + 0.2;
      gains.data[k] = std::max(gains.data[k], 0.01);
      velocity.data[k] = momentum * velocity.data[k] - opt.learning_rate * gains.data[k] * grad.data[k];
      y.data[k] += velocity.data[k];
    }
    for (std::size_t c = 0; c < 2; ++c) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += y(i, c);
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) y(i, c) -= mean;
    }

    if (opt.record_kl) result.kl_history.push_back(kl_divergence(p, y));
    if (iter == opt.exaggeration_iterations)
      result.post_exaggeration_kl = opt.record_kl ? result.kl_history.back() : kl_divergence(p, y);
  }
  if (opt.exaggeration_iterations >= opt.iterations)
    result.post_exaggeration_kl = std::numeric_limits<double>::quiet_NaN();
  result.final_kl = opt.record_kl ? result.kl_history.back() : kl_divergence(p, y);
  result.embedding.labels = em.labels;
  return result;
}

inline void write_lowdim_tsv(std::ostream& os, const LowDimEmbedding& e) {
  for (std::size_t i = 0; i < e.size(); ++i)
    os << e.labels[i] << '\t' << util::format_double(e.points(i, 0)) << '\t' << util::format_double(e.points(i, 1))
       << '\n';
}

inline LowDimEmbedding read_lowdim_tsv(std::istream& is) {
  EmbeddingMatrix m = read_embedding_tsv(is);
  if (m.size() > 0 && m.dim() != 2) throw DataError("low-dimensional embedding must have 2 columns");
  return {std::move(m.labels), std::move(m.rows)};
}

}  // namespace doconto
