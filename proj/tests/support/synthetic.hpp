#pragma once

// Seeded synthetic inputs: two-topic corpora, point clouds, brute-force
// k-means optimum.

#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "doconto/encoder/tensor.hpp"
#include "doconto/manifold/kmeans.hpp"

namespace doconto::testing {

struct TwoTopicCorpus {
  std::vector<std::string> vocab_a, vocab_b;
  std::vector<std::string> docs;
  std::vector<int> truth;  // 0 → topic A, 1 → topic B
};

// Each doc draws all its words from one of two disjoint vocabularies.
inline TwoTopicCorpus two_topic_corpus(std::uint64_t seed, std::size_t n_docs = 200, std::size_t words = 30,
                                       std::size_t vocab_size = 10) {
  TwoTopicCorpus c;
  for (std::size_t i = 0; i < vocab_size; ++i) {
    c.vocab_a.push_back("alpha" + std::to_string(i));
    c.vocab_b.push_back("beta" + std::to_string(i));
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, vocab_size - 1);
  for (std::size_t d = 0; d < n_docs; ++d) {
    const int t = static_cast<int>(d % 2);
    const auto& v = t == 0 ? c.vocab_a : c.vocab_b;
    std::string text;
    for (std::size_t w = 0; w < words; ++w) text += (w ? " " : "") + v[pick(rng)];
    c.docs.push_back(std::move(text));
    c.truth.push_back(t);
  }
  return c;
}

inline Tensor points(std::initializer_list<std::pair<double, double>> xs) {
  Tensor t(xs.size(), 2);
  std::size_t i = 0;
  for (auto [x, y] : xs) {
    t(i, 0) = x;
    t(i, 1) = y;
    ++i;
  }
  return t;
}

inline Tensor random_points(std::size_t n, std::size_t dim, std::mt19937_64& rng, double scale = 10.0) {
  Tensor t(n, dim);
  std::uniform_real_distribution<double> u(0.0, scale);
  for (double& v : t.data) v = u(rng);
  return t;
}

// Optimal k-means inertia by enumerating every labelling (n ≤ 10, small k).
inline double brute_force_inertia(const Tensor& pts, std::size_t k) {
  const std::size_t n = pts.rows, d = pts.cols;
  std::vector<std::size_t> label(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<double> sum(k * d, 0.0);
    std::vector<std::size_t> size(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++size[label[i]];
      for (std::size_t j = 0; j < d; ++j) sum[label[i] * d + j] += pts(i, j);
    }
    bool all_used = true;
    for (std::size_t c = 0; c < k; ++c) all_used = all_used && size[c] > 0;
    if (all_used) {
      double inertia = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
          const double m = sum[label[i] * d + j] / static_cast<double>(size[label[i]]);
          inertia += (pts(i, j) - m) * (pts(i, j) - m);
        }
      best = std::min(best, inertia);
    }
    std::size_t pos = 0;
    while (pos < n && ++label[pos] == k) label[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

}  // namespace doconto::testing
