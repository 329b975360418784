#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "doconto/encoder/tensor.hpp"
#include "doconto/errors.hpp"

namespace doconto {

struct ClusterAssignment {
  std::vector<std::size_t> labels;  // cluster id per point, in [0, k)
  Tensor centroids;                 // k × D
  double inertia = 0.0;
  std::vector<std::size_t> reseeded;       // clusters that went empty and were reseeded
  std::vector<double> inertia_history;     // after every Lloyd iteration
  std::size_t iterations = 0;

  std::size_t k() const { return centroids.rows; }
};

namespace detail {

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// k-means++: first center uniform, then proportional to squared distance to
// the nearest chosen center.
template <class Rng>
Tensor kmeanspp_seed(const Tensor& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.rows;
  Tensor centers(k, points.cols);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::size_t first = pick(rng);
  std::copy(points.row(first).begin(), points.row(first).end(), centers.row(0).begin());
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(points.row(i), centers.row(0));

  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t chosen = 0;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double acc = 0.0;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          chosen = i;
          break;
        }
      }
      while (d2[chosen] == 0.0) --chosen;  // only reachable through rounding at the tail
    } else {
      chosen = pick(rng);
    }
    std::copy(points.row(chosen).begin(), points.row(chosen).end(), centers.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(points.row(i), centers.row(c)));
  }
  return centers;
}

inline double assignment_inertia(const Tensor& points, const Tensor& centers, const std::vector<std::size_t>& labels) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.rows; ++i) s += sq_dist(points.row(i), centers.row(labels[i]));
  return s;
}

template <class Rng>
ClusterAssignment lloyd(const Tensor& points, std::size_t k, std::size_t max_iter, Rng& rng) {
  const std::size_t n = points.rows;
  const std::size_t dim = points.cols;
  ClusterAssignment a;
  a.centroids = kmeanspp_seed(points, k, rng);
  a.labels.assign(n, 0);
  std::vector<std::size_t> previous;
  std::vector<std::size_t> sizes(k);

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = sq_dist(points.row(i), a.centroids.row(c));
        if (d < best_d) {  // strict: ties keep the lowest index
          best_d = d;
          best = c;
        }
      }
      a.labels[i] = best;
    }

    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t l : a.labels) ++sizes[l];
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] > 0) continue;
      // Move the point farthest from its centroid (among clusters that keep
      // at least one member) into the empty cluster.
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[a.labels[i]] < 2) continue;
        const double d = sq_dist(points.row(i), a.centroids.row(a.labels[i]));
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      --sizes[a.labels[far]];
      a.labels[far] = c;
      sizes[c] = 1;
      std::copy(points.row(far).begin(), points.row(far).end(), a.centroids.row(c).begin());
      a.reseeded.push_back(c);
    }

    Tensor sums(k, dim);
    for (std::size_t i = 0; i < n; ++i) {
      auto s = sums.row(a.labels[i]);
      const auto p = points.row(i);
      for (std::size_t d = 0; d < dim; ++d) s[d] += p[d];
    }
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t d = 0; d < dim; ++d) a.centroids(c, d) = sums(c, d) / static_cast<double>(sizes[c]);

    a.inertia = assignment_inertia(points, a.centroids, a.labels);
    a.inertia_history.push_back(a.inertia);
    a.iterations = iter + 1;
    if (a.labels == previous) break;
    previous = a.labels;
  }
  return a;
}

}  // namespace detail

// k-means++ seeding followed by Lloyd iterations until the assignment stops
// changing or max_iter is reached. With restarts > 1 the lowest-inertia run
// wins (earliest on ties).
inline ClusterAssignment kmeans(const Tensor& points, std::size_t k, std::uint64_t seed, std::size_t max_iter = 300,
                                std::size_t restarts = 1) {
  if (k < 1 || k > points.rows) throw ParameterError("k-means requires 1 <= k <= n");
  if (max_iter < 1 || restarts < 1) throw ParameterError("k-means needs max_iter >= 1 and restarts >= 1");
  if (!all_finite(points.data)) throw ParameterError("k-means input contains non-finite values");
  std::mt19937_64 rng(seed);
  ClusterAssignment best;
  for (std::size_t r = 0; r < restarts; ++r) {
    ClusterAssignment a = detail::lloyd(points, k, max_iter, rng);
    if (r == 0 || a.inertia < best.inertia) best = std::move(a);
  }
  return best;
}

}  // namespace doconto
