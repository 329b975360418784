#pragma once

// Automated cluster summaries: frequent member headers, medoids, and
// nearest-centroid concept pairs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "doconto/encoder/embedding.hpp"
#include "doconto/encoder/tensor.hpp"
#include "doconto/errors.hpp"
#include "doconto/headcount.hpp"
#include "doconto/manifold/kmeans.hpp"

namespace doconto {

struct HeaderCount {
  std::string label;
  std::size_t count = 0;

  bool operator==(const HeaderCount&) const = default;
};

struct ClusterSummary {
  std::size_t cluster = 0;
  std::size_t size = 0;
  std::vector<HeaderCount> top_headers;  // (count desc, label asc)
  std::string medoid;

  bool operator==(const ClusterSummary&) const = default;
};

struct ConceptSimilarityPair {
  std::string label_a;  // label_a <= label_b
  std::string label_b;
  double distance = 0.0;
  std::size_t cluster_a = 0;
  std::size_t cluster_b = 0;

  bool operator==(const ConceptSimilarityPair&) const = default;
};

// One summary per nonempty cluster, ordered by cluster id. `points` are the
// coordinates the assignment was computed on.
inline std::vector<ClusterSummary> summarize_clusters(const ClusterAssignment& assign, const Tensor& points,
                                                      std::span<const std::string> labels, const FrequencyTable& freq,
                                                      std::size_t m) {
  if (labels.size() != assign.labels.size() || points.rows != labels.size())
    throw ParameterError("labels, points and assignment must be aligned");
  std::vector<ClusterSummary> out;
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[assign.labels[i]].push_back(i);

  for (const auto& [cluster, rows] : members) {
    ClusterSummary s;
    s.cluster = cluster;
    s.size = rows.size();

    std::set<std::string> distinct;
    for (std::size_t r : rows) distinct.insert(labels[r]);
    for (const auto& l : distinct) s.top_headers.push_back({l, freq.count(l)});
    std::stable_sort(s.top_headers.begin(), s.top_headers.end(), [](const HeaderCount& a, const HeaderCount& b) {
      return a.count != b.count ? a.count > b.count : a.label < b.label;
    });
    if (s.top_headers.size() > m) s.top_headers.resize(m);

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r : rows) {
      const double d = detail::sq_dist(points.row(r), assign.centroids.row(cluster));
      if (d < best || (d == best && labels[r] < s.medoid)) {
        best = d;
        s.medoid = labels[r];
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

// The top_n closest centroid pairs among summarized clusters, labelled by
// medoid, sorted by (distance, label_a, label_b).
inline std::vector<ConceptSimilarityPair> similar_concepts(std::span<const ClusterSummary> summaries,
                                                           const Tensor& centroids, std::size_t top_n) {
  if (summaries.size() < 2) throw ParameterError("similar_concepts needs at least two clusters");
  std::vector<ConceptSimilarityPair> pairs;
  for (std::size_t a = 0; a < summaries.size(); ++a) {
    for (std::size_t b = a + 1; b < summaries.size(); ++b) {
      const auto& sa = summaries[a];
      const auto& sb = summaries[b];
      ConceptSimilarityPair p;
      p.distance = std::sqrt(detail::sq_dist(centroids.row(sa.cluster), centroids.row(sb.cluster)));
      p.label_a = sa.medoid;
      p.label_b = sb.medoid;
      p.cluster_a = sa.cluster;
      p.cluster_b = sb.cluster;
      if (p.label_b < p.label_a) {
        std::swap(p.label_a, p.label_b);
        std::swap(p.cluster_a, p.cluster_b);
      }
      pairs.push_back(std::move(p));
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const ConceptSimilarityPair& x, const ConceptSimilarityPair& y) {
    if (x.distance != y.distance) return x.distance < y.distance;
    if (x.label_a != y.label_a) return x.label_a < y.label_a;
    return x.label_b < y.label_b;
  });
  if (pairs.size() > top_n) pairs.resize(top_n);
  return pairs;
}

// Mean silhouette coefficient; singleton clusters contribute 0.
inline double silhouette_score(const Tensor& points, const ClusterAssignment& assign) {
  const std::size_t n = points.rows;
  const std::size_t k = assign.k();
  if (n < 2 || k < 2) return 0.0;
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t l : assign.labels) ++sizes[l];
  double total = 0.0;
  std::vector<double> sum(k);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) sum[assign.labels[j]] += std::sqrt(detail::sq_dist(points.row(i), points.row(j)));
    const std::size_t own = assign.labels[i];
    if (sizes[own] < 2) continue;
    const double a = sum[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c)
      if (c != own && sizes[c] > 0) b = std::min(b, sum[c] / static_cast<double>(sizes[c]));
    if (std::isinf(b)) continue;
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(n);
}

inline void write_assignment_tsv(std::ostream& os, std::span<const std::string> labels, const ClusterAssignment& a) {
  for (std::size_t i = 0; i < labels.size(); ++i) os << labels[i] << '\t' << a.labels[i] << '\n';
}

inline void write_centroids_tsv(std::ostream& os, const Tensor& centroids) {
  for (std::size_t c = 0; c < centroids.rows; ++c) {
    os << c;
    for (double v : centroids.row(c)) os << '\t' << util::format_double(v);
    os << '\n';
  }
}

// Reads "label<TAB>cluster" rows plus a centroid table into an assignment.
inline ClusterAssignment read_assignment(std::istream& assignment_tsv, std::istream& centroids_tsv,
                                         std::vector<std::string>* labels) {
  ClusterAssignment a;
  std::string line;
  while (std::getline(assignment_tsv, line)) {
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() != 2) throw DataError("cluster assignment: expected 2 columns");
    if (labels) labels->push_back(f[0]);
    a.labels.push_back(static_cast<std::size_t>(util::parse_double(f[1])));
  }
  EmbeddingMatrix c = read_embedding_tsv(centroids_tsv);
  a.centroids = std::move(c.rows);
  for (std::size_t l : a.labels)
    if (l >= a.centroids.rows) throw DataError("cluster assignment refers to a missing centroid");
  return a;
}

inline nlohmann::json to_json(const ClusterSummary& s) {
  nlohmann::json top = nlohmann::json::array();
  for (const auto& h : s.top_headers) top.push_back({{"label", h.label}, {"count", h.count}});
  return {{"cluster", s.cluster}, {"size", s.size}, {"medoid", s.medoid}, {"top_headers", top}};
}

inline ClusterSummary summary_from_json(const nlohmann::json& j) {
  ClusterSummary s;
  s.cluster = j.at("cluster");
  s.size = j.at("size");
  s.medoid = j.at("medoid");
  for (const auto& h : j.at("top_headers")) s.top_headers.push_back({h.at("label"), h.at("count")});
  return s;
}

}  // namespace doconto
