#pragma once

// Header → ontology class resolution: exact label, alias table, containment,
// then the header's embedding cluster.

#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "doconto/corpus.hpp"
#include "doconto/encoder/embedding.hpp"
#include "doconto/errors.hpp"
#include "doconto/manifold/kmeans.hpp"
#include "doconto/ontology/graph.hpp"

namespace doconto {

enum class MatchMethod { exact, alias, embedding };

inline std::string_view to_string(MatchMethod m) {
  switch (m) {
    case MatchMethod::exact: return "exact";
    case MatchMethod::alias: return "alias";
    case MatchMethod::embedding: return "embedding";
  }
  return "exact";
}

inline std::optional<MatchMethod> parse_match_method(std::string_view s) {
  if (s == "exact") return MatchMethod::exact;
  if (s == "alias") return MatchMethod::alias;
  if (s == "embedding") return MatchMethod::embedding;
  return std::nullopt;
}

// normalized surface form → class id
using AliasTable = std::map<std::string, std::string>;

// "surface<TAB>ClassId" rows; '#' lines and blank lines skipped. Surfaces are
// normalized like headers.
inline AliasTable read_aliases(std::istream& is) {
  AliasTable out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto f = split_tabs(line);
    if (f.size() != 2 || f[1].empty()) throw DataError("alias table line " + std::to_string(n) + ": expected surface<TAB>ClassId");
    auto key = normalize_header(f[0]);
    if (key.empty()) throw DataError("alias table line " + std::to_string(n) + ": empty surface");
    out[key] = f[1];
  }
  return out;
}

inline AliasTable read_aliases(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open alias table '" + path + "'");
  return read_aliases(in);
}

// Aliases pointing at classes missing from the graph are dropped.
inline AliasTable restrict_aliases(const AliasTable& aliases, const OntologyGraph& g) {
  AliasTable out;
  for (const auto& [k, v] : aliases)
    if (g.find(v)) out.emplace(k, v);
  return out;
}

struct EmbeddingContext {
  const EmbeddingMatrix* embeddings = nullptr;
  const ClusterAssignment* assignment = nullptr;
  std::map<std::size_t, std::string> cluster_class;
};

struct ClassMatch {
  std::optional<std::string> class_id;
  std::optional<MatchMethod> method;
  std::vector<std::string> candidates;  // >1 when containment was ambiguous

  bool ambiguous() const { return candidates.size() > 1; }
};

namespace detail {

inline bool contains_phrase(std::string_view hay, std::string_view needle) {
  if (needle.empty()) return false;
  for (std::size_t pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + 1)) {
    const bool left = pos == 0 || hay[pos - 1] == ' ';
    const std::size_t end = pos + needle.size();
    const bool right = end == hay.size() || hay[end] == ' ';
    if (left && right) return true;
  }
  return false;
}

// Label and alias surfaces contained as whole words, per class in table order.
inline std::vector<std::string> containment_candidates(const std::string& header, const OntologyGraph& g,
                                                       const AliasTable& aliases) {
  std::vector<std::string> out;
  for (const auto* c : g.section_classes()) {
    bool hit = contains_phrase(header, lowercase(c->label));
    for (auto it = aliases.begin(); !hit && it != aliases.end(); ++it)
      if (it->second == c->id) hit = contains_phrase(header, it->first);
    if (hit) out.push_back(c->id);
  }
  return out;
}

}  // namespace detail

inline ClassMatch map_header_to_class(const std::string& header, const OntologyGraph& g, const AliasTable& aliases,
                                      const EmbeddingContext* emb = nullptr) {
  ClassMatch m;
  if (header.empty()) return m;
  if (const auto* c = g.find_by_label(header)) {
    m.class_id = c->id;
    m.method = MatchMethod::exact;
    return m;
  }
  if (auto it = aliases.find(header); it != aliases.end() && g.find(it->second)) {
    m.class_id = it->second;
    m.method = MatchMethod::alias;
    return m;
  }
  m.candidates = detail::containment_candidates(header, g, aliases);
  if (!m.candidates.empty()) {
    m.class_id = m.candidates.front();
    m.method = MatchMethod::alias;
    return m;
  }
  if (emb && emb->embeddings && emb->assignment) {
    const auto& labels = emb->embeddings->labels;
    for (std::size_t i = 0; i < labels.size() && i < emb->assignment->labels.size(); ++i) {
      if (labels[i] != header) continue;
      auto it = emb->cluster_class.find(emb->assignment->labels[i]);
      if (it != emb->cluster_class.end() && g.find(it->second)) {
        m.class_id = it->second;
        m.method = MatchMethod::embedding;
      }
      break;
    }
  }
  return m;
}

// Each cluster takes the class most of its lexically resolved members map
// to; ties go to the earlier class in table order. Unresolved clusters are
// left out.
inline std::map<std::size_t, std::string> derive_cluster_classes(std::span<const std::string> labels,
                                                                 const ClusterAssignment& assign,
                                                                 const OntologyGraph& g, const AliasTable& aliases) {
  if (labels.size() != assign.labels.size()) throw ParameterError("labels and assignment must be aligned");
  std::map<std::string, std::size_t> order;
  for (const auto* c : g.section_classes()) order.emplace(c->id, order.size());

  std::map<std::size_t, std::map<std::string, std::size_t>> votes;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto m = map_header_to_class(labels[i], g, aliases);
    if (m.class_id) ++votes[assign.labels[i]][*m.class_id];
  }
  std::map<std::size_t, std::string> out;
  for (const auto& [cluster, tally] : votes) {
    const std::string* best = nullptr;
    std::size_t best_n = 0;
    for (const auto& [cls, n] : tally)
      if (!best || n > best_n || (n == best_n && order[cls] < order[*best])) {
        best = &cls;
        best_n = n;
      }
    out.emplace(cluster, *best);
  }
  return out;
}

}  // namespace doconto
