#pragma once

// Count-based candidate concept mining over normalized headers.

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "doconto/corpus.hpp"
#include "doconto/errors.hpp"

namespace doconto {

struct FrequencyTable {
  std::map<std::string, std::size_t> entries;
  std::size_t total = 0;

  std::size_t count(const std::string& label) const {
    auto it = entries.find(label);
    return it == entries.end() ? 0 : it->second;
  }

  // Associative merge of a partial count.
  void merge(const FrequencyTable& other) {
    for (const auto& [label, n] : other.entries) entries[label] += n;
    total += other.total;
  }

  bool operator==(const FrequencyTable&) const = default;
};

struct CandidateConcept {
  std::string label;
  std::size_t count = 0;
  std::size_t rank = 0;  // 1-based

  bool operator==(const CandidateConcept&) const = default;
};

// Occurrence counts by default; with per_document each (doc_id, label) pair
// counts once.
inline FrequencyTable count_headers(std::span<const HeaderRecord> headers, bool per_document = false) {
  FrequencyTable t;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& h : headers) {
    if (h.normalized.empty()) continue;
    if (per_document && !seen.emplace(h.doc_id, h.normalized).second) continue;
    ++t.entries[h.normalized];
    ++t.total;
  }
  return t;
}

inline std::vector<CandidateConcept> select_candidates(const FrequencyTable& table, std::size_t min_count) {
  if (min_count < 1) throw ParameterError("min_count must be >= 1");
  std::vector<CandidateConcept> out;
  for (const auto& [label, n] : table.entries)
    if (n >= min_count) out.push_back({label, n, 0});
  std::stable_sort(out.begin(), out.end(), [](const CandidateConcept& a, const CandidateConcept& b) {
    return a.count != b.count ? a.count > b.count : a.label < b.label;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  return out;
}

// "label<TAB>count<TAB>rank" per line, in rank order.
inline void write_candidates_tsv(std::ostream& os, std::span<const CandidateConcept> cands) {
  for (const auto& c : cands) os << c.label << '\t' << c.count << '\t' << c.rank << '\n';
}

inline std::vector<CandidateConcept> read_candidates_tsv(std::istream& is) {
  std::vector<CandidateConcept> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto t1 = line.find('\t');
    auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw DataError("candidates line " + std::to_string(line_no) + ": expected 3 columns");
    try {
      out.push_back({line.substr(0, t1), std::stoul(line.substr(t1 + 1, t2 - t1 - 1)), std::stoul(line.substr(t2 + 1))});
    } catch (const std::logic_error&) {
      throw DataError("candidates line " + std::to_string(line_no) + ": bad integer");
    }
  }
  return out;
}

inline FrequencyTable table_from_candidates(std::span<const CandidateConcept> cands) {
  FrequencyTable t;
  for (const auto& c : cands) {
    t.entries[c.label] += c.count;
    t.total += c.count;
  }
  return t;
}

}  // namespace doconto
