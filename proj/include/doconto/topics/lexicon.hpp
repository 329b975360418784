#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "doconto/corpus.hpp"
#include "doconto/errors.hpp"

namespace doconto {

enum class LexiconMode { word, bigram, phrase };

inline std::string_view to_string(LexiconMode m) {
  switch (m) {
    case LexiconMode::word: return "word";
    case LexiconMode::bigram: return "bigram";
    case LexiconMode::phrase: return "phrase";
  }
  return "word";
}

inline LexiconMode parse_lexicon_mode(std::string_view s) {
  if (s == "word") return LexiconMode::word;
  if (s == "bigram") return LexiconMode::bigram;
  if (s == "phrase") return LexiconMode::phrase;
  throw ParameterError("unknown lexicon mode '" + std::string(s) + "'");
}

class EmptyLexiconError : public DataError {
 public:
  using DataError::DataError;
};

// Lowercased tokens of a section body.
inline std::vector<std::string> section_tokens(std::string_view text) {
  auto tokens = tokenize(text);
  for (auto& t : tokens)
    for (char& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return tokens;
}

// Term arities per mode: word {1}, bigram {2}, phrase {1, 2, 3}.
inline std::vector<std::size_t> term_arities(LexiconMode m) {
  switch (m) {
    case LexiconMode::word: return {1};
    case LexiconMode::bigram: return {2};
    case LexiconMode::phrase: return {1, 2, 3};
  }
  return {1};
}

// Every window term of the mode's arities, in text order (arity-major).
inline std::vector<std::string> window_terms(std::span<const std::string> tokens, LexiconMode mode) {
  std::vector<std::string> out;
  for (std::size_t n : term_arities(mode)) {
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string term = tokens[i];
      for (std::size_t k = 1; k < n; ++k) term += ' ' + tokens[i + k];
      out.push_back(std::move(term));
    }
  }
  return out;
}

struct TermLexicon {
  LexiconMode mode = LexiconMode::word;
  std::vector<std::string> terms;               // index → term
  std::vector<std::size_t> section_frequency;   // index → df
  std::size_t sections = 0;                     // N the filters were computed over

  std::optional<std::size_t> find(const std::string& term) const {
    auto it = index_.find(term);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return terms.size(); }

  void reindex() {
    index_.clear();
    for (std::size_t i = 0; i < terms.size(); ++i) index_.emplace(terms[i], i);
  }

  bool operator==(const TermLexicon& o) const {
    return mode == o.mode && terms == o.terms && section_frequency == o.section_frequency && sections == o.sections;
  }

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

// Keeps terms with min_sections <= df <= floor(max_fraction * N); above `cap`
// survivors, the most section-frequent are kept (ties lexicographic).
inline TermLexicon build_lexicon(std::span<const std::string> section_texts, LexiconMode mode,
                                 std::size_t min_sections = 20, double max_fraction = 0.10,
                                 std::size_t cap = 100000) {
  if (section_texts.empty()) throw ParameterError("build_lexicon needs at least one section");
  if (!(max_fraction > 0.0 && max_fraction < 1.0)) throw ParameterError("max_fraction must be in (0, 1)");
  if (cap < 1) throw ParameterError("lexicon cap must be >= 1");

  std::map<std::string, std::size_t> df;
  for (const auto& text : section_texts) {
    auto terms = window_terms(section_tokens(text), mode);
    std::set<std::string> distinct(terms.begin(), terms.end());
    for (const auto& t : distinct) ++df[t];
  }

  const auto n = section_texts.size();
  const auto max_df = static_cast<std::size_t>(std::floor(max_fraction * static_cast<double>(n)));
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [term, f] : df)
    if (f >= min_sections && f <= max_df) kept.emplace_back(term, f);
  if (kept.empty()) throw EmptyLexiconError("no term survives the section-frequency filters");

  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second != b.second ? a.second > b.second : a.first < b.first; });
  if (kept.size() > cap) kept.resize(cap);

  TermLexicon lex;
  lex.mode = mode;
  lex.sections = n;
  for (auto& [term, f] : kept) {
    lex.terms.push_back(term);
    lex.section_frequency.push_back(f);
  }
  lex.reindex();
  return lex;
}

struct SectionBow {
  std::map<std::size_t, std::size_t> counts;  // term index → count
  std::string doc_id;
  std::size_t ordinal = 0;

  std::size_t total() const {
    std::size_t s = 0;
    for (const auto& [t, c] : counts) s += c;
    return s;
  }
  bool empty() const { return counts.empty(); }
};

inline SectionBow to_bow(std::string_view section_text, const TermLexicon& lex) {
  SectionBow bow;
  for (const auto& term : window_terms(section_tokens(section_text), lex.mode))
    if (auto idx = lex.find(term)) ++bow.counts[*idx];
  return bow;
}

inline nlohmann::json to_json(const TermLexicon& lex) {
  return {{"mode", std::string(to_string(lex.mode))},
          {"sections", lex.sections},
          {"terms", lex.terms},
          {"section_frequency", lex.section_frequency}};
}

inline TermLexicon lexicon_from_json(const nlohmann::json& j) {
  TermLexicon lex;
  lex.mode = parse_lexicon_mode(j.at("mode").get<std::string>());
  lex.sections = j.at("sections");
  lex.terms = j.at("terms").get<std::vector<std::string>>();
  lex.section_frequency = j.at("section_frequency").get<std::vector<std::size_t>>();
  if (lex.terms.size() != lex.section_frequency.size()) throw DataError("lexicon: terms and frequencies differ in length");
  lex.reindex();
  return lex;
}

}  // namespace doconto
