#pragma once

// Per-document section annotations: matched class, semantic terms and the
// section content (hash plus a truncated literal).

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "doconto/corpus.hpp"
#include "doconto/errors.hpp"
#include "doconto/ontology/graph.hpp"
#include "doconto/ontology/mapping.hpp"
#include "doconto/topics/lda.hpp"
#include "doconto/util/digest.hpp"

namespace doconto {

struct SectionAnnotation {
  std::size_t ordinal = 0;
  std::string header;  // normalized
  std::optional<std::string> class_id;
  std::optional<MatchMethod> method;
  std::vector<std::string> semantic_terms;
  std::string content_hash;  // sha-256 of the full body
  std::string content;       // body, truncated

  bool operator==(const SectionAnnotation&) const = default;
};

struct AnnotatedDocument {
  std::string doc_id;
  DocType doc_type = DocType::academic;
  std::optional<std::string> category;
  std::vector<SectionAnnotation> sections;

  bool operator==(const AnnotatedDocument&) const = default;
};

struct AnnotateOptions {
  std::size_t k_terms = 10;
  std::size_t content_bytes = 1024;
  std::size_t sweeps = 50;
};

// Cuts at `limit` bytes without splitting a UTF-8 sequence.
inline std::string truncate_utf8(std::string_view s, std::size_t limit) {
  if (s.size() <= limit) return std::string(s);
  std::size_t end = limit;
  while (end > 0 && (static_cast<unsigned char>(s[end]) & 0xC0) == 0x80) --end;
  return std::string(s.substr(0, end));
}

inline AnnotatedDocument annotate_document(const DocumentRecord& doc, const OntologyGraph& g, const AliasTable& aliases,
                                           const TopicModel* topics, const AnnotateOptions& opt = {},
                                           const EmbeddingContext* emb = nullptr) {
  if (!g.doc_types().count(doc.doc_type))
    throw ParameterError("ontology has no classes for doc type '" + std::string(to_string(doc.doc_type)) + "'");
  if (topics && opt.k_terms < 1) throw ParameterError("k_terms must be >= 1");

  AnnotatedDocument out;
  out.doc_id = doc.doc_id;
  out.doc_type = doc.doc_type;
  out.category = doc.category;
  for (std::size_t i = 0; i < doc.sections.size(); ++i) {
    const auto& s = doc.sections[i];
    SectionAnnotation a;
    a.ordinal = i;
    a.header = normalize_header(s.header.text);
    auto m = map_header_to_class(a.header, g, aliases, emb);
    a.class_id = m.class_id;
    a.method = m.method;
    if (topics)
      for (auto& [term, p] : semantic_terms(*topics, s.body, opt.k_terms, opt.sweeps)) a.semantic_terms.push_back(term);
    a.content_hash = util::sha256_hex(s.body);
    a.content = truncate_utf8(s.body, opt.content_bytes);
    out.sections.push_back(std::move(a));
  }
  return out;
}

inline nlohmann::json to_json(const SectionAnnotation& a) {
  nlohmann::json j{{"ordinal", a.ordinal},
                   {"header", a.header},
                   {"class", nullptr},
                   {"method", nullptr},
                   {"semantic_terms", a.semantic_terms},
                   {"content_hash", a.content_hash},
                   {"content", a.content}};
  if (a.class_id) j["class"] = *a.class_id;
  if (a.method) j["method"] = std::string(to_string(*a.method));
  return j;
}

inline nlohmann::json to_json(const AnnotatedDocument& d) {
  nlohmann::json secs = nlohmann::json::array();
  for (const auto& s : d.sections) secs.push_back(to_json(s));
  nlohmann::json j{{"doc_id", d.doc_id}, {"doc_type", std::string(to_string(d.doc_type))}, {"sections", secs}};
  j["category"] = d.category ? nlohmann::json(*d.category) : nlohmann::json(nullptr);
  return j;
}

inline AnnotatedDocument annotated_from_json(const nlohmann::json& j) {
  try {
    AnnotatedDocument d;
    d.doc_id = j.at("doc_id");
    auto t = parse_doc_type(j.at("doc_type").get<std::string>());
    if (!t) throw DataError("annotation: unknown doc_type");
    d.doc_type = *t;
    if (!j.at("category").is_null()) d.category = j.at("category").get<std::string>();
    for (const auto& s : j.at("sections")) {
      SectionAnnotation a;
      a.ordinal = s.at("ordinal");
      a.header = s.at("header");
      if (!s.at("class").is_null()) a.class_id = s.at("class").get<std::string>();
      if (!s.at("method").is_null()) {
        a.method = parse_match_method(s.at("method").get<std::string>());
        if (!a.method) throw DataError("annotation: unknown match method");
      }
      a.semantic_terms = s.at("semantic_terms").get<std::vector<std::string>>();
      a.content_hash = s.at("content_hash");
      a.content = s.at("content");
      d.sections.push_back(std::move(a));
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed annotation: ") + e.what());
  }
}

}  // namespace doconto
