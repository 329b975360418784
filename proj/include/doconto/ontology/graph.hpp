#pragma once

// Document ontology: the Document / AcademicArticle / RFP upper level, the
// section concept classes per document type, and the hasPart / isSimilarTo
// links between classes.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "doconto/corpus.hpp"
#include "doconto/errors.hpp"

namespace doconto {

inline constexpr std::string_view kDefaultBaseIri = "http://example.org/doconto#";

enum class PropertyKind { hasContent, hasSemanticTerms, hasPart, isSimilarTo, hasCategory };

inline std::string_view to_string(PropertyKind k) {
  switch (k) {
    case PropertyKind::hasContent: return "hasContent";
    case PropertyKind::hasSemanticTerms: return "hasSemanticTerms";
    case PropertyKind::hasPart: return "hasPart";
    case PropertyKind::isSimilarTo: return "isSimilarTo";
    case PropertyKind::hasCategory: return "hasCategory";
  }
  return "hasPart";
}

struct OntologyClass {
  std::string id;
  std::string label;
  std::optional<std::string> parent;
  std::set<DocType> doc_types;  // empty for the upper-level classes

  bool operator==(const OntologyClass&) const = default;
};

struct OntologyProperty {
  std::string id;
  PropertyKind kind = PropertyKind::hasPart;
  std::optional<std::string> domain;  // class id
  bool literal_range = false;         // xsd:string when true, otherwise a class
  bool symmetric = false;

  bool operator==(const OntologyProperty&) const = default;
};

// "Proof of Theorem" -> "ProofOfTheorem"
inline std::string upper_camel(std::string_view label) {
  std::string out;
  bool up = true;
  for (unsigned char c : label) {
    if (!std::isalnum(c)) {
      up = true;
      continue;
    }
    out.push_back(static_cast<char>(up ? std::toupper(c) : c));
    up = false;
  }
  return out;
}

inline std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

class OntologyGraph {
 public:
  explicit OntologyGraph(std::string base_iri = std::string(kDefaultBaseIri)) : base_iri_(std::move(base_iri)) {}

  const std::string& base_iri() const { return base_iri_; }
  const std::vector<OntologyClass>& classes() const { return classes_; }
  const std::vector<OntologyProperty>& properties() const { return properties_; }
  const std::set<std::pair<std::string, std::string>>& similarities() const { return similar_; }
  const std::set<std::pair<std::string, std::string>>& parts() const { return parts_; }
  const std::set<DocType>& doc_types() const { return doc_types_; }

  const OntologyClass* find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &classes_[it->second];
  }

  // Section concept classes in insertion (table) order.
  std::vector<const OntologyClass*> section_classes() const {
    std::vector<const OntologyClass*> out;
    for (const auto& c : classes_)
      if (!c.doc_types.empty()) out.push_back(&c);
    return out;
  }

  const OntologyClass* find_by_label(std::string_view lowered_label) const {
    for (const auto& c : classes_)
      if (!c.doc_types.empty() && lowercase(c.label) == lowered_label) return &c;
    return nullptr;
  }

  // Adds a class, or merges doc types into an existing one with the same id.
  void add_class(OntologyClass c) {
    if (c.id.empty()) throw ParameterError("class id must be non-empty");
    if (auto it = index_.find(c.id); it != index_.end()) {
      auto& existing = classes_[it->second];
      if (existing.label != c.label || existing.parent != c.parent)
        throw ParameterError("conflicting definition for class '" + c.id + "'");
      existing.doc_types.insert(c.doc_types.begin(), c.doc_types.end());
      return;
    }
    if (c.parent && !find(*c.parent)) throw ParameterError("unknown parent class '" + *c.parent + "'");
    for (DocType t : c.doc_types) doc_types_.insert(t);
    index_.emplace(c.id, classes_.size());
    classes_.push_back(std::move(c));
    check_acyclic();
  }

  void set_parent(const std::string& id, const std::string& parent) {
    auto it = index_.find(id);
    if (it == index_.end() || !find(parent)) throw ParameterError("set_parent: unknown class");
    auto saved = classes_[it->second].parent;
    classes_[it->second].parent = parent;
    try {
      check_acyclic();
    } catch (...) {
      classes_[it->second].parent = saved;
      throw;
    }
  }

  void add_property(OntologyProperty p) {
    if (p.domain && !find(*p.domain)) throw ParameterError("unknown domain class '" + *p.domain + "'");
    for (const auto& q : properties_)
      if (q.id == p.id) throw ParameterError("duplicate property '" + p.id + "'");
    properties_.push_back(std::move(p));
  }

  // Stored once as an unordered pair.
  void add_similarity(const std::string& a, const std::string& b) {
    require(a);
    require(b);
    if (a == b) throw ParameterError("a class cannot be similar to itself");
    similar_.insert(a < b ? std::pair{a, b} : std::pair{b, a});
  }

  bool is_similar(const std::string& a, const std::string& b) const {
    return similar_.count(a < b ? std::pair{a, b} : std::pair{b, a}) > 0;
  }

  std::vector<std::string> similar_to(const std::string& id) const {
    std::vector<std::string> out;
    for (const auto& [a, b] : similar_) {
      if (a == id) out.push_back(b);
      if (b == id) out.push_back(a);
    }
    return out;
  }

  void add_part(const std::string& whole, const std::string& part) {
    require(whole);
    require(part);
    parts_.emplace(whole, part);
  }

  bool has_part(const std::string& whole, const std::string& part) const { return parts_.count({whole, part}) > 0; }

  bool operator==(const OntologyGraph& o) const {
    return base_iri_ == o.base_iri_ && classes_ == o.classes_ && properties_ == o.properties_ &&
           similar_ == o.similar_ && parts_ == o.parts_;
  }

 private:
  void require(const std::string& id) const {
    if (!find(id)) throw ParameterError("unknown class '" + id + "'");
  }

  void check_acyclic() const {
    for (const auto& c : classes_) {
      std::set<std::string> seen{c.id};
      const OntologyClass* cur = &c;
      while (cur->parent) {
        if (!seen.insert(*cur->parent).second) throw ParameterError("class hierarchy cycle through '" + c.id + "'");
        cur = find(*cur->parent);
        if (!cur) throw ParameterError("dangling parent on class '" + c.id + "'");
      }
    }
  }

  std::string base_iri_;
  std::vector<OntologyClass> classes_;
  std::map<std::string, std::size_t> index_;
  std::vector<OntologyProperty> properties_;
  std::set<std::pair<std::string, std::string>> similar_;
  std::set<std::pair<std::string, std::string>> parts_;
  std::set<DocType> doc_types_;
};

enum class OntologyScope { academic, rfp, both };

inline OntologyScope parse_ontology_scope(std::string_view s) {
  if (s == "academic") return OntologyScope::academic;
  if (s == "rfp") return OntologyScope::rfp;
  if (s == "both") return OntologyScope::both;
  throw ParameterError("unknown ontology scope '" + std::string(s) + "'");
}

// Section concepts mined from each corpus, in table order.
inline const std::vector<std::string_view>& academic_concepts() {
  static const std::vector<std::string_view> k{
      "Introduction", "Conclusion",  "Discussion",       "References", "Acknowledgments",
      "Results",      "Abstract",    "Appendix",         "Related Work", "Experiments",
      "Methodology",  "Proof of Theorem", "Evaluation",  "Future Work", "Datasets",
      "Contribution", "Background",  "Implementation",   "Approach",   "Preliminary"};
  return k;
}

inline const std::vector<std::string_view>& rfp_concepts() {
  static const std::vector<std::string_view> k{
      "Introduction", "Requirement", "General Information", "Conclusion", "Statement of Work",
      "Contract Administration", "Appendix", "Background", "Deliverable", "Contract Clauses"};
  return k;
}

inline OntologyGraph build_base_ontology(OntologyScope scope, std::string base_iri = std::string(kDefaultBaseIri)) {
  OntologyGraph g(std::move(base_iri));
  g.add_class({"Document", "Document", std::nullopt, {}});
  g.add_class({"AcademicArticle", "Academic Article", "Document", {}});
  g.add_class({"RFP", "RFP", "Document", {}});

  auto add_row = [&](const std::vector<std::string_view>& labels, DocType type, const std::string& doc_class) {
    for (auto label : labels) {
      const std::string id = upper_camel(label);
      g.add_class({id, std::string(label), std::nullopt, {type}});
      g.add_part(doc_class, id);
    }
  };
  if (scope != OntologyScope::rfp) add_row(academic_concepts(), DocType::academic, "AcademicArticle");
  if (scope != OntologyScope::academic) add_row(rfp_concepts(), DocType::rfp, "RFP");

  g.add_property({"hasContent", PropertyKind::hasContent, std::nullopt, true, false});
  g.add_property({"hasSemanticTerms", PropertyKind::hasSemanticTerms, std::nullopt, true, false});
  g.add_property({"hasPart", PropertyKind::hasPart, std::nullopt, false, false});
  g.add_property({"isSimilarTo", PropertyKind::isSimilarTo, std::nullopt, false, true});
  g.add_property({"hasCategory", PropertyKind::hasCategory, "Document", true, false});

  if (g.find("Results") && g.find("Experiments")) g.add_part("Results", "Experiments");
  if (g.find("Approach") && g.find("Methodology")) g.add_similarity("Approach", "Methodology");
  return g;
}

}  // namespace doconto
