#pragma once

// RDF terms and triples, a canonical Turtle writer and a Turtle reader.
//
// Canonical form: fixed prefix block, subjects in term order, rdf:type first
// then predicates in term order, objects in term order, one statement block
// per subject.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "doconto/errors.hpp"
#include "doconto/ontology/annotate.hpp"
#include "doconto/ontology/graph.hpp"

namespace doconto::rdf {

inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";

struct Term {
  enum class Kind { iri, bnode, literal };
  Kind kind = Kind::iri;
  std::string value;     // IRI, blank node label or lexical form
  std::string datatype;  // literals only; xsd:string when no language
  std::string lang;

  static Term iri(std::string v) { return {Kind::iri, std::move(v), {}, {}}; }
  static Term bnode(std::string v) { return {Kind::bnode, std::move(v), {}, {}}; }
  static Term literal(std::string v, std::string dt = std::string(kXsd) + "string") {
    return {Kind::literal, std::move(v), std::move(dt), {}};
  }

  bool is_iri() const { return kind == Kind::iri; }
  bool is_literal() const { return kind == Kind::literal; }

  auto key() const { return std::tie(kind, value, datatype, lang); }
  bool operator==(const Term& o) const { return key() == o.key(); }
  bool operator<(const Term& o) const { return key() < o.key(); }
};

struct Triple {
  Term s, p, o;

  auto key() const { return std::tie(s, p, o); }
  bool operator==(const Triple& t) const { return key() == t.key(); }
  bool operator<(const Triple& t) const { return key() < t.key(); }
};

using TripleSet = std::set<Triple>;

struct Document {
  std::map<std::string, std::string> prefixes;  // name (without ':') → namespace
  TripleSet triples;
};

inline std::string rdf_type() { return std::string(kRdf) + "type"; }

// ---------------------------------------------------------------- writing

namespace detail {

inline bool plain_local(std::string_view s) {
  if (s.empty()) return false;
  const auto c0 = static_cast<unsigned char>(s[0]);
  if (!(std::isalpha(c0) || c0 == '_')) return false;
  for (unsigned char c : s)
    if (!(std::isalnum(c) || c == '_' || c == '-')) return false;
  return true;
}

inline void append_uchar(std::string& out, unsigned char c) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  out += "\\u00";
  out.push_back(kHex[c >> 4]);
  out.push_back(kHex[c & 0xF]);
}

inline std::string escape_string(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (unsigned char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20 || c == 0x7F) append_uchar(out, c);
        else out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

inline std::string escape_iri(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' || c == '`' ||
        c == '\\')
      append_uchar(out, c);
    else
      out.push_back(static_cast<char>(c));
  }
  return out;
}

inline bool is_integer_lexical(std::string_view s) {
  std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (i >= s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace detail

class Writer {
 public:
  explicit Writer(std::map<std::string, std::string> prefixes) : prefixes_(std::move(prefixes)) {}

  std::string term(const Term& t) const {
    switch (t.kind) {
      case Term::Kind::bnode: return "_:" + t.value;
      case Term::Kind::iri: {
        // longest matching namespace wins
        const std::pair<const std::string, std::string>* best = nullptr;
        for (const auto& p : prefixes_)
          if (t.value.size() > p.second.size() && t.value.compare(0, p.second.size(), p.second) == 0 &&
              detail::plain_local(std::string_view(t.value).substr(p.second.size())) &&
              (!best || p.second.size() > best->second.size()))
            best = &p;
        if (best) return best->first + ":" + t.value.substr(best->second.size());
        return "<" + detail::escape_iri(t.value) + ">";
      }
      case Term::Kind::literal: {
        if (t.datatype == std::string(kXsd) + "integer" && detail::is_integer_lexical(t.value)) return t.value;
        std::string out = "\"" + detail::escape_string(t.value) + "\"";
        if (!t.lang.empty()) return out + "@" + t.lang;
        if (t.datatype.empty() || t.datatype == std::string(kXsd) + "string") return out;
        return out + "^^" + term(Term::iri(t.datatype));
      }
    }
    return {};
  }

  std::string write(const TripleSet& triples) const {
    std::ostringstream os;
    for (const auto& [name, ns] : prefixes_) os << "@prefix " << name << ": <" << detail::escape_iri(ns) << "> .\n";

    // subject → predicate → objects, each ordered by serialized form
    std::map<std::string, std::map<std::pair<int, std::string>, std::set<std::string>>> blocks;
    const std::string type = rdf_type();
    for (const auto& t : triples) {
      const bool is_type = t.p.is_iri() && t.p.value == type;
      blocks[term(t.s)][{is_type ? 0 : 1, is_type ? "a" : term(t.p)}].insert(term(t.o));
    }
    for (const auto& [subject, preds] : blocks) {
      os << '\n' << subject;
      std::size_t pi = 0;
      for (const auto& [pred, objects] : preds) {
        os << (pi++ == 0 ? " " : " ;\n    ") << pred.second << ' ';
        std::size_t oi = 0;
        for (const auto& o : objects) os << (oi++ == 0 ? "" : " , ") << o;
      }
      os << " .\n";
    }
    return os.str();
  }

 private:
  std::map<std::string, std::string> prefixes_;
};

inline std::string write_turtle(const Document& doc) { return Writer(doc.prefixes).write(doc.triples); }

// N-Triples, one line per triple in set order.
inline std::string write_ntriples(const TripleSet& triples) {
  Writer w({});
  std::string out;
  for (const auto& t : triples) {
    auto lit = [&](const Term& x) {
      if (!x.is_literal()) return w.term(x);
      std::string s = "\"" + detail::escape_string(x.value) + "\"";
      if (!x.lang.empty()) return s + "@" + x.lang;
      if (x.datatype.empty() || x.datatype == std::string(kXsd) + "string") return s;
      return s + "^^<" + detail::escape_iri(x.datatype) + ">";
    };
    out += lit(t.s) + " " + lit(t.p) + " " + lit(t.o) + " .\n";
  }
  return out;
}

// ---------------------------------------------------------------- reading

namespace detail {

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Document run() {
    skip_ws();
    while (pos_ < s_.size()) {
      if (peek_directive()) {
        directive();
      } else {
        triples_block();
        expect('.');
      }
      skip_ws();
    }
    return std::move(doc_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t line = 1;
    for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i)
      if (s_[i] == '\n') ++line;
    throw DataError("turtle line " + std::to_string(line) + ": " + msg);
  }

  char cur() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  void expect(char c) {
    skip_ws();
    if (cur() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool starts_with_ci(std::string_view word) const {
    if (s_.size() - pos_ < word.size()) return false;
    for (std::size_t i = 0; i < word.size(); ++i)
      if (std::tolower(static_cast<unsigned char>(s_[pos_ + i])) != word[i]) return false;
    const std::size_t after = pos_ + word.size();
    return after >= s_.size() || std::isspace(static_cast<unsigned char>(s_[after]));
  }

  bool peek_directive() const { return cur() == '@' || starts_with_ci("prefix") || starts_with_ci("base"); }

  void directive() {
    const bool at = cur() == '@';
    if (at) ++pos_;
    if (starts_with_ci("prefix")) {
      pos_ += 6;
      skip_ws();
      std::string name;
      while (cur() != ':' && pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(cur()))) name.push_back(s_[pos_++]);
      if (cur() != ':') fail("malformed prefix name");
      ++pos_;
      skip_ws();
      doc_.prefixes[name] = iriref();
    } else if (starts_with_ci("base")) {
      pos_ += 4;
      skip_ws();
      base_ = iriref();
    } else {
      fail("unknown directive");
    }
    if (at) expect('.');
  }

  std::uint32_t hex_digits(std::size_t n) {
    if (s_.size() - pos_ < n) fail("truncated escape");
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const char c = s_[pos_++];
      v <<= 4;
      if (c >= '0' && c <= '9') v |= static_cast<std::uint32_t>(c - '0');
      else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint32_t>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') v |= static_cast<std::uint32_t>(c - 'A' + 10);
      else fail("bad hex digit in escape");
    }
    return v;
  }

  std::string iriref() {
    if (cur() != '<') fail("expected IRI");
    ++pos_;
    std::string out;
    while (true) {
      if (pos_ >= s_.size()) fail("unterminated IRI");
      const char c = s_[pos_++];
      if (c == '>') break;
      if (c == '\\') {
        const char e = s_[pos_++];
        if (e == 'u') append_utf8(out, hex_digits(4));
        else if (e == 'U') append_utf8(out, hex_digits(8));
        else fail("bad IRI escape");
      } else if (static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' ||
                 c == '^' || c == '`') {
        fail("illegal character in IRI");
      } else {
        out.push_back(c);
      }
    }
    if (!base_.empty() && out.find(':') == std::string::npos) out = base_ + out;
    return out;
  }

  static bool pn_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '-' || c >= 0x80; }

  std::string prefixed_name() {
    std::string prefix;
    while (pos_ < s_.size() && s_[pos_] != ':') {
      const auto c = static_cast<unsigned char>(s_[pos_]);
      if (!(pn_char(c) || c == '.')) fail("malformed prefixed name");
      prefix.push_back(s_[pos_++]);
    }
    if (cur() != ':') fail("expected ':' in prefixed name");
    ++pos_;
    auto it = doc_.prefixes.find(prefix);
    if (it == doc_.prefixes.end()) fail("undeclared prefix '" + prefix + "'");
    std::string local;
    while (pos_ < s_.size()) {
      const auto c = static_cast<unsigned char>(s_[pos_]);
      if (c == '\\' && pos_ + 1 < s_.size()) {
        local.push_back(s_[pos_ + 1]);
        pos_ += 2;
      } else if (pn_char(c) || c == ':' || c == '%') {
        local.push_back(s_[pos_++]);
      } else if (c == '.' && pos_ + 1 < s_.size() && (pn_char(static_cast<unsigned char>(s_[pos_ + 1])) ||
                                                      s_[pos_ + 1] == ':' || s_[pos_ + 1] == '.')) {
        local.push_back(s_[pos_++]);
      } else {
        break;
      }
    }
    return it->second + local;
  }

  std::string string_body() {
    const char q = s_[pos_];
    const bool longq = s_.size() - pos_ >= 3 && s_[pos_ + 1] == q && s_[pos_ + 2] == q;
    pos_ += longq ? 3 : 1;
    std::string out;
    while (true) {
      if (pos_ >= s_.size()) fail("unterminated string");
      const char c = s_[pos_];
      if (longq && c == q && s_.size() - pos_ >= 3 && s_[pos_ + 1] == q && s_[pos_ + 2] == q) {
        pos_ += 3;
        // up to two further quotes belong to the content
        while (cur() == q) {
          out.push_back(q);
          ++pos_;
        }
        break;
      }
      if (!longq && c == q) {
        ++pos_;
        break;
      }
      if (!longq && (c == '\n' || c == '\r')) fail("newline in short string");
      ++pos_;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (pos_ >= s_.size()) fail("dangling escape");
      const char e = s_[pos_++];
      switch (e) {
        case 't': out.push_back('\t'); break;
        case 'b': out.push_back('\b'); break;
        case 'n': out.push_back('\n'); break;
        case 'r': out.push_back('\r'); break;
        case 'f': out.push_back('\f'); break;
        case '"': out.push_back('"'); break;
        case '\'': out.push_back('\''); break;
        case '\\': out.push_back('\\'); break;
        case 'u': append_utf8(out, hex_digits(4)); break;
        case 'U': append_utf8(out, hex_digits(8)); break;
        default: fail("bad string escape");
      }
    }
    return out;
  }

  Term literal() {
    Term t = Term::literal(string_body());
    if (cur() == '@') {
      ++pos_;
      std::string lang;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-'))
        lang.push_back(s_[pos_++]);
      if (lang.empty()) fail("empty language tag");
      t.lang = lang;
      t.datatype = std::string(kRdf) + "langString";
    } else if (cur() == '^' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '^') {
      pos_ += 2;
      t.datatype = cur() == '<' ? iriref() : prefixed_name();
    }
    return t;
  }

  Term numeric() {
    std::string lex;
    if (cur() == '+' || cur() == '-') lex.push_back(s_[pos_++]);
    bool dot = false, exp = false;
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        lex.push_back(c);
      } else if (c == '.' && !dot && !exp && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
        dot = true;
        lex.push_back(c);
      } else if ((c == 'e' || c == 'E') && !exp) {
        exp = true;
        lex.push_back(c);
        if (pos_ + 1 < s_.size() && (s_[pos_ + 1] == '+' || s_[pos_ + 1] == '-')) lex.push_back(s_[++pos_]);
      } else {
        break;
      }
      ++pos_;
    }
    if (lex.empty() || lex == "+" || lex == "-") fail("malformed number");
    const char* dt = exp ? "double" : dot ? "decimal" : "integer";
    return Term::literal(lex, std::string(kXsd) + dt);
  }

  Term fresh_bnode() { return Term::bnode("b" + std::to_string(bnodes_++)); }

  Term subject() {
    skip_ws();
    const char c = cur();
    if (c == '<') return Term::iri(iriref());
    if (c == '_' && pos_ + 1 < s_.size() && s_[pos_ + 1] == ':') return bnode_label();
    if (c == '[') return bnode_property_list();
    if (c == '(') fail("collections are not supported");
    return Term::iri(prefixed_name());
  }

  Term bnode_label() {
    pos_ += 2;
    std::string label;
    while (pos_ < s_.size() && (pn_char(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) label.push_back(s_[pos_++]);
    while (!label.empty() && label.back() == '.') {
      label.pop_back();
      --pos_;
    }
    if (label.empty()) fail("empty blank node label");
    auto [it, inserted] = bnode_map_.emplace(label, "");
    if (inserted) it->second = fresh_bnode().value;
    return Term::bnode(it->second);
  }

  Term bnode_property_list() {
    ++pos_;
    Term node = fresh_bnode();
    skip_ws();
    if (cur() != ']') predicate_object_list(node);
    expect(']');
    return node;
  }

  Term predicate() {
    skip_ws();
    if (cur() == 'a' && pos_ + 1 < s_.size() &&
        (std::isspace(static_cast<unsigned char>(s_[pos_ + 1])) || s_[pos_ + 1] == '<' || s_[pos_ + 1] == '"')) {
      ++pos_;
      return Term::iri(rdf_type());
    }
    if (cur() == '<') return Term::iri(iriref());
    return Term::iri(prefixed_name());
  }

  Term object() {
    skip_ws();
    const char c = cur();
    if (c == '"' || c == '\'') return literal();
    if (c == '+' || c == '-' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) return numeric();
    if (starts_with_word("true")) {
      pos_ += 4;
      return Term::literal("true", std::string(kXsd) + "boolean");
    }
    if (starts_with_word("false")) {
      pos_ += 5;
      return Term::literal("false", std::string(kXsd) + "boolean");
    }
    return subject();
  }

  bool starts_with_word(std::string_view w) const {
    if (s_.compare(pos_, w.size(), w) != 0) return false;
    const std::size_t after = pos_ + w.size();
    return after >= s_.size() || (!pn_char(static_cast<unsigned char>(s_[after])) && s_[after] != ':');
  }

  void predicate_object_list(const Term& subj) {
    while (true) {
      Term pred = predicate();
      while (true) {
        Term obj = object();
        doc_.triples.insert({subj, pred, obj});
        skip_ws();
        if (cur() != ',') break;
        ++pos_;
      }
      skip_ws();
      if (cur() != ';') return;
      while (cur() == ';') {
        ++pos_;
        skip_ws();
      }
      if (cur() == '.' || cur() == ']') return;
    }
  }

  void triples_block() {
    skip_ws();
    const bool bracket = cur() == '[';
    Term subj = subject();
    skip_ws();
    if (bracket && cur() == '.') return;
    predicate_object_list(subj);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::string base_;
  std::size_t bnodes_ = 0;
  std::map<std::string, std::string> bnode_map_;
  Document doc_;
};

}  // namespace detail

inline Document parse_turtle(std::string_view text) { return detail::Parser(text).run(); }

}  // namespace doconto::rdf

namespace doconto {

inline std::map<std::string, std::string> ontology_prefixes(const std::string& base_iri) {
  return {{"", base_iri},
          {"owl", std::string(rdf::kOwl)},
          {"rdf", std::string(rdf::kRdf)},
          {"rdfs", std::string(rdf::kRdfs)},
          {"xsd", std::string(rdf::kXsd)}};
}

inline rdf::TripleSet ontology_triples(const OntologyGraph& g) {
  using rdf::Term;
  const std::string& b = g.base_iri();
  const std::string owl(rdf::kOwl), rdfs(rdf::kRdfs), xsd(rdf::kXsd);
  const Term type = Term::iri(rdf::rdf_type());
  rdf::TripleSet out;

  for (const auto& c : g.classes()) {
    const Term s = Term::iri(b + c.id);
    out.insert({s, type, Term::iri(owl + "Class")});
    out.insert({s, Term::iri(rdfs + "label"), Term::literal(c.label)});
    if (c.parent) out.insert({s, Term::iri(rdfs + "subClassOf"), Term::iri(b + *c.parent)});
  }
  for (const auto& p : g.properties()) {
    const Term s = Term::iri(b + p.id);
    out.insert({s, type, Term::iri(owl + (p.literal_range ? "DatatypeProperty" : "ObjectProperty"))});
    if (p.symmetric) out.insert({s, type, Term::iri(owl + "SymmetricProperty")});
    if (p.domain) out.insert({s, Term::iri(rdfs + "domain"), Term::iri(b + *p.domain)});
    if (p.literal_range) out.insert({s, Term::iri(rdfs + "range"), Term::iri(xsd + "string")});
  }
  for (const auto& [whole, part] : g.parts())
    out.insert({Term::iri(b + whole), Term::iri(b + "hasPart"), Term::iri(b + part)});
  for (const auto& [x, y] : g.similarities())
    out.insert({Term::iri(b + x), Term::iri(b + "isSimilarTo"), Term::iri(b + y)});
  return out;
}

inline std::string section_node_id(const std::string& doc_id, std::size_t ordinal) {
  return "doc-" + doc_id + "-s" + std::to_string(ordinal);
}

inline rdf::TripleSet annotation_triples(const OntologyGraph& g, const AnnotatedDocument& d) {
  using rdf::Term;
  const std::string& b = g.base_iri();
  const std::string owl(rdf::kOwl), rdfs(rdf::kRdfs), xsd(rdf::kXsd);
  const Term type = Term::iri(rdf::rdf_type());
  rdf::TripleSet out;

  const Term doc = Term::iri(b + "doc-" + d.doc_id);
  out.insert({doc, type, Term::iri(b + (d.doc_type == DocType::academic ? "AcademicArticle" : "RFP"))});
  out.insert({doc, type, Term::iri(owl + "NamedIndividual")});
  if (d.category) out.insert({doc, Term::iri(b + "hasCategory"), Term::literal(*d.category)});
  for (const auto& s : d.sections) {
    const Term node = Term::iri(b + section_node_id(d.doc_id, s.ordinal));
    out.insert({doc, Term::iri(b + "hasPart"), node});
    out.insert({node, type, Term::iri(owl + "NamedIndividual")});
    if (s.class_id) out.insert({node, type, Term::iri(b + *s.class_id)});
    if (s.method) out.insert({node, Term::iri(b + "matchMethod"), Term::literal(std::string(to_string(*s.method)))});
    out.insert({node, Term::iri(rdfs + "label"), Term::literal(s.header)});
    out.insert({node, Term::iri(b + "ordinal"), Term::literal(std::to_string(s.ordinal), xsd + "integer")});
    out.insert({node, Term::iri(b + "hasContent"), Term::literal(s.content)});
    out.insert({node, Term::iri(b + "contentHash"), Term::literal(s.content_hash)});
    for (const auto& t : s.semantic_terms) out.insert({node, Term::iri(b + "hasSemanticTerms"), Term::literal(t)});
  }
  return out;
}

inline std::string emit_turtle(const OntologyGraph& g, std::span<const AnnotatedDocument> annotations = {}) {
  rdf::Document doc;
  doc.prefixes = ontology_prefixes(g.base_iri());
  doc.triples = ontology_triples(g);
  if (!annotations.empty()) {
    using rdf::Term;
    const std::string& b = g.base_iri();
    const Term type = Term::iri(rdf::rdf_type());
    const Term dprop = Term::iri(std::string(rdf::kOwl) + "DatatypeProperty");
    const Term range = Term::iri(std::string(rdf::kRdfs) + "range");
    const Term xstring = Term::iri(std::string(rdf::kXsd) + "string");
    for (const char* p : {"matchMethod", "contentHash"}) {
      doc.triples.insert({Term::iri(b + p), type, dprop});
      doc.triples.insert({Term::iri(b + p), range, xstring});
    }
    doc.triples.insert({Term::iri(b + "ordinal"), type, dprop});
    doc.triples.insert({Term::iri(b + "ordinal"), range, Term::iri(std::string(rdf::kXsd) + "integer")});
    for (const auto& a : annotations) {
      auto t = annotation_triples(g, a);
      doc.triples.insert(t.begin(), t.end());
    }
  }
  return rdf::write_turtle(doc);
}

// Rebuilds the class-level graph from parsed triples; individuals are ignored.
inline OntologyGraph ontology_from_triples(const rdf::Document& doc) {
  auto base_it = doc.prefixes.find("");
  if (base_it == doc.prefixes.end()) throw DataError("ontology turtle has no default prefix");
  const std::string b = base_it->second;
  const std::string owl(rdf::kOwl), rdfs(rdf::kRdfs), xsd(rdf::kXsd), type = rdf::rdf_type();

  auto local = [&](const rdf::Term& t) -> std::optional<std::string> {
    if (!t.is_iri() || t.value.size() <= b.size() || t.value.compare(0, b.size(), b) != 0) return std::nullopt;
    return t.value.substr(b.size());
  };

  std::set<std::string> class_ids, datatype_props, object_props, symmetric;
  std::map<std::string, std::string> labels, parents, domains;
  std::set<std::string> literal_range;
  for (const auto& t : doc.triples) {
    auto s = local(t.s);
    if (!s || !t.p.is_iri()) continue;
    if (t.p.value == type && t.o.is_iri()) {
      if (t.o.value == owl + "Class") class_ids.insert(*s);
      if (t.o.value == owl + "DatatypeProperty") datatype_props.insert(*s);
      if (t.o.value == owl + "ObjectProperty") object_props.insert(*s);
      if (t.o.value == owl + "SymmetricProperty") symmetric.insert(*s);
    } else if (t.p.value == rdfs + "label" && t.o.is_literal()) {
      labels[*s] = t.o.value;
    } else if (t.p.value == rdfs + "subClassOf") {
      if (auto o = local(t.o)) parents[*s] = *o;
    } else if (t.p.value == rdfs + "domain") {
      if (auto o = local(t.o)) domains[*s] = *o;
    } else if (t.p.value == rdfs + "range" && t.o.is_iri() && t.o.value == xsd + "string") {
      literal_range.insert(*s);
    }
  }

  // hasPart edges from the document classes carry doc-type membership
  std::map<std::string, std::set<DocType>> doc_types;
  std::vector<std::pair<std::string, std::string>> parts, similar;
  for (const auto& t : doc.triples) {
    auto s = local(t.s);
    auto o = local(t.o);
    if (!s || !o || !class_ids.count(*s) || !class_ids.count(*o)) continue;
    if (t.p.value == b + "hasPart") {
      parts.emplace_back(*s, *o);
      if (*s == "AcademicArticle") doc_types[*o].insert(DocType::academic);
      if (*s == "RFP") doc_types[*o].insert(DocType::rfp);
    } else if (t.p.value == b + "isSimilarTo") {
      similar.emplace_back(*s, *o);
    }
  }

  OntologyGraph g(b);
  // parents before children
  auto depth = [&](std::string id) {
    std::size_t d = 0;
    std::set<std::string> seen;
    while (parents.count(id)) {
      if (!seen.insert(id).second) throw DataError("class hierarchy cycle in turtle input");
      id = parents[id];
      ++d;
    }
    return d;
  };
  std::vector<std::pair<std::size_t, std::string>> by_depth;
  for (const auto& id : class_ids) by_depth.emplace_back(depth(id), id);
  std::sort(by_depth.begin(), by_depth.end());
  try {
    for (const auto& [d, id] : by_depth) {
      OntologyClass c;
      c.id = id;
      c.label = labels.count(id) ? labels[id] : id;
      if (parents.count(id)) c.parent = parents[id];
      if (doc_types.count(id)) c.doc_types = doc_types[id];
      g.add_class(std::move(c));
    }
    std::set<std::string> props(datatype_props.begin(), datatype_props.end());
    props.insert(object_props.begin(), object_props.end());
    // annotation-only properties (ordinal, matchMethod, ...) are not part of the schema
    static const std::map<std::string, PropertyKind> kKinds{{"hasContent", PropertyKind::hasContent},
                                                            {"hasSemanticTerms", PropertyKind::hasSemanticTerms},
                                                            {"hasPart", PropertyKind::hasPart},
                                                            {"isSimilarTo", PropertyKind::isSimilarTo},
                                                            {"hasCategory", PropertyKind::hasCategory}};
    for (const auto& id : props) {
      auto kind = kKinds.find(id);
      if (kind == kKinds.end()) continue;
      OntologyProperty p;
      p.id = id;
      p.kind = kind->second;
      if (domains.count(id)) p.domain = domains[id];
      p.literal_range = literal_range.count(id) > 0;
      p.symmetric = symmetric.count(id) > 0;
      g.add_property(std::move(p));
    }
    for (const auto& [w, p] : parts) g.add_part(w, p);
    for (const auto& [x, y] : similar) g.add_similarity(x, y);
  } catch (const ParameterError& e) {
    throw DataError(std::string("inconsistent ontology turtle: ") + e.what());
  }
  return g;
}

}  // namespace doconto
