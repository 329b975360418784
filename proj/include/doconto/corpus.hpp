#pragma once

// Sectioned-document corpora: the JSONL input schema, header normalization
// and the tokenizer shared by every downstream stage.

#include <cctype>
#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "doconto/errors.hpp"

namespace doconto {

enum class DocType { academic, rfp };
enum class HeaderLevel { top, subsection, subsubsection };
enum class ReadKind { headers_only, full };

inline std::string_view to_string(DocType t) { return t == DocType::academic ? "academic" : "rfp"; }

inline std::string_view to_string(HeaderLevel l) {
  switch (l) {
    case HeaderLevel::top: return "top";
    case HeaderLevel::subsection: return "subsection";
    case HeaderLevel::subsubsection: return "subsubsection";
  }
  return "top";
}

inline std::optional<DocType> parse_doc_type(std::string_view s) {
  if (s == "academic") return DocType::academic;
  if (s == "rfp") return DocType::rfp;
  return std::nullopt;
}

inline std::optional<HeaderLevel> parse_header_level(std::string_view s) {
  if (s == "top") return HeaderLevel::top;
  if (s == "subsection") return HeaderLevel::subsection;
  if (s == "subsubsection") return HeaderLevel::subsubsection;
  return std::nullopt;
}

struct RawHeader {
  HeaderLevel level = HeaderLevel::top;
  std::string text;

  bool operator==(const RawHeader&) const = default;
};

struct SectionText {
  RawHeader header;
  std::string body;  // may be empty

  bool operator==(const SectionText&) const = default;
};

struct DocumentRecord {
  std::string doc_id;
  DocType doc_type = DocType::academic;
  std::optional<std::string> category;
  std::vector<RawHeader> headers;     // document order
  std::vector<SectionText> sections;  // empty for headers-only reads

  bool operator==(const DocumentRecord&) const = default;
};

struct HeaderRecord {
  std::string doc_id;
  HeaderLevel level = HeaderLevel::top;
  std::string normalized;
  std::vector<std::string> tokens;

  bool operator==(const HeaderRecord&) const = default;
};

struct Diagnostic {
  std::size_t line = 0;  // 1-based; 0 when not tied to an input line
  std::string message;
};

namespace detail {

inline bool is_space(unsigned char c) { return std::isspace(c) != 0; }
inline bool is_enumeration(unsigned char c) { return std::isdigit(c) != 0 || c == '.' || is_space(c); }

}  // namespace detail

// Strips the leading run of digits, dots and whitespace, lowercases, collapses
// inner whitespace to single spaces and trims. Roman numerals are kept.
inline std::string normalize_header(std::string_view raw) {
  std::size_t start = 0;
  while (start < raw.size() && detail::is_enumeration(static_cast<unsigned char>(raw[start]))) ++start;

  std::string out;
  out.reserve(raw.size() - start);
  bool pending_space = false;
  for (std::size_t i = start; i < raw.size(); ++i) {
    const auto c = static_cast<unsigned char>(raw[i]);
    if (detail::is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

// Whitespace split; surrounding ASCII punctuation is stripped from each token
// and empty tokens are dropped.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && detail::is_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !detail::is_space(static_cast<unsigned char>(text[j]))) ++j;
    std::size_t b = i, e = j;
    while (b < e && std::ispunct(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(text[e - 1]))) --e;
    if (e > b) tokens.emplace_back(text.substr(b, e - b));
    i = j;
  }
  return tokens;
}

namespace detail {

inline bool blank(std::string_view s) {
  for (unsigned char c : s)
    if (!is_space(c)) return false;
  return true;
}

inline RawHeader parse_raw_header(const nlohmann::json& j, std::string_view where) {
  if (!j.is_object()) throw DataError(std::string(where) + ": header must be an object");
  auto lv = j.find("level");
  auto tx = j.find("text");
  if (lv == j.end() || !lv->is_string()) throw DataError(std::string(where) + ": missing string field 'level'");
  if (tx == j.end() || !tx->is_string()) throw DataError(std::string(where) + ": missing string field 'text'");
  auto level = parse_header_level(lv->get<std::string>());
  if (!level) throw DataError(std::string(where) + ": unknown level '" + lv->get<std::string>() + "'");
  RawHeader h{*level, tx->get<std::string>()};
  if (blank(h.text)) throw DataError(std::string(where) + ": header text is empty");
  return h;
}

}  // namespace detail

// Parses one JSONL line. Throws DataError describing the first schema violation.
inline DocumentRecord parse_document(std::string_view line, ReadKind kind) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("document must be a JSON object");

  DocumentRecord doc;
  auto id = j.find("doc_id");
  if (id == j.end() || !id->is_string() || id->get<std::string>().empty())
    throw DataError("doc_id must be a non-empty string");
  doc.doc_id = id->get<std::string>();

  auto type = j.find("doc_type");
  if (type == j.end() || !type->is_string()) throw DataError("doc_type must be a string");
  auto dt = parse_doc_type(type->get<std::string>());
  if (!dt) throw DataError("doc_type must be \"academic\" or \"rfp\"");
  doc.doc_type = *dt;

  if (auto cat = j.find("category"); cat != j.end() && !cat->is_null()) {
    if (!cat->is_string()) throw DataError("category must be a string or null");
    doc.category = cat->get<std::string>();
  }

  auto headers = j.find("headers");
  if (headers == j.end() || !headers->is_array()) throw DataError("headers must be an array");
  for (std::size_t i = 0; i < headers->size(); ++i)
    doc.headers.push_back(detail::parse_raw_header((*headers)[i], "headers[" + std::to_string(i) + "]"));

  if (kind == ReadKind::full) {
    if (auto secs = j.find("sections"); secs != j.end() && !secs->is_null()) {
      if (!secs->is_array()) throw DataError("sections must be an array");
      for (std::size_t i = 0; i < secs->size(); ++i) {
        const auto& s = (*secs)[i];
        const std::string where = "sections[" + std::to_string(i) + "]";
        if (!s.is_object() || !s.contains("header")) throw DataError(where + ": missing 'header'");
        SectionText st;
        st.header = detail::parse_raw_header(s["header"], where + ".header");
        if (auto body = s.find("body"); body != s.end() && !body->is_null()) {
          if (!body->is_string()) throw DataError(where + ": body must be a string");
          st.body = body->get<std::string>();
        }
        doc.sections.push_back(std::move(st));
      }
    }
  }
  return doc;
}

inline nlohmann::json to_json(const DocumentRecord& doc) {
  auto header = [](const RawHeader& h) {
    return nlohmann::json{{"level", std::string(to_string(h.level))}, {"text", h.text}};
  };
  nlohmann::json j;
  j["doc_id"] = doc.doc_id;
  j["doc_type"] = std::string(to_string(doc.doc_type));
  j["category"] = doc.category ? nlohmann::json(*doc.category) : nlohmann::json(nullptr);
  j["headers"] = nlohmann::json::array();
  for (const auto& h : doc.headers) j["headers"].push_back(header(h));
  j["sections"] = nlohmann::json::array();
  for (const auto& s : doc.sections) j["sections"].push_back({{"header", header(s.header)}, {"body", s.body}});
  return j;
}

// Sequential single-consumer stream over a JSONL corpus. Malformed lines are
// recorded as diagnostics and skipped; reading continues.
class CorpusReader {
 public:
  CorpusReader(const std::string& path, ReadKind kind) : in_(path), path_(path), kind_(kind) {
    if (!in_) throw DataError("cannot open corpus '" + path + "'");
  }

  std::optional<DocumentRecord> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (detail::blank(line)) continue;
      try {
        DocumentRecord doc = parse_document(line, kind_);
        if (!seen_.insert(doc.doc_id).second) throw DataError("duplicate doc_id '" + doc.doc_id + "'");
        return doc;
      } catch (const DataError& e) {
        diagnostics_.push_back({line_no_, e.what()});
      }
    }
    if (in_.bad()) throw DataError("I/O error while reading '" + path_ + "'");
    return std::nullopt;
  }

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::ifstream in_;
  std::string path_;
  ReadKind kind_;
  std::size_t line_no_ = 0;
  std::unordered_set<std::string> seen_;
  std::vector<Diagnostic> diagnostics_;
};

inline CorpusReader read_corpus(const std::string& path, ReadKind kind) { return CorpusReader(path, kind); }

struct Corpus {
  std::vector<DocumentRecord> documents;
  std::vector<Diagnostic> diagnostics;
};

inline Corpus read_all(const std::string& path, ReadKind kind) {
  CorpusReader reader(path, kind);
  Corpus c;
  while (auto doc = reader.next()) c.documents.push_back(std::move(*doc));
  c.diagnostics = reader.diagnostics();
  return c;
}

inline HeaderRecord make_header_record(std::string doc_id, HeaderLevel level, std::string_view raw) {
  HeaderRecord r;
  r.doc_id = std::move(doc_id);
  r.level = level;
  r.normalized = normalize_header(raw);
  r.tokens = tokenize(r.normalized);
  return r;
}

// Normalized headers of every document, in corpus order. Headers that
// normalize to the empty string are dropped and reported.
inline std::vector<HeaderRecord> header_records(const std::vector<DocumentRecord>& docs,
                                                std::vector<Diagnostic>* dropped = nullptr) {
  std::vector<HeaderRecord> out;
  for (const auto& doc : docs) {
    for (const auto& h : doc.headers) {
      HeaderRecord r = make_header_record(doc.doc_id, h.level, h.text);
      if (r.normalized.empty()) {
        if (dropped) dropped->push_back({0, "doc '" + doc.doc_id + "': header '" + h.text + "' is empty after normalization"});
        continue;
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace doconto
