#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "doconto/corpus.hpp"
#include "doconto/headcount.hpp"

using namespace doconto;

namespace {

std::string write_tmp(const std::string& name, const std::string& content) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << content;
  return p.string();
}

const char* kDocA =
    R"({"doc_id":"a","doc_type":"academic","headers":[{"level":"top","text":"1. Introduction"}],"sections":[{"header":{"level":"top","text":"1. Introduction"},"body":"hello"}]})";
const char* kDocB = R"({"doc_id":"b","doc_type":"rfp","category":"it","headers":[{"level":"top","text":"Scope"}]})";

}  // namespace

TEST(NormalizeHeader, StripsEnumerationAndCollapses) {
  EXPECT_EQ(normalize_header("1.2. Introduction"), "introduction");
  EXPECT_EQ(normalize_header("  3 Related   Work"), "related work");
  EXPECT_EQ(normalize_header("Conclusion"), "conclusion");
  EXPECT_EQ(normalize_header("4.1"), "");
  EXPECT_EQ(normalize_header("2\tBackground \n"), "background");
}

TEST(Tokenize, SplitsAndStripsPunctuation) {
  EXPECT_EQ(tokenize("proof of theorem"), (std::vector<std::string>{"proof", "of", "theorem"}));
  EXPECT_EQ(tokenize("results, and discussion"), (std::vector<std::string>{"results", "and", "discussion"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize(" ... ").empty());
}

TEST(ReadCorpus, TwoValidLines) {
  auto path = write_tmp("doconto_two.jsonl", std::string(kDocA) + "\n" + kDocB + "\n");
  Corpus c = read_all(path, ReadKind::full);
  ASSERT_EQ(c.documents.size(), 2u);
  EXPECT_TRUE(c.diagnostics.empty());
  EXPECT_EQ(c.documents[0].sections.size(), 1u);
  EXPECT_EQ(c.documents[1].category.value(), "it");
  EXPECT_EQ(c.documents[1].doc_type, DocType::rfp);
}

TEST(ReadCorpus, EmptyFile) {
  auto path = write_tmp("doconto_empty.jsonl", "");
  Corpus c = read_all(path, ReadKind::headers_only);
  EXPECT_TRUE(c.documents.empty());
  EXPECT_TRUE(c.diagnostics.empty());
}

TEST(ReadCorpus, MalformedLineReportedWithLineNumber) {
  auto path = write_tmp("doconto_bad.jsonl", std::string(kDocA) + "\n{not json\n");
  Corpus c = read_all(path, ReadKind::full);
  ASSERT_EQ(c.documents.size(), 1u);
  ASSERT_EQ(c.diagnostics.size(), 1u);
  EXPECT_EQ(c.diagnostics[0].line, 2u);
}

TEST(ReadCorpus, DuplicateIdIsDiagnostic) {
  auto path = write_tmp("doconto_dup.jsonl", std::string(kDocA) + "\n" + kDocA + "\n");
  Corpus c = read_all(path, ReadKind::full);
  EXPECT_EQ(c.documents.size(), 1u);
  EXPECT_EQ(c.diagnostics.size(), 1u);
}

TEST(ReadCorpus, MissingFileThrows) { EXPECT_THROW(read_all("/nonexistent/x.jsonl", ReadKind::full), DataError); }

TEST(ReadCorpus, SchemaViolations) {
  EXPECT_THROW(parse_document(R"({"doc_id":"","doc_type":"academic","headers":[]})", ReadKind::full), DataError);
  EXPECT_THROW(parse_document(R"({"doc_id":"x","doc_type":"memo","headers":[]})", ReadKind::full), DataError);
  EXPECT_THROW(parse_document(R"({"doc_id":"x","doc_type":"rfp","headers":[{"level":"h9","text":"a"}]})", ReadKind::full),
               DataError);
}

TEST(DocumentJson, RoundTrips) {
  auto d = parse_document(kDocA, ReadKind::full);
  EXPECT_EQ(parse_document(to_json(d).dump(), ReadKind::full), d);
}

TEST(HeaderRecords, DropsHeadersEmptyAfterNormalization) {
  DocumentRecord d;
  d.doc_id = "x";
  d.headers = {{HeaderLevel::top, "1."}, {HeaderLevel::top, "2. Methods"}};
  std::vector<Diagnostic> dropped;
  auto hs = header_records({d}, &dropped);
  ASSERT_EQ(hs.size(), 1u);
  EXPECT_EQ(hs[0].normalized, "methods");
  EXPECT_EQ(dropped.size(), 1u);
}

namespace {
std::vector<HeaderRecord> records(std::initializer_list<const char*> raws) {
  std::vector<HeaderRecord> out;
  for (auto r : raws) out.push_back(make_header_record("d", HeaderLevel::top, r));
  return out;
}
}  // namespace

TEST(CountHeaders, ExactCounts) {
  auto t = count_headers(records({"introduction", "introduction", "methods"}));
  EXPECT_EQ(t.count("introduction"), 2u);
  EXPECT_EQ(t.count("methods"), 1u);
  EXPECT_EQ(t.total, 3u);
  EXPECT_EQ(count_headers(std::vector<HeaderRecord>{}).total, 0u);
  EXPECT_EQ(count_headers(records({"1. Intro", "2 Intro", "intro"})).count("intro"), 3u);
}

TEST(CountHeaders, OrderIndependentAndMergeable) {
  auto a = records({"a", "b", "a", "c"});
  auto b = records({"c", "a", "b", "a"});
  EXPECT_EQ(count_headers(a), count_headers(b));
  auto left = count_headers(std::span(a).subspan(0, 2));
  left.merge(count_headers(std::span(a).subspan(2)));
  EXPECT_EQ(left, count_headers(a));
}

TEST(CountHeaders, PerDocumentCountsOnce) {
  std::vector<HeaderRecord> hs{make_header_record("d1", HeaderLevel::top, "x"), make_header_record("d1", HeaderLevel::top, "x"),
                               make_header_record("d2", HeaderLevel::top, "x")};
  EXPECT_EQ(count_headers(hs, true).count("x"), 2u);
}

TEST(SelectCandidates, ThresholdAndTies) {
  auto t = count_headers(records({"introduction", "introduction", "methods"}));
  auto c = select_candidates(t, 2);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].label, "introduction");
  EXPECT_EQ(c[0].rank, 1u);
  EXPECT_EQ(select_candidates(t, 1).size(), 2u);

  FrequencyTable ab;
  ab.entries = {{"b", 5}, {"a", 5}};
  auto tie = select_candidates(ab, 5);
  ASSERT_EQ(tie.size(), 2u);
  EXPECT_EQ(tie[0].label, "a");
  EXPECT_EQ(tie[1].rank, 2u);
  EXPECT_THROW(select_candidates(ab, 0), ParameterError);
}

TEST(SelectCandidates, TsvRoundTrip) {
  auto c = select_candidates(count_headers(records({"a", "a", "b"})), 1);
  std::stringstream ss;
  write_candidates_tsv(ss, c);
  auto back = read_candidates_tsv(ss);
  ASSERT_EQ(back.size(), c.size());
  EXPECT_EQ(back[0].label, "a");
  EXPECT_EQ(back[0].count, 2u);
}
