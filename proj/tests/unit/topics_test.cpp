#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "../support/synthetic.hpp"
#include "doconto/topics.hpp"

using namespace doconto;

namespace {

// n sections; `with` of them contain `term`, every section contains "filler<i>".
std::vector<std::string> sections_with(std::size_t n, std::initializer_list<std::pair<const char*, std::size_t>> terms) {
  std::vector<std::string> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = "filler" + std::to_string(i);
  for (auto [t, k] : terms)
    for (std::size_t i = 0; i < k; ++i) out[i] += std::string(" ") + t;
  return out;
}

TermLexicon manual_lexicon(std::vector<std::string> terms, LexiconMode mode = LexiconMode::word) {
  TermLexicon lex;
  lex.mode = mode;
  lex.terms = std::move(terms);
  lex.section_frequency.assign(lex.terms.size(), 1);
  lex.sections = 1;
  lex.reindex();
  return lex;
}

struct Trained {
  doconto::testing::TwoTopicCorpus corpus;
  TopicModel model;
  std::vector<SectionBow> bows;
};

const Trained& two_topic_model() {
  static const Trained t = [] {
    Trained r;
    r.corpus = doconto::testing::two_topic_corpus(17);
    auto lex = build_lexicon(r.corpus.docs, LexiconMode::word, 1, 0.6);
    for (const auto& d : r.corpus.docs) r.bows.push_back(to_bow(d, lex));
    LdaOptions opt;
    opt.topics = 2;
    opt.passes = 200;
    opt.alpha = 0.5;
    opt.seed = 3;
    r.model = train_lda(r.bows, lex, opt);
    return r;
  }();
  return t;
}

int vocabulary_of(const std::string& term) { return term.rfind("alpha", 0) == 0 ? 0 : 1; }

}  // namespace

TEST(BuildLexicon, SectionFrequencyFilters) {
  auto lex = build_lexicon(sections_with(1000, {{"rare", 19}, {"common", 110}, {"kept", 20}, {"edge", 100}}),
                           LexiconMode::word, 20, 0.10);
  EXPECT_FALSE(lex.find("rare"));
  EXPECT_FALSE(lex.find("common"));
  EXPECT_TRUE(lex.find("kept"));
  EXPECT_TRUE(lex.find("edge"));
  EXPECT_EQ(lex.size(), 2u);
  EXPECT_EQ(lex.terms[0], "edge");
  EXPECT_EQ(lex.sections, 1000u);
}

TEST(BuildLexicon, CapDropsLeastFrequent) {
  // 100000 terms in 2 of 20 sections, one term in a single section
  std::vector<std::string> sections(20);
  for (std::size_t i = 0; i < 100000; ++i) {
    const std::string t = "t" + std::to_string(i);
    sections[i % 10] += t + " ";
    sections[10 + i % 10] += t + " ";
  }
  sections[0] += "lonely";
  auto lex = build_lexicon(sections, LexiconMode::word, 1, 0.10, 100000);
  EXPECT_EQ(lex.size(), 100000u);
  EXPECT_FALSE(lex.find("lonely"));
}

TEST(BuildLexicon, Errors) {
  std::vector<std::string> none;
  EXPECT_THROW(build_lexicon(none, LexiconMode::word), ParameterError);
  EXPECT_THROW(build_lexicon(sections_with(10, {}), LexiconMode::word, 1, 1.5), ParameterError);
  EXPECT_THROW(build_lexicon(sections_with(10, {}), LexiconMode::word, 5, 0.5), EmptyLexiconError);
}

TEST(BuildLexicon, PhraseModeCountsNGrams) {
  auto lex = build_lexicon(sections_with(10, {{"neural network model", 3}}), LexiconMode::phrase, 3, 0.5);
  EXPECT_TRUE(lex.find("neural"));
  EXPECT_TRUE(lex.find("neural network"));
  EXPECT_TRUE(lex.find("neural network model"));
}

TEST(ToBow, BigramWindows) {
  auto lex = manual_lexicon({"deep learning"}, LexiconMode::bigram);
  auto bow = to_bow("deep learning deep learning", lex);
  ASSERT_EQ(bow.counts.size(), 1u);
  EXPECT_EQ(bow.counts.at(0), 2u);
}

TEST(ToBow, NoTermsAndWordMode) {
  auto lex = manual_lexicon({"cat"});
  EXPECT_TRUE(to_bow("nothing here", lex).empty());
  auto bow = to_bow("the the cat", lex);
  EXPECT_EQ(bow.total(), 1u);
  EXPECT_EQ(bow.counts.at(0), 1u);
  EXPECT_EQ(to_bow("The CAT.", lex).total(), 1u);
}

TEST(Lexicon, JsonRoundTrip) {
  auto lex = build_lexicon(sections_with(10, {{"a b", 3}}), LexiconMode::phrase, 3, 0.5);
  EXPECT_EQ(lexicon_from_json(nlohmann::json::parse(to_json(lex).dump())), lex);
}

TEST(TrainLda, RecoversDisjointTopics) {
  const auto& t = two_topic_model();
  for (std::size_t topic = 0; topic < 2; ++topic) {
    auto top = topic_top_terms(t.model, topic, 5);
    ASSERT_EQ(top.size(), 5u);
    std::set<int> sources;
    for (const auto& [term, p] : top) sources.insert(vocabulary_of(term));
    EXPECT_EQ(sources.size(), 1u) << "topic " << topic;
  }
}

TEST(TrainLda, DeterministicCounts) {
  const auto& t = two_topic_model();
  LdaOptions opt;
  opt.topics = 2;
  opt.passes = 200;
  opt.alpha = 0.5;
  opt.seed = 3;
  auto again = train_lda(t.bows, t.model.lexicon, opt);
  EXPECT_EQ(again.topic_term, t.model.topic_term);
  EXPECT_EQ(again.doc_topic, t.model.doc_topic);
}

TEST(TrainLda, SingleTermCorpus) {
  auto lex = manual_lexicon({"only", "other"});
  std::vector<SectionBow> bows(20, to_bow("only only", lex));
  LdaOptions opt;
  opt.topics = 2;
  opt.passes = 20;
  auto m = train_lda(bows, lex, opt);
  for (std::size_t topic = 0; topic < 2; ++topic) EXPECT_GE(m.phi(topic, 0), m.phi(topic, 1));
}

TEST(TrainLda, CountsConservedEverySweep) {
  const auto& t = two_topic_model();
  std::size_t tokens = 0;
  for (const auto& b : t.bows) tokens += b.total();
  LdaOptions opt;
  opt.topics = 3;
  opt.passes = 10;
  std::size_t calls = 0;
  train_lda(t.bows, t.model.lexicon, opt, nullptr, [&](std::size_t, const TopicModel& m) {
    ++calls;
    EXPECT_EQ(std::accumulate(m.topic_total.begin(), m.topic_total.end(), std::size_t{0}), tokens);
    EXPECT_EQ(std::accumulate(m.topic_term.begin(), m.topic_term.end(), std::size_t{0}), tokens);
    for (std::size_t d = 0; d < m.documents; ++d) {
      std::size_t row = 0;
      for (std::size_t k = 0; k < m.topics; ++k) row += m.doc_topic[d * m.topics + k];
      EXPECT_EQ(row, t.bows[d].total());
    }
  });
  EXPECT_EQ(calls, 10u);
}

TEST(TrainLda, EmptyInputs) {
  auto lex = manual_lexicon({"x"});
  std::vector<SectionBow> empty(3);
  LdaOptions opt;
  opt.topics = 2;
  LdaDiagnostics diag;
  EXPECT_THROW(train_lda(empty, lex, opt, &diag), DataError);
  EXPECT_EQ(diag.skipped_empty, 3u);
  opt.topics = 1;
  EXPECT_THROW(train_lda(empty, lex, opt), ParameterError);
}

TEST(InferTopics, EmptySectionIsUniform) {
  const auto& t = two_topic_model();
  auto p = infer_topics(t.model, "", 50);
  EXPECT_TRUE(p.no_terms);
  EXPECT_TRUE(p.top_terms.empty());
  for (double v : p.distribution) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(InferTopics, TrainingDocumentConcentrates) {
  const auto& t = two_topic_model();
  // map each learned topic to the vocabulary of its top term
  std::vector<int> topic_truth;
  for (std::size_t k = 0; k < 2; ++k) topic_truth.push_back(vocabulary_of(topic_top_terms(t.model, k, 1)[0].first));
  for (std::size_t d = 0; d < 20; ++d) {
    auto p = infer_topics(t.model, t.corpus.docs[d], 50);
    double mass = 0.0;
    for (std::size_t k = 0; k < 2; ++k)
      if (topic_truth[k] == t.corpus.truth[d]) mass += p.distribution[k];
    EXPECT_GE(mass, 0.8) << "doc " << d;
    EXPECT_EQ(p.distribution, infer_topics(t.model, t.corpus.docs[d], 50).distribution);
  }
}

TEST(SemanticTerms, FromTheSectionsTopic) {
  const auto& t = two_topic_model();
  for (std::size_t d = 0; d < 6; ++d) {
    auto terms = semantic_terms(t.model, t.corpus.docs[d], 3);
    ASSERT_EQ(terms.size(), 3u);
    for (const auto& [term, p] : terms) EXPECT_EQ(vocabulary_of(term), t.corpus.truth[d]) << term;
    for (std::size_t i = 1; i < terms.size(); ++i) EXPECT_GE(terms[i - 1].second, terms[i].second);
    EXPECT_EQ(terms, semantic_terms(t.model, t.corpus.docs[d], 3));
  }
  EXPECT_EQ(semantic_terms(t.model, t.corpus.docs[0], 1000).size(), t.model.terms());
  EXPECT_THROW(semantic_terms(t.model, t.corpus.docs[0], 0), ParameterError);
}

TEST(TopicModel, JsonRoundTrip) {
  const auto& t = two_topic_model();
  EXPECT_EQ(topic_model_from_json(nlohmann::json::parse(to_json(t.model).dump())), t.model);
}
