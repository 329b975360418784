#pragma once

// Latent Dirichlet allocation by collapsed Gibbs sampling.
//
// Sampling weight for token w in document d:
//   p(t) ∝ (n_dt + α) · (n_tw + β) / (n_t + W·β)

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "doconto/errors.hpp"
#include "doconto/topics/lexicon.hpp"

namespace doconto {

struct TopicModel {
  std::size_t topics = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  TermLexicon lexicon;
  std::vector<std::size_t> topic_term;   // topics × |lexicon|
  std::vector<std::size_t> topic_total;  // topics
  std::vector<std::size_t> doc_topic;    // documents × topics
  std::size_t documents = 0;

  std::size_t terms() const { return lexicon.size(); }
  std::size_t n_tw(std::size_t t, std::size_t w) const { return topic_term[t * terms() + w]; }

  // φ_{t,w} = (n_tw + β) / (n_t + Wβ)
  double phi(std::size_t t, std::size_t w) const {
    return (static_cast<double>(n_tw(t, w)) + beta) /
           (static_cast<double>(topic_total[t]) + static_cast<double>(terms()) * beta);
  }

  // θ_{d,t} = (n_dt + α) / (n_d + Tα) for a training document.
  std::vector<double> theta(std::size_t d) const {
    std::vector<double> out(topics);
    double n = 0.0;
    for (std::size_t t = 0; t < topics; ++t) n += static_cast<double>(doc_topic[d * topics + t]);
    for (std::size_t t = 0; t < topics; ++t)
      out[t] = (static_cast<double>(doc_topic[d * topics + t]) + alpha) / (n + static_cast<double>(topics) * alpha);
    return out;
  }

  bool operator==(const TopicModel&) const = default;
};

struct LdaOptions {
  std::size_t topics = 100;
  std::size_t passes = 10;
  double alpha = 0.0;  // <= 0 selects 50 / topics
  double beta = 0.01;
  std::uint64_t seed = 7;
};

struct LdaDiagnostics {
  std::size_t skipped_empty = 0;
};

// Called after every full sweep with (pass, model).
using SweepObserver = std::function<void(std::size_t, const TopicModel&)>;

namespace detail {

template <class Rng>
std::size_t sample_topic(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double target = unit(rng) * total;
  double acc = 0.0;
  for (std::size_t t = 0; t < weights.size(); ++t) {
    acc += weights[t];
    if (target < acc) return t;
  }
  return weights.size() - 1;
}

inline std::vector<std::size_t> expand_tokens(const SectionBow& bow) {
  std::vector<std::size_t> tokens;
  for (const auto& [w, c] : bow.counts) tokens.insert(tokens.end(), c, w);
  return tokens;
}

}  // namespace detail

inline TopicModel train_lda(std::span<const SectionBow> bows, const TermLexicon& lexicon, const LdaOptions& opt,
                            LdaDiagnostics* diag = nullptr, const SweepObserver& observer = {}) {
  if (opt.topics < 2) throw ParameterError("LDA needs at least 2 topics");
  if (!(opt.beta > 0.0)) throw ParameterError("beta must be positive");
  if (lexicon.size() == 0) throw EmptyLexiconError("LDA lexicon is empty");

  std::vector<std::vector<std::size_t>> docs;
  std::size_t skipped = 0;
  for (const auto& b : bows) {
    if (b.empty()) {
      ++skipped;
      continue;
    }
    for (const auto& [w, c] : b.counts)
      if (w >= lexicon.size()) throw ParameterError("bag-of-words term index outside the lexicon");
    docs.push_back(detail::expand_tokens(b));
  }
  if (diag) diag->skipped_empty = skipped;
  if (docs.empty()) throw DataError("LDA corpus is empty");

  const std::size_t T = opt.topics;
  const std::size_t W = lexicon.size();
  TopicModel m;
  m.topics = T;
  m.alpha = opt.alpha > 0.0 ? opt.alpha : 50.0 / static_cast<double>(T);
  m.beta = opt.beta;
  m.seed = opt.seed;
  m.lexicon = lexicon;
  m.documents = docs.size();
  m.topic_term.assign(T * W, 0);
  m.topic_total.assign(T, 0);
  m.doc_topic.assign(docs.size() * T, 0);

  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> uniform_topic(0, T - 1);
  std::vector<std::vector<std::size_t>> z(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    z[d].resize(docs[d].size());
    for (std::size_t i = 0; i < docs[d].size(); ++i) {
      const std::size_t t = uniform_topic(rng);
      z[d][i] = t;
      ++m.doc_topic[d * T + t];
      ++m.topic_term[t * W + docs[d][i]];
      ++m.topic_total[t];
    }
  }

  const double w_beta = static_cast<double>(W) * m.beta;
  std::vector<double> weights(T);
  for (std::size_t pass = 1; pass <= opt.passes; ++pass) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      for (std::size_t i = 0; i < docs[d].size(); ++i) {
        const std::size_t w = docs[d][i];
        std::size_t t = z[d][i];
        --m.doc_topic[d * T + t];
        --m.topic_term[t * W + w];
        --m.topic_total[t];
        for (std::size_t k = 0; k < T; ++k)
          weights[k] = (static_cast<double>(m.doc_topic[d * T + k]) + m.alpha) *
                       (static_cast<double>(m.topic_term[k * W + w]) + m.beta) /
                       (static_cast<double>(m.topic_total[k]) + w_beta);
        t = detail::sample_topic(weights, rng);
        z[d][i] = t;
        ++m.doc_topic[d * T + t];
        ++m.topic_term[t * W + w];
        ++m.topic_total[t];
      }
    }
    if (observer) observer(pass, m);
  }
  return m;
}

struct TopicPrediction {
  std::vector<double> distribution;                       // sums to 1
  std::vector<std::pair<std::string, double>> top_terms;  // of the argmax topic
  bool no_terms = false;                                  // section had no lexicon terms
  std::size_t topic = 0;                                  // argmax, lowest index on ties
};

// Top-k terms of topic t by φ, ties lexicographic.
inline std::vector<std::pair<std::string, double>> topic_top_terms(const TopicModel& m, std::size_t t, std::size_t k) {
  std::vector<std::pair<std::string, double>> terms;
  terms.reserve(m.terms());
  for (std::size_t w = 0; w < m.terms(); ++w) terms.emplace_back(m.lexicon.terms[w], m.phi(t, w));
  std::stable_sort(terms.begin(), terms.end(),
                   [](const auto& a, const auto& b) { return a.second != b.second ? a.second > b.second : a.first < b.first; });
  if (terms.size() > k) terms.resize(k);
  return terms;
}

// Fold-in Gibbs sampling over one new section with the model counts frozen.
inline TopicPrediction infer_topics(const TopicModel& m, std::string_view section_text, std::size_t sweeps,
                                    std::size_t top_k = 10) {
  const std::size_t T = m.topics;
  TopicPrediction pred;
  const SectionBow bow = to_bow(section_text, m.lexicon);
  const auto tokens = detail::expand_tokens(bow);

  std::vector<std::size_t> n_dt(T, 0);
  if (tokens.empty()) {
    pred.no_terms = true;
  } else {
    std::mt19937_64 rng(m.seed);
    std::uniform_int_distribution<std::size_t> uniform_topic(0, T - 1);
    std::vector<std::size_t> z(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      z[i] = uniform_topic(rng);
      ++n_dt[z[i]];
    }
    const double w_beta = static_cast<double>(m.terms()) * m.beta;
    std::vector<double> weights(T);
    for (std::size_t s = 0; s < sweeps; ++s) {
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        --n_dt[z[i]];
        for (std::size_t k = 0; k < T; ++k)
          weights[k] = (static_cast<double>(n_dt[k]) + m.alpha) * (static_cast<double>(m.n_tw(k, tokens[i])) + m.beta) /
                       (static_cast<double>(m.topic_total[k]) + w_beta);
        z[i] = detail::sample_topic(weights, rng);
        ++n_dt[z[i]];
      }
    }
  }

  const double denom = static_cast<double>(tokens.size()) + static_cast<double>(T) * m.alpha;
  pred.distribution.resize(T);
  for (std::size_t t = 0; t < T; ++t) pred.distribution[t] = (static_cast<double>(n_dt[t]) + m.alpha) / denom;
  pred.topic = static_cast<std::size_t>(std::max_element(pred.distribution.begin(), pred.distribution.end()) -
                                        pred.distribution.begin());
  if (!pred.no_terms) pred.top_terms = topic_top_terms(m, pred.topic, top_k);
  return pred;
}

// The k most probable terms of the section's argmax topic; empty when the
// section contains no lexicon term.
inline std::vector<std::pair<std::string, double>> semantic_terms(const TopicModel& m, std::string_view section_text,
                                                                  std::size_t k, std::size_t sweeps = 50) {
  if (k < 1) throw ParameterError("k must be >= 1");
  return infer_topics(m, section_text, sweeps, k).top_terms;
}

inline nlohmann::json to_json(const TopicModel& m) {
  return {{"mode", std::string(to_string(m.lexicon.mode))},
          {"topics", m.topics},
          {"alpha", m.alpha},
          {"beta", m.beta},
          {"seed", m.seed},
          {"documents", m.documents},
          {"lexicon", to_json(m.lexicon)},
          {"topic_term", m.topic_term},
          {"topic_total", m.topic_total},
          {"doc_topic", m.doc_topic}};
}

inline TopicModel topic_model_from_json(const nlohmann::json& j) {
  try {
    TopicModel m;
    m.topics = j.at("topics");
    m.alpha = j.at("alpha");
    m.beta = j.at("beta");
    m.seed = j.at("seed");
    m.documents = j.at("documents");
    m.lexicon = lexicon_from_json(j.at("lexicon"));
    m.topic_term = j.at("topic_term").get<std::vector<std::size_t>>();
    m.topic_total = j.at("topic_total").get<std::vector<std::size_t>>();
    m.doc_topic = j.at("doc_topic").get<std::vector<std::size_t>>();
    if (m.topic_term.size() != m.topics * m.terms() || m.topic_total.size() != m.topics ||
        m.doc_topic.size() != m.documents * m.topics)
      throw DataError("topic model count matrices have inconsistent sizes");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed topic model: ") + e.what());
  }
}

}  // namespace doconto
