#pragma once

// File-to-file stage functions shared by the CLI subcommands and the
// pipeline runner.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "doconto/corpus.hpp"
#include "doconto/encoder.hpp"
#include "doconto/errors.hpp"
#include "doconto/headcount.hpp"
#include "doconto/manifold.hpp"
#include "doconto/ontology.hpp"
#include "doconto/pipeline/plot.hpp"
#include "doconto/topics.hpp"

namespace doconto::stages {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot open '" + p.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot open '" + p.string() + "'");
  return in;
}

inline void write_file(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + p.string() + "'");
  out << content;
  if (!out) throw DataError("write failed for '" + p.string() + "'");
}

inline nlohmann::json read_json(const fs::path& p) {
  try {
    return nlohmann::json::parse(read_file(p));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("'" + p.string() + "': " + e.what());
  }
}

// ---- ingest

struct IngestSummary {
  std::size_t documents = 0;
  std::size_t headers = 0;
  std::size_t sections = 0;
  std::size_t diagnostics = 0;
};

// documents.jsonl (normalized records), headers.tsv (doc_id, level,
// normalized header), diagnostics.txt.
inline IngestSummary ingest(const fs::path& corpus, const fs::path& documents_out, const fs::path& headers_out,
                            const fs::path& diagnostics_out) {
  Corpus c = read_all(corpus.string(), ReadKind::full);
  std::vector<Diagnostic> dropped;
  const auto headers = header_records(c.documents, &dropped);

  IngestSummary s;
  std::ostringstream docs, hdrs, diag;
  for (const auto& d : c.documents) {
    docs << to_json(d).dump() << '\n';
    s.sections += d.sections.size();
  }
  for (const auto& h : headers) hdrs << h.doc_id << '\t' << to_string(h.level) << '\t' << h.normalized << '\n';
  for (const auto& d : c.diagnostics) diag << "line " << d.line << ": " << d.message << '\n';
  for (const auto& d : dropped) diag << d.message << '\n';

  write_file(documents_out, docs.str());
  write_file(headers_out, hdrs.str());
  write_file(diagnostics_out, diag.str());
  s.documents = c.documents.size();
  s.headers = headers.size();
  s.diagnostics = c.diagnostics.size() + dropped.size();
  return s;
}

inline std::vector<DocumentRecord> read_documents(const fs::path& p) {
  auto in = open_in(p);
  std::vector<DocumentRecord> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(parse_document(line, ReadKind::full));
  return out;
}

inline std::vector<HeaderRecord> read_headers(const fs::path& p) {
  auto in = open_in(p);
  std::vector<HeaderRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() != 3) throw DataError(p.string() + ":" + std::to_string(n) + ": expected 3 columns");
    auto level = parse_header_level(f[1]);
    if (!level) throw DataError(p.string() + ":" + std::to_string(n) + ": unknown level");
    HeaderRecord r;
    r.doc_id = f[0];
    r.level = *level;
    r.normalized = f[2];
    r.tokens = tokenize(r.normalized);
    out.push_back(std::move(r));
  }
  return out;
}

// First-occurrence order of distinct normalized headers.
// ---- count

inline std::size_t count(const fs::path& headers_in, const fs::path& candidates_out, const fs::path& frequencies_out,
                         std::size_t min_count, bool per_document) {
  const auto headers = read_headers(headers_in);
  const FrequencyTable table = count_headers(headers, per_document);
  const auto cands = select_candidates(table, min_count);
  std::ostringstream c, f;
  write_candidates_tsv(c, cands);
  write_candidates_tsv(f, select_candidates(table, 1));
  write_file(candidates_out, c.str());
  write_file(frequencies_out, f.str());
  return cands.size();
}

inline FrequencyTable read_frequencies(const fs::path& p) {
  auto in = open_in(p);
  return table_from_candidates(read_candidates_tsv(in));
}

// ---- train

enum class ModelKind { vae, cae };

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "vae") return ModelKind::vae;
  if (s == "cae") return ModelKind::cae;
  throw ParameterError("unknown model '" + std::string(s) + "' (expected vae or cae)");
}

struct VocabOptions {
  std::size_t max_size = 10000;
  std::size_t min_token_count = 1;
};

inline std::vector<EpochLoss> train(ModelKind kind, const fs::path& headers_in, const fs::path& model_out,
                                    const fs::path& loss_out, const TrainConfig& cfg, const VocabOptions& vopt) {
  const auto headers = read_headers(headers_in);
  if (headers.empty()) throw DataError("no headers to train on");
  Vocabulary vocab = build_vocabulary(headers, vopt.max_size, vopt.min_token_count);
  std::vector<EncodedHeader> encoded;
  encoded.reserve(headers.size());
  for (const auto& h : headers) encoded.push_back(encode_header(h, vocab, cfg.length));

  std::vector<EpochLoss> history;
  nlohmann::json j;
  if (kind == ModelKind::vae) {
    auto r = train_vae(encoded, vocab.size(), cfg);
    history = r.history;
    j = to_json(VaeCheckpoint{std::move(r.params), std::move(vocab), cfg});
  } else {
    auto r = train_cae(encoded, vocab.size(), cfg);
    history = r.history;
    j = to_json(CaeCheckpoint{std::move(r.params), std::move(vocab), cfg});
  }
  std::ostringstream loss;
  write_loss_csv(loss, history);
  write_file(model_out, j.dump());
  write_file(loss_out, loss.str());
  return history;
}

// ---- embed

inline std::size_t embed(const fs::path& model_in, const fs::path& headers_in, const fs::path& embeddings_out) {
  const Checkpoint ck = checkpoint_from_json(read_json(model_in));
  const auto headers = read_headers(headers_in);
  // one row per header occurrence; repeated headers give identical rows
  std::vector<std::string> labels;
  for (const auto& h : headers) labels.push_back(h.normalized);

  EmbeddingMatrix m = std::visit(
      [&](const auto& c) {
        std::vector<EncodedHeader> enc;
        for (const auto& h : headers) enc.push_back(encode_header(h, c.vocabulary, c.config.length));
        return embed_headers(c.params, enc, labels);
      },
      ck);
  std::ostringstream os;
  write_embedding_tsv(os, m);
  write_file(embeddings_out, os.str());
  return m.size();
}

inline EmbeddingMatrix read_embeddings(const fs::path& p) {
  auto in = open_in(p);
  return read_embedding_tsv(in);
}

// ---- tsne

inline TsneResult tsne(const fs::path& embeddings_in, const fs::path& lowdim_out, const fs::path& stats_out,
                       const TsneOptions& opt) {
  const auto em = read_embeddings(embeddings_in);
  TsneResult r = doconto::tsne(em, opt);
  std::ostringstream os;
  write_lowdim_tsv(os, r.embedding);
  write_file(lowdim_out, os.str());
  double worst = 0.0;
  for (double p : r.achieved_perplexity) worst = std::max(worst, std::abs(p - opt.perplexity));
  nlohmann::json stats{{"points", r.embedding.size()},
                       {"post_exaggeration_kl", r.post_exaggeration_kl},
                       {"final_kl", r.final_kl},
                       {"max_perplexity_error", worst}};
  write_file(stats_out, stats.dump(2) + "\n");
  return r;
}

inline LowDimEmbedding read_lowdim(const fs::path& p) {
  auto in = open_in(p);
  return read_lowdim_tsv(in);
}

// ---- cluster

struct ClusterOptions {
  std::size_t k = 8;
  std::size_t max_iter = 300;
  std::size_t restarts = 10;
  std::uint64_t seed = 7;
};

inline ClusterAssignment cluster(const fs::path& lowdim_in, const fs::path& assignment_out,
                                 const fs::path& centroids_out, const ClusterOptions& opt) {
  const auto low = read_lowdim(lowdim_in);
  if (opt.k > low.size()) throw ParameterError("k = " + std::to_string(opt.k) + " exceeds the " +
                                               std::to_string(low.size()) + " points");
  ClusterAssignment a = kmeans(low.points, opt.k, opt.seed, opt.max_iter, opt.restarts);
  std::ostringstream as, cs;
  write_assignment_tsv(as, low.labels, a);
  write_centroids_tsv(cs, a.centroids);
  write_file(assignment_out, as.str());
  write_file(centroids_out, cs.str());
  return a;
}

inline ClusterAssignment read_clusters(const fs::path& assignment_in, const fs::path& centroids_in,
                                       std::vector<std::string>* labels = nullptr) {
  auto a = open_in(assignment_in);
  auto c = open_in(centroids_in);
  return read_assignment(a, c, labels);
}

// ---- summarize

struct SummaryOptions {
  std::size_t top_headers = 5;
  std::size_t similar_pairs = 10;
};

inline std::vector<ClusterSummary> summarize(const fs::path& lowdim_in, const fs::path& assignment_in,
                                             const fs::path& centroids_in, const fs::path& frequencies_in,
                                             const fs::path& summaries_out, const SummaryOptions& opt) {
  const auto low = read_lowdim(lowdim_in);
  std::vector<std::string> labels;
  const auto assign = read_clusters(assignment_in, centroids_in, &labels);
  if (labels != low.labels) throw DataError("cluster assignment does not match the 2-D embedding");
  const FrequencyTable freq = read_frequencies(frequencies_in);
  auto summaries = summarize_clusters(assign, low.points, labels, freq, opt.top_headers);

  nlohmann::json j{{"clusters", nlohmann::json::array()}, {"similar", nlohmann::json::array()}};
  for (const auto& s : summaries) j["clusters"].push_back(to_json(s));
  if (summaries.size() >= 2)
    for (const auto& p : similar_concepts(summaries, assign.centroids, opt.similar_pairs))
      j["similar"].push_back({{"a", p.label_a},
                              {"b", p.label_b},
                              {"distance", p.distance},
                              {"cluster_a", p.cluster_a},
                              {"cluster_b", p.cluster_b}});
  write_file(summaries_out, j.dump(2) + "\n");
  return summaries;
}

inline std::vector<ClusterSummary> read_summaries(const fs::path& p) {
  std::vector<ClusterSummary> out;
  for (const auto& s : read_json(p).at("clusters")) out.push_back(summary_from_json(s));
  return out;
}

// ---- lda

struct LexiconOptions {
  LexiconMode mode = LexiconMode::word;
  std::size_t min_sections = 20;
  double max_fraction = 0.10;
  std::size_t cap = 100000;
};

inline std::vector<std::string> section_bodies(const std::vector<DocumentRecord>& docs) {
  std::vector<std::string> out;
  for (const auto& d : docs)
    for (const auto& s : d.sections) out.push_back(s.body);
  return out;
}

inline TermLexicon build_lexicon(const fs::path& documents_in, const fs::path& lexicon_out, const LexiconOptions& opt) {
  const auto bodies = section_bodies(read_documents(documents_in));
  if (bodies.empty()) throw DataError("corpus has no section bodies");
  TermLexicon lex = doconto::build_lexicon(bodies, opt.mode, opt.min_sections, opt.max_fraction, opt.cap);
  write_file(lexicon_out, to_json(lex).dump() + "\n");
  return lex;
}

inline TopicModel train_lda(const fs::path& documents_in, const fs::path& lexicon_in, const fs::path& model_out,
                            const LdaOptions& opt) {
  const auto docs = read_documents(documents_in);
  const TermLexicon lex = lexicon_from_json(read_json(lexicon_in));
  std::vector<SectionBow> bows;
  for (const auto& d : docs)
    for (std::size_t i = 0; i < d.sections.size(); ++i) {
      SectionBow b = to_bow(d.sections[i].body, lex);
      b.doc_id = d.doc_id;
      b.ordinal = i;
      bows.push_back(std::move(b));
    }
  TopicModel m = doconto::train_lda(bows, lex, opt);
  write_file(model_out, to_json(m).dump() + "\n");
  return m;
}

inline TopicModel read_topic_model(const fs::path& p) { return topic_model_from_json(read_json(p)); }

// ---- ontology

struct OntologyOptions {
  OntologyScope scope = OntologyScope::both;
  std::string base_iri = std::string(kDefaultBaseIri);
  fs::path aliases;
};

inline AliasTable load_aliases(const OntologyOptions& opt) {
  if (opt.aliases.empty()) return {};
  return read_aliases(opt.aliases.string());
}

inline void write_cluster_classes(const fs::path& p, const std::map<std::size_t, std::string>& m) {
  std::ostringstream os;
  for (const auto& [c, id] : m) os << c << '\t' << id << '\n';
  write_file(p, os.str());
}

inline std::map<std::size_t, std::string> read_cluster_classes(const fs::path& p) {
  auto in = open_in(p);
  std::map<std::size_t, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() != 2) throw DataError(p.string() + ": expected cluster<TAB>ClassId");
    out[static_cast<std::size_t>(util::parse_double(f[0]))] = f[1];
  }
  return out;
}

// Base ontology as Turtle; with a cluster assignment, also the cluster →
// class table used for embedding-based matching.
inline OntologyGraph emit_ontology(const OntologyOptions& opt, const fs::path& turtle_out,
                                   const std::optional<fs::path>& assignment_in = std::nullopt,
                                   const std::optional<fs::path>& centroids_in = std::nullopt,
                                   const std::optional<fs::path>& cluster_classes_out = std::nullopt) {
  OntologyGraph g = build_base_ontology(opt.scope, opt.base_iri);
  if (assignment_in && centroids_in && cluster_classes_out) {
    const AliasTable aliases = restrict_aliases(load_aliases(opt), g);
    std::vector<std::string> labels;
    const auto assign = read_clusters(*assignment_in, *centroids_in, &labels);
    write_cluster_classes(*cluster_classes_out, derive_cluster_classes(labels, assign, g, aliases));
  }
  write_file(turtle_out, emit_turtle(g));
  return g;
}

// ---- annotate

struct AnnotateInputs {
  fs::path documents;
  std::optional<fs::path> topic_model;
  std::optional<fs::path> assignment;
  std::optional<fs::path> centroids;
  std::optional<fs::path> cluster_classes;
};

inline std::vector<AnnotatedDocument> annotate(const AnnotateInputs& in, const OntologyOptions& oopt,
                                               const AnnotateOptions& aopt, const fs::path& json_out,
                                               const fs::path& turtle_out) {
  const OntologyGraph g = build_base_ontology(oopt.scope, oopt.base_iri);
  const AliasTable aliases = restrict_aliases(load_aliases(oopt), g);
  std::optional<TopicModel> model;
  if (in.topic_model) model = read_topic_model(*in.topic_model);

  EmbeddingMatrix labels_only;
  ClusterAssignment assign;
  EmbeddingContext ctx;
  const EmbeddingContext* ctx_ptr = nullptr;
  if (in.assignment && in.centroids && in.cluster_classes) {
    assign = read_clusters(*in.assignment, *in.centroids, &labels_only.labels);
    ctx.embeddings = &labels_only;
    ctx.assignment = &assign;
    ctx.cluster_class = read_cluster_classes(*in.cluster_classes);
    ctx_ptr = &ctx;
  }

  std::vector<AnnotatedDocument> out;
  nlohmann::json j = nlohmann::json::array();
  for (const auto& d : read_documents(in.documents)) {
    if (!g.doc_types().count(d.doc_type)) continue;  // outside the ontology scope
    out.push_back(annotate_document(d, g, aliases, model ? &*model : nullptr, aopt, ctx_ptr));
    j.push_back(to_json(out.back()));
  }
  write_file(json_out, j.dump(2) + "\n");
  write_file(turtle_out, emit_turtle(g, out));
  return out;
}

// ---- plot

inline std::size_t plot(const fs::path& lowdim_in, const fs::path& assignment_in, const fs::path& centroids_in,
                        const std::optional<fs::path>& summaries_in, const fs::path& svg_out, const PlotOptions& opt) {
  const auto low = read_lowdim(lowdim_in);
  std::vector<std::string> labels;
  const auto assign = read_clusters(assignment_in, centroids_in, &labels);
  if (labels != low.labels) throw ParameterError("plot: assignment does not match the 2-D embedding");
  std::vector<PlotLabel> marks;
  if (summaries_in) marks = medoid_labels(low, assign, read_summaries(*summaries_in));
  write_file(svg_out, render_clusters_svg(low, assign, marks, opt));
  return low.size();
}

}  // namespace doconto::stages
