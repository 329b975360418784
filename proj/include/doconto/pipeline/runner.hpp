#pragma once

// End-to-end pipeline over a workdir with a digest manifest. A stage is
// skipped when its parameters and input digests match the previous run,
// its outputs are intact, and no upstream stage recomputed in this run.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "doconto/errors.hpp"
#include "doconto/pipeline/config.hpp"
#include "doconto/pipeline/stages.hpp"
#include "doconto/util/digest.hpp"

namespace doconto {

namespace fs = std::filesystem;

inline const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> k{"ingest", "count",    "train",    "embed",    "tsne", "cluster",
                                          "summarize", "lda",   "ontology", "annotate", "plot"};
  return k;
}

struct PipelineConfig {
  fs::path corpus;
  fs::path workdir = "work";
  std::uint64_t seed = 7;
  std::map<std::string, bool> enabled;  // stage → toggle, default on

  std::size_t min_count = 2;
  bool per_document = false;

  stages::ModelKind model = stages::ModelKind::vae;
  TrainConfig train;
  stages::VocabOptions vocab;

  TsneOptions tsne;
  stages::ClusterOptions cluster;
  stages::SummaryOptions summary;

  stages::LexiconOptions lexicon;
  LdaOptions lda;

  stages::OntologyOptions ontology;
  AnnotateOptions annotate;
  PlotOptions plot;

  bool stage_enabled(const std::string& s) const {
    auto it = enabled.find(s);
    return it == enabled.end() || it->second;
  }

  // Seeds every stochastic stage from the global seed.
  void propagate_seed() {
    train.seed = seed;
    tsne.seed = seed;
    cluster.seed = seed;
    lda.seed = seed;
  }

  static PipelineConfig from(const Config& c) {
    PipelineConfig p;
    p.corpus = c.get("corpus", "");
    p.workdir = c.get("workdir", "work");
    p.seed = c.get("seed", static_cast<std::uint64_t>(7));
    for (const auto& s : stage_names()) p.enabled[s] = c.get("stages." + s, true);

    p.min_count = c.get_size("count.min_count", 2);
    p.per_document = c.get("count.per_document", false);

    p.model = stages::parse_model_kind(c.get("train.model", "vae"));
    p.train = p.model == stages::ModelKind::vae ? TrainConfig::vae_defaults() : TrainConfig::cae_defaults();
    auto& t = p.train;
    t.length = c.get_size("train.length", t.length);
    t.embed = c.get_size("train.embed", t.embed);
    t.hidden = c.get_size("train.hidden", t.hidden);
    t.latent = c.get_size("train.latent", t.latent);
    t.batch_size = c.get_size("train.batch_size", t.batch_size);
    t.epochs = c.get_size("train.epochs", t.epochs);
    t.learning_rate = c.get("train.learning_rate", t.learning_rate);
    if (c.has("train.optimizer")) t.optimizer = parse_optimizer(c.get("train.optimizer", ""));
    t.validation_fraction = c.get("train.validation_fraction", t.validation_fraction);
    t.epsilon_std = c.get("train.epsilon_std", t.epsilon_std);
    t.channels = c.get_size("train.channels", t.channels);
    t.width = c.get_size("train.width", t.width);
    t.pool = c.get_size("train.pool", t.pool);
    t.upsample = c.get_size("train.upsample", t.upsample);
    p.vocab.max_size = c.get_size("train.vocab_size", p.vocab.max_size);
    p.vocab.min_token_count = c.get_size("train.min_token_count", p.vocab.min_token_count);

    auto& ts = p.tsne;
    ts.perplexity = c.get("tsne.perplexity", ts.perplexity);
    ts.iterations = c.get_size("tsne.iterations", ts.iterations);
    ts.learning_rate = c.get("tsne.learning_rate", ts.learning_rate);
    ts.exaggeration = c.get("tsne.exaggeration", ts.exaggeration);
    ts.exaggeration_iterations = c.get_size("tsne.exaggeration_iterations", ts.exaggeration_iterations);

    p.cluster.k = c.get_size("cluster.k", p.cluster.k);
    p.cluster.max_iter = c.get_size("cluster.max_iter", p.cluster.max_iter);
    p.cluster.restarts = c.get_size("cluster.restarts", p.cluster.restarts);
    p.summary.top_headers = c.get_size("summarize.top_headers", p.summary.top_headers);
    p.summary.similar_pairs = c.get_size("summarize.similar_pairs", p.summary.similar_pairs);

    p.lexicon.mode = parse_lexicon_mode(c.get("lda.mode", "word"));
    p.lexicon.min_sections = c.get_size("lda.min_sections", p.lexicon.min_sections);
    p.lexicon.max_fraction = c.get("lda.max_fraction", p.lexicon.max_fraction);
    p.lexicon.cap = c.get_size("lda.cap", p.lexicon.cap);
    p.lda.topics = c.get_size("lda.topics", p.lda.topics);
    p.lda.passes = c.get_size("lda.passes", p.lda.passes);
    p.lda.alpha = c.get("lda.alpha", p.lda.alpha);
    p.lda.beta = c.get("lda.beta", p.lda.beta);

    p.ontology.scope = parse_ontology_scope(c.get("ontology.scope", "both"));
    p.ontology.base_iri = c.get("ontology.base_iri", std::string(kDefaultBaseIri));
    p.ontology.aliases = c.get("ontology.aliases", "");
    p.annotate.k_terms = c.get_size("annotate.k_terms", p.annotate.k_terms);
    p.annotate.content_bytes = c.get_size("annotate.content_bytes", p.annotate.content_bytes);
    p.annotate.sweeps = c.get_size("annotate.sweeps", p.annotate.sweeps);

    p.plot.width = c.get("plot.width", p.plot.width);
    p.plot.height = c.get("plot.height", p.plot.height);
    p.plot.medoid_labels = c.get("plot.labels", p.plot.medoid_labels);

    p.propagate_seed();
    p.train.validate();
    return p;
  }
};

struct StageRecord {
  std::string name;
  nlohmann::json params;
  std::map<std::string, std::string> inputs;   // workdir-relative path → sha-256
  std::map<std::string, std::string> outputs;
  double seconds = 0.0;
  bool cached = false;
};

struct RunManifest {
  std::vector<StageRecord> stages;
  std::optional<std::string> failed_stage;
  std::string error;

  const StageRecord* find(const std::string& name) const {
    for (const auto& s : stages)
      if (s.name == name) return &s;
    return nullptr;
  }

  // Output digests of every completed stage, keyed by path.
  std::map<std::string, std::string> artifact_digests() const {
    std::map<std::string, std::string> out;
    for (const auto& s : stages) out.insert(s.outputs.begin(), s.outputs.end());
    return out;
  }
};

inline nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : m.stages)
    stages.push_back({{"name", s.name},
                      {"params", s.params},
                      {"inputs", s.inputs},
                      {"outputs", s.outputs},
                      {"seconds", s.seconds},
                      {"cached", s.cached}});
  nlohmann::json j{{"stages", stages}};
  if (m.failed_stage) j["failed"] = {{"stage", *m.failed_stage}, {"error", m.error}};
  return j;
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    for (const auto& s : j.at("stages")) {
      StageRecord r;
      r.name = s.at("name");
      r.params = s.at("params");
      r.inputs = s.at("inputs").get<std::map<std::string, std::string>>();
      r.outputs = s.at("outputs").get<std::map<std::string, std::string>>();
      r.seconds = s.at("seconds");
      r.cached = s.at("cached");
      m.stages.push_back(std::move(r));
    }
    if (j.contains("failed")) {
      m.failed_stage = j["failed"].at("stage").get<std::string>();
      m.error = j["failed"].at("error").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

namespace detail {

struct StageSpec {
  std::string name;
  std::vector<std::string> upstream;
  std::vector<std::string> inputs;   // workdir-relative
  std::vector<std::string> outputs;  // workdir-relative
  nlohmann::json params;
  std::function<void()> run;
};

inline nlohmann::json train_params(const PipelineConfig& p) {
  auto j = detail::config_json(p.train);
  j["model"] = p.model == stages::ModelKind::vae ? "vae" : "cae";
  j["vocab_size"] = p.vocab.max_size;
  j["min_token_count"] = p.vocab.min_token_count;
  return j;
}

}  // namespace detail

inline const char* kManifestName = "manifest.json";

// Runs the enabled stages in dependency order. On a stage failure the
// manifest (completed stages plus the failure) is written and the error
// rethrown.
inline RunManifest run_pipeline(const PipelineConfig& cfg, std::ostream* log = nullptr) {
  if (cfg.corpus.empty()) throw ParameterError("pipeline: no corpus configured");
  if (!fs::is_regular_file(cfg.corpus)) throw DataError("corpus '" + cfg.corpus.string() + "' does not exist");
  if (!cfg.ontology.aliases.empty() && !fs::is_regular_file(cfg.ontology.aliases))
    throw DataError("alias table '" + cfg.ontology.aliases.string() + "' does not exist");

  const fs::path wd = cfg.workdir;
  fs::create_directories(wd);
  auto at = [&](const std::string& rel) { return wd / rel; };
  const fs::path corpus_abs = fs::absolute(cfg.corpus);

  std::optional<RunManifest> previous;
  if (fs::is_regular_file(at(kManifestName))) {
    try {
      previous = manifest_from_json(stages::read_json(at(kManifestName)));
    } catch (const DataError&) {
      previous.reset();
    }
  }

  const bool with_lda = cfg.stage_enabled("lda");
  const bool with_clusters = cfg.stage_enabled("cluster");

  std::vector<detail::StageSpec> specs;
  specs.push_back({"ingest", {}, {}, {"ingest/documents.jsonl", "ingest/headers.tsv", "ingest/diagnostics.txt"},
                   {{"corpus_sha256", util::file_sha256(corpus_abs.string())}},
                   [&] {
                     stages::ingest(corpus_abs, at("ingest/documents.jsonl"), at("ingest/headers.tsv"),
                                    at("ingest/diagnostics.txt"));
                   }});
  specs.push_back({"count", {"ingest"}, {"ingest/headers.tsv"}, {"count/candidates.tsv", "count/frequencies.tsv"},
                   {{"min_count", cfg.min_count}, {"per_document", cfg.per_document}},
                   [&] {
                     stages::count(at("ingest/headers.tsv"), at("count/candidates.tsv"), at("count/frequencies.tsv"),
                                   cfg.min_count, cfg.per_document);
                   }});
  specs.push_back({"train", {"ingest"}, {"ingest/headers.tsv"}, {"train/model.json", "train/loss.csv"},
                   detail::train_params(cfg),
                   [&] {
                     stages::train(cfg.model, at("ingest/headers.tsv"), at("train/model.json"), at("train/loss.csv"),
                                   cfg.train, cfg.vocab);
                   }});
  specs.push_back({"embed", {"train"}, {"train/model.json", "ingest/headers.tsv"}, {"embed/embeddings.tsv"},
                   nlohmann::json::object(),
                   [&] { stages::embed(at("train/model.json"), at("ingest/headers.tsv"), at("embed/embeddings.tsv")); }});
  specs.push_back({"tsne", {"embed"}, {"embed/embeddings.tsv"}, {"tsne/lowdim.tsv", "tsne/stats.json"},
                   {{"perplexity", cfg.tsne.perplexity},
                    {"iterations", cfg.tsne.iterations},
                    {"learning_rate", cfg.tsne.learning_rate},
                    {"exaggeration", cfg.tsne.exaggeration},
                    {"exaggeration_iterations", cfg.tsne.exaggeration_iterations},
                    {"seed", cfg.tsne.seed}},
                   [&] { stages::tsne(at("embed/embeddings.tsv"), at("tsne/lowdim.tsv"), at("tsne/stats.json"), cfg.tsne); }});
  specs.push_back({"cluster", {"tsne"}, {"tsne/lowdim.tsv"}, {"cluster/assignment.tsv", "cluster/centroids.tsv"},
                   {{"k", cfg.cluster.k},
                    {"max_iter", cfg.cluster.max_iter},
                    {"restarts", cfg.cluster.restarts},
                    {"seed", cfg.cluster.seed}},
                   [&] {
                     stages::cluster(at("tsne/lowdim.tsv"), at("cluster/assignment.tsv"), at("cluster/centroids.tsv"),
                                     cfg.cluster);
                   }});
  specs.push_back({"summarize",
                   {"cluster", "count"},
                   {"tsne/lowdim.tsv", "cluster/assignment.tsv", "cluster/centroids.tsv", "count/frequencies.tsv"},
                   {"summarize/summaries.json"},
                   {{"top_headers", cfg.summary.top_headers}, {"similar_pairs", cfg.summary.similar_pairs}},
                   [&] {
                     stages::summarize(at("tsne/lowdim.tsv"), at("cluster/assignment.tsv"), at("cluster/centroids.tsv"),
                                       at("count/frequencies.tsv"), at("summarize/summaries.json"), cfg.summary);
                   }});
  specs.push_back({"lda", {"ingest"}, {"ingest/documents.jsonl"}, {"lda/lexicon.json", "lda/model.json"},
                   {{"mode", std::string(to_string(cfg.lexicon.mode))},
                    {"min_sections", cfg.lexicon.min_sections},
                    {"max_fraction", cfg.lexicon.max_fraction},
                    {"cap", cfg.lexicon.cap},
                    {"topics", cfg.lda.topics},
                    {"passes", cfg.lda.passes},
                    {"alpha", cfg.lda.alpha},
                    {"beta", cfg.lda.beta},
                    {"seed", cfg.lda.seed}},
                   [&] {
                     stages::build_lexicon(at("ingest/documents.jsonl"), at("lda/lexicon.json"), cfg.lexicon);
                     stages::train_lda(at("ingest/documents.jsonl"), at("lda/lexicon.json"), at("lda/model.json"), cfg.lda);
                   }});

  const std::string alias_digest =
      cfg.ontology.aliases.empty() ? std::string() : util::file_sha256(cfg.ontology.aliases.string());
  const nlohmann::json onto_params{{"scope", cfg.ontology.scope == OntologyScope::both       ? "both"
                                             : cfg.ontology.scope == OntologyScope::academic ? "academic"
                                                                                             : "rfp"},
                                   {"base_iri", cfg.ontology.base_iri},
                                   {"aliases_sha256", alias_digest}};
  {
    detail::StageSpec s{"ontology", {}, {}, {"ontology/ontology.ttl"}, onto_params, {}};
    if (with_clusters) {
      s.upstream = {"cluster"};
      s.inputs = {"cluster/assignment.tsv", "cluster/centroids.tsv"};
      s.outputs.push_back("ontology/cluster_classes.tsv");
      s.run = [&] {
        stages::emit_ontology(cfg.ontology, at("ontology/ontology.ttl"), at("cluster/assignment.tsv"),
                              at("cluster/centroids.tsv"), at("ontology/cluster_classes.tsv"));
      };
    } else {
      s.run = [&] { stages::emit_ontology(cfg.ontology, at("ontology/ontology.ttl")); };
    }
    specs.push_back(std::move(s));
  }
  {
    nlohmann::json params = onto_params;
    params["k_terms"] = cfg.annotate.k_terms;
    params["content_bytes"] = cfg.annotate.content_bytes;
    params["sweeps"] = cfg.annotate.sweeps;
    detail::StageSpec s{"annotate",
                        {"ingest", "ontology"},
                        {"ingest/documents.jsonl", "ontology/ontology.ttl"},
                        {"annotate/annotations.json", "annotate/annotations.ttl"},
                        params,
                        {}};
    stages::AnnotateInputs in;
    in.documents = at("ingest/documents.jsonl");
    if (with_lda) {
      s.upstream.push_back("lda");
      s.inputs.push_back("lda/model.json");
      in.topic_model = at("lda/model.json");
    }
    if (with_clusters) {
      s.upstream.push_back("cluster");
      for (const char* f : {"cluster/assignment.tsv", "cluster/centroids.tsv", "ontology/cluster_classes.tsv"})
        s.inputs.push_back(f);
      in.assignment = at("cluster/assignment.tsv");
      in.centroids = at("cluster/centroids.tsv");
      in.cluster_classes = at("ontology/cluster_classes.tsv");
    }
    s.run = [&, in] {
      stages::annotate(in, cfg.ontology, cfg.annotate, at("annotate/annotations.json"), at("annotate/annotations.ttl"));
    };
    specs.push_back(std::move(s));
  }
  specs.push_back({"plot",
                   {"cluster", "summarize"},
                   {"tsne/lowdim.tsv", "cluster/assignment.tsv", "cluster/centroids.tsv", "summarize/summaries.json"},
                   {"plot/clusters.svg"},
                   {{"width", cfg.plot.width}, {"height", cfg.plot.height}, {"labels", cfg.plot.medoid_labels}},
                   [&] {
                     stages::plot(at("tsne/lowdim.tsv"), at("cluster/assignment.tsv"), at("cluster/centroids.tsv"),
                                  at("summarize/summaries.json"), at("plot/clusters.svg"), cfg.plot);
                   }});

  RunManifest manifest;
  std::set<std::string> recomputed;
  auto digest_all = [&](const std::vector<std::string>& rels) {
    std::map<std::string, std::string> out;
    for (const auto& r : rels) {
      if (!fs::is_regular_file(at(r))) throw DataError("missing stage input '" + at(r).string() + "'");
      out[r] = util::file_sha256(at(r).string());
    }
    return out;
  };
  auto outputs_intact = [&](const StageRecord& rec) {
    for (const auto& [rel, digest] : rec.outputs)
      if (!fs::is_regular_file(at(rel)) || util::file_sha256(at(rel).string()) != digest) return false;
    return true;
  };

  for (const auto& spec : specs) {
    if (!cfg.stage_enabled(spec.name)) continue;
    StageRecord rec;
    rec.name = spec.name;
    rec.params = spec.params;
    try {
      rec.inputs = digest_all(spec.inputs);
      bool dirty = false;
      for (const auto& u : spec.upstream) dirty = dirty || recomputed.count(u) > 0;
      const StageRecord* prev = previous ? previous->find(spec.name) : nullptr;
      if (!dirty && prev && prev->params == rec.params && prev->inputs == rec.inputs &&
          prev->outputs.size() == spec.outputs.size() && outputs_intact(*prev)) {
        rec.outputs = prev->outputs;
        rec.cached = true;
      } else {
        const auto t0 = std::chrono::steady_clock::now();
        spec.run();
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rec.outputs = digest_all(spec.outputs);
        recomputed.insert(spec.name);
      }
    } catch (const std::exception& e) {
      manifest.failed_stage = spec.name;
      manifest.error = e.what();
      stages::write_file(at(kManifestName), to_json(manifest).dump(2) + "\n");
      throw;
    }
    if (log) *log << spec.name << (rec.cached ? ": cached" : ": done") << '\n';
    manifest.stages.push_back(std::move(rec));
  }
  stages::write_file(at(kManifestName), to_json(manifest).dump(2) + "\n");
  return manifest;
}

}  // namespace doconto
