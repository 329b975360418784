// doconto: header-mining and ontology pipeline driver.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "doconto/pipeline/config.hpp"
#include "doconto/pipeline/runner.hpp"
#include "doconto/pipeline/stages.hpp"

namespace fs = std::filesystem;
using namespace doconto;

namespace {

struct Globals {
  std::string config;
  std::string workdir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;  // key=value
};

// A flag bound straight to a config key.
struct KeyFlags {
  std::map<std::string, std::string> values;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }
};

Config resolve(const Globals& g, const KeyFlags& flags) {
  Config c;
  if (!g.config.empty()) c = Config::load(g.config);
  for (const auto& s : g.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ParameterError("--set expects key=value, got '" + s + "'");
    c.set(s.substr(0, eq), s.substr(eq + 1));
  }
  for (const auto& [k, v] : flags.values) c.set(k, v);
  if (!g.workdir.empty()) c.set("workdir", g.workdir);
  if (g.seed) c.set("seed", std::to_string(*g.seed));
  return c;
}

fs::path wd(const PipelineConfig& p, const std::string& rel) { return p.workdir / rel; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Induce a document ontology from sectioned-document corpora"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "config file (flat key = value with [sections])");
  app.add_option("--workdir", g.workdir, "artifact directory");
  app.add_option("--seed", g.seed, "global seed");
  app.add_option("--set", g.sets, "override any config key, key=value (repeatable)");

  KeyFlags flags;
  std::function<int(const PipelineConfig&)> action;

  auto* ingest = app.add_subcommand("ingest", "read a JSONL corpus into normalized headers and documents");
  flags.add(ingest, "--corpus", "corpus", "JSONL corpus");
  ingest->callback([&] {
    action = [](const PipelineConfig& p) {
      if (p.corpus.empty()) throw ParameterError("--corpus is required");
      auto s = stages::ingest(p.corpus, wd(p, "ingest/documents.jsonl"), wd(p, "ingest/headers.tsv"),
                              wd(p, "ingest/diagnostics.txt"));
      std::cout << s.documents << " documents, " << s.headers << " headers, " << s.sections << " sections, "
                << s.diagnostics << " diagnostics\n";
      return 0;
    };
  });

  auto* count = app.add_subcommand("count", "header frequency table and candidate concepts");
  flags.add(count, "--min-count", "count.min_count", "frequency threshold");
  flags.add(count, "--per-document", "count.per_document", "count each header once per document (true/false)");
  count->callback([&] {
    action = [](const PipelineConfig& p) {
      auto n = stages::count(wd(p, "ingest/headers.tsv"), wd(p, "count/candidates.tsv"), wd(p, "count/frequencies.tsv"),
                             p.min_count, p.per_document);
      std::cout << n << " candidate concepts\n";
      return 0;
    };
  });

  auto add_train = [&](const std::string& name, const std::string& model) {
    auto* cmd = app.add_subcommand(name, "train the " + model + " header autoencoder");
    flags.add(cmd, "--length", "train.length", "padded header length L");
    flags.add(cmd, "--embed", "train.embed", "token embedding width");
    flags.add(cmd, "--hidden", "train.hidden", "hidden width (vae)");
    flags.add(cmd, "--latent", "train.latent", "latent width (vae)");
    flags.add(cmd, "--channels", "train.channels", "conv channels (cae)");
    flags.add(cmd, "--batch-size", "train.batch_size", "minibatch size");
    flags.add(cmd, "--epochs", "train.epochs", "epochs");
    flags.add(cmd, "--learning-rate", "train.learning_rate", "learning rate");
    flags.add(cmd, "--optimizer", "train.optimizer", "rmsprop or adam");
    flags.add(cmd, "--vocab-size", "train.vocab_size", "vocabulary cap including PAD and UNK");
    cmd->callback([&, model] {
      flags.values["train.model"] = model;
      action = [](const PipelineConfig& p) {
        auto hist = stages::train(p.model, wd(p, "ingest/headers.tsv"), wd(p, "train/model.json"),
                                  wd(p, "train/loss.csv"), p.train, p.vocab);
        if (!hist.empty())
          std::cout << "epoch " << hist.back().epoch << " train " << hist.back().train_total << " val "
                    << hist.back().val_total << '\n';
        return 0;
      };
    });
  };
  add_train("train-vae", "vae");
  add_train("train-cae", "cae");

  auto* embed = app.add_subcommand("embed", "embed every header occurrence with the trained model");
  embed->callback([&] {
    action = [](const PipelineConfig& p) {
      auto n = stages::embed(wd(p, "train/model.json"), wd(p, "ingest/headers.tsv"), wd(p, "embed/embeddings.tsv"));
      std::cout << n << " header embeddings\n";
      return 0;
    };
  });

  auto* tsne = app.add_subcommand("tsne", "reduce embeddings to 2-D");
  flags.add(tsne, "--perplexity", "tsne.perplexity", "target perplexity");
  flags.add(tsne, "--iterations", "tsne.iterations", "gradient iterations");
  tsne->callback([&] {
    action = [](const PipelineConfig& p) {
      auto r = stages::tsne(wd(p, "embed/embeddings.tsv"), wd(p, "tsne/lowdim.tsv"), wd(p, "tsne/stats.json"), p.tsne);
      std::cout << "final KL " << r.final_kl << '\n';
      return 0;
    };
  });

  auto* cluster = app.add_subcommand("cluster", "k-means over the 2-D embedding");
  flags.add(cluster, "--k", "cluster.k", "number of clusters");
  flags.add(cluster, "--restarts", "cluster.restarts", "k-means++ restarts");
  cluster->callback([&] {
    action = [](const PipelineConfig& p) {
      auto a = stages::cluster(wd(p, "tsne/lowdim.tsv"), wd(p, "cluster/assignment.tsv"), wd(p, "cluster/centroids.tsv"),
                               p.cluster);
      std::cout << "inertia " << a.inertia << " after " << a.iterations << " iterations\n";
      return 0;
    };
  });

  auto* summarize = app.add_subcommand("summarize", "cluster summaries and similar concept pairs");
  flags.add(summarize, "--top", "summarize.top_headers", "headers listed per cluster");
  flags.add(summarize, "--pairs", "summarize.similar_pairs", "similar pairs reported");
  summarize->callback([&] {
    action = [](const PipelineConfig& p) {
      auto s = stages::summarize(wd(p, "tsne/lowdim.tsv"), wd(p, "cluster/assignment.tsv"),
                                 wd(p, "cluster/centroids.tsv"), wd(p, "count/frequencies.tsv"),
                                 wd(p, "summarize/summaries.json"), p.summary);
      for (const auto& c : s) std::cout << c.cluster << '\t' << c.size << '\t' << c.medoid << '\n';
      return 0;
    };
  });

  auto* lexicon = app.add_subcommand("lda-build-lexicon", "build the LDA term lexicon from section bodies");
  flags.add(lexicon, "--mode", "lda.mode", "word, bigram or phrase");
  flags.add(lexicon, "--min-sections", "lda.min_sections", "minimum section frequency");
  flags.add(lexicon, "--max-fraction", "lda.max_fraction", "maximum section fraction");
  flags.add(lexicon, "--cap", "lda.cap", "lexicon size cap");
  lexicon->callback([&] {
    action = [](const PipelineConfig& p) {
      auto lex = stages::build_lexicon(wd(p, "ingest/documents.jsonl"), wd(p, "lda/lexicon.json"), p.lexicon);
      std::cout << lex.size() << " terms\n";
      return 0;
    };
  });

  auto* lda = app.add_subcommand("lda-train", "train the topic model");
  flags.add(lda, "--topics", "lda.topics", "number of topics");
  flags.add(lda, "--passes", "lda.passes", "Gibbs sweeps");
  flags.add(lda, "--alpha", "lda.alpha", "document-topic prior (<= 0 for 50/T)");
  flags.add(lda, "--beta", "lda.beta", "topic-term prior");
  lda->callback([&] {
    action = [](const PipelineConfig& p) {
      auto m = stages::train_lda(wd(p, "ingest/documents.jsonl"), wd(p, "lda/lexicon.json"), wd(p, "lda/model.json"), p.lda);
      std::cout << m.topics << " topics over " << m.terms() << " terms, " << m.documents << " sections\n";
      return 0;
    };
  });

  auto* terms = app.add_subcommand("lda-terms", "semantic terms of a section body");
  std::string text;
  std::size_t k_terms = 10;
  terms->add_option("--text", text, "section body")->required();
  terms->add_option("--k", k_terms, "number of terms");
  terms->callback([&] {
    action = [&](const PipelineConfig& p) {
      const auto m = stages::read_topic_model(wd(p, "lda/model.json"));
      const auto terms = semantic_terms(m, text, k_terms, p.annotate.sweeps);
      if (terms.empty()) std::cout << "(no lexicon terms)\n";
      for (const auto& [t, ph] : terms) std::cout << t << '\t' << ph << '\n';
      return 0;
    };
  });

  auto* onto = app.add_subcommand("onto-emit", "write the base ontology as Turtle");
  flags.add(onto, "--scope", "ontology.scope", "academic, rfp or both");
  flags.add(onto, "--aliases", "ontology.aliases", "alias table TSV");
  flags.add(onto, "--base-iri", "ontology.base_iri", "namespace for classes");
  onto->callback([&] {
    action = [](const PipelineConfig& p) {
      const bool clusters = fs::is_regular_file(wd(p, "cluster/assignment.tsv"));
      if (clusters)
        stages::emit_ontology(p.ontology, wd(p, "ontology/ontology.ttl"), wd(p, "cluster/assignment.tsv"),
                              wd(p, "cluster/centroids.tsv"), wd(p, "ontology/cluster_classes.tsv"));
      else
        stages::emit_ontology(p.ontology, wd(p, "ontology/ontology.ttl"));
      std::cout << wd(p, "ontology/ontology.ttl").string() << '\n';
      return 0;
    };
  });

  auto* annotate = app.add_subcommand("annotate", "annotate ingested documents against the ontology");
  flags.add(annotate, "--scope", "ontology.scope", "academic, rfp or both");
  flags.add(annotate, "--aliases", "ontology.aliases", "alias table TSV");
  flags.add(annotate, "--k-terms", "annotate.k_terms", "semantic terms per section");
  flags.add(annotate, "--content-bytes", "annotate.content_bytes", "hasContent truncation limit");
  annotate->callback([&] {
    action = [](const PipelineConfig& p) {
      stages::AnnotateInputs in;
      in.documents = wd(p, "ingest/documents.jsonl");
      if (fs::is_regular_file(wd(p, "lda/model.json"))) in.topic_model = wd(p, "lda/model.json");
      if (fs::is_regular_file(wd(p, "ontology/cluster_classes.tsv"))) {
        in.assignment = wd(p, "cluster/assignment.tsv");
        in.centroids = wd(p, "cluster/centroids.tsv");
        in.cluster_classes = wd(p, "ontology/cluster_classes.tsv");
      }
      auto docs = stages::annotate(in, p.ontology, p.annotate, wd(p, "annotate/annotations.json"),
                                   wd(p, "annotate/annotations.ttl"));
      std::cout << docs.size() << " documents annotated\n";
      return 0;
    };
  });

  auto* plot = app.add_subcommand("plot", "SVG scatter of the clustered 2-D embedding");
  flags.add(plot, "--width", "plot.width", "SVG width");
  flags.add(plot, "--height", "plot.height", "SVG height");
  flags.add(plot, "--labels", "plot.labels", "draw medoid labels (true/false)");
  plot->callback([&] {
    action = [](const PipelineConfig& p) {
      std::optional<fs::path> sums;
      if (fs::is_regular_file(wd(p, "summarize/summaries.json"))) sums = wd(p, "summarize/summaries.json");
      auto n = stages::plot(wd(p, "tsne/lowdim.tsv"), wd(p, "cluster/assignment.tsv"), wd(p, "cluster/centroids.tsv"),
                            sums, wd(p, "plot/clusters.svg"), p.plot);
      std::cout << n << " points plotted\n";
      return 0;
    };
  });

  auto* pipeline = app.add_subcommand("pipeline", "run every enabled stage with caching");
  flags.add(pipeline, "--corpus", "corpus", "JSONL corpus");
  pipeline->callback([&] {
    action = [](const PipelineConfig& p) {
      auto m = run_pipeline(p, &std::cout);
      std::cout << m.stages.size() << " stages, manifest " << wd(p, kManifestName).string() << '\n';
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    const PipelineConfig p = PipelineConfig::from(resolve(g, flags));
    return action(p);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  }
}
