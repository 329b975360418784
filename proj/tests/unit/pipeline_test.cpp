#include <filesystem>
#include <fstream>
#include <regex>
#include <set>

#include <gtest/gtest.h>

#include "doconto/pipeline/config.hpp"
#include "doconto/pipeline/plot.hpp"
#include "doconto/pipeline/runner.hpp"

using namespace doconto;
namespace fs = std::filesystem;

namespace {

const std::string kSource = DOCONTO_SOURCE_DIR;

fs::path fresh_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("doconto_" + name);
  fs::remove_all(p);
  return p;
}

PipelineConfig desk(const fs::path& workdir) {
  Config c = Config::load(kSource + "/configs/desk.cfg");
  c.set("corpus", kSource + "/data/toy_corpus.jsonl");
  c.set("ontology.aliases", kSource + "/data/aliases.tsv");
  c.set("workdir", workdir.string());
  return PipelineConfig::from(c);
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

LowDimEmbedding lowdim(std::initializer_list<std::pair<double, double>> xs) {
  LowDimEmbedding e;
  e.points = Tensor(xs.size(), 2);
  std::size_t i = 0;
  for (auto [x, y] : xs) {
    e.labels.push_back("h" + std::to_string(i));
    e.points(i, 0) = x;
    e.points(i, 1) = y;
    ++i;
  }
  return e;
}

ClusterAssignment labels(std::vector<std::size_t> l) {
  ClusterAssignment a;
  a.labels = std::move(l);
  return a;
}

}  // namespace

TEST(Config, SectionsCommentsAndTypes) {
  auto c = Config::parse_string(
      "# top\nseed = 9\n[train]\nepochs = 5 # trailing\nlr = 1e-3\n[ontology]\nbase_iri = http://x.org/o#\nflag = yes\n");
  EXPECT_EQ(c.get("seed", std::uint64_t{0}), 9u);
  EXPECT_EQ(c.get_size("train.epochs", 0), 5u);
  EXPECT_DOUBLE_EQ(c.get("train.lr", 0.0), 1e-3);
  EXPECT_EQ(c.get("ontology.base_iri", ""), "http://x.org/o#");
  EXPECT_TRUE(c.get("ontology.flag", false));
  EXPECT_EQ(c.get("missing", "dflt"), "dflt");
}

TEST(Config, ErrorsAreParameterErrors) {
  EXPECT_THROW(Config::parse_string("[broken\n"), ParameterError);
  EXPECT_THROW(Config::parse_string("no equals\n"), ParameterError);
  auto c = Config::parse_string("n = abc\nb = maybe\nneg = -1\n");
  EXPECT_THROW(c.get("n", 1.0), ParameterError);
  EXPECT_THROW(c.get("b", false), ParameterError);
  EXPECT_THROW(c.get_size("neg", 1), ParameterError);
  EXPECT_THROW(Config::load("/nonexistent.cfg"), ParameterError);
}

TEST(Config, MergeOverridesAndSeedPropagates) {
  auto base = Config::parse_string("seed = 1\n[cluster]\nk = 4\n");
  base.merge(Config::parse_string("seed = 5\n"));
  auto p = PipelineConfig::from(base);
  EXPECT_EQ(p.seed, 5u);
  EXPECT_EQ(p.cluster.k, 4u);
  EXPECT_EQ(p.train.seed, 5u);
  EXPECT_EQ(p.tsne.seed, 5u);
  EXPECT_EQ(p.lda.seed, 5u);
  EXPECT_EQ(p.cluster.seed, 5u);
}

TEST(Config, ShippedConfigsParse) {
  auto d = PipelineConfig::from(Config::load(kSource + "/configs/desk.cfg"));
  EXPECT_EQ(d.train.epochs, 200u);
  auto p = PipelineConfig::from(Config::load(kSource + "/configs/paper.cfg"));
  EXPECT_EQ(p.train.length, 15u);
  EXPECT_EQ(p.cluster.k, 50u);
  EXPECT_EQ(p.lexicon.cap, 100000u);
  EXPECT_EQ(p.lexicon.min_sections, 20u);
  EXPECT_DOUBLE_EQ(p.lexicon.max_fraction, 0.10);
}

TEST(Plot, FourPointsTwoClusters) {
  auto svg = render_clusters_svg(lowdim({{0, 0}, {0, 1}, {10, 10}, {10, 11}}), labels({0, 0, 1, 1}));
  EXPECT_EQ(count_of(svg, "<circle"), 4u);
  std::set<std::string> fills;
  std::regex fill("<circle[^>]*fill=\"(#[0-9a-f]{6})\"");
  for (std::sregex_iterator it(svg.begin(), svg.end(), fill), end; it != end; ++it) fills.insert((*it)[1]);
  EXPECT_EQ(fills.size(), 2u);
}

TEST(Plot, EmptyInputAndDeterminism) {
  auto svg = render_clusters_svg(LowDimEmbedding{}, ClusterAssignment{});
  EXPECT_EQ(count_of(svg, "<circle"), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  auto e = lowdim({{1, 2}, {3, 4}});
  EXPECT_EQ(render_clusters_svg(e, labels({0, 1})), render_clusters_svg(e, labels({0, 1})));
}

TEST(Plot, LengthMismatchAndPalette) {
  EXPECT_THROW(render_clusters_svg(lowdim({{0, 0}, {1, 1}}), labels({0})), ParameterError);
  const auto& p = cluster_palette();
  EXPECT_EQ(std::set<std::string>(p.begin(), p.end()).size(), kPaletteSize);
}

TEST(Plot, MarginAndMedoidLabels) {
  PlotOptions opt;
  auto e = lowdim({{0, 0}, {1, 1}});
  auto svg = render_clusters_svg(e, labels({0, 0}), {{1, "a<b"}}, opt);
  EXPECT_NE(svg.find("cx=\"40.000\" cy=\"570.000\""), std::string::npos) << svg;
  EXPECT_NE(svg.find("cx=\"760.000\" cy=\"30.000\""), std::string::npos) << svg;
  EXPECT_NE(svg.find(">a&lt;b</text>"), std::string::npos);
}

class PipelineRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fresh_dir("pipeline_a");
    first_ = run_pipeline(desk(dir_));
  }
  static fs::path dir_;
  static RunManifest first_;
};

fs::path PipelineRun::dir_;
RunManifest PipelineRun::first_;

TEST_F(PipelineRun, AllElevenStagesRun) {
  ASSERT_EQ(first_.stages.size(), 11u);
  for (std::size_t i = 0; i < 11; ++i) {
    EXPECT_EQ(first_.stages[i].name, stage_names()[i]);
    EXPECT_FALSE(first_.stages[i].cached);
    EXPECT_FALSE(first_.stages[i].outputs.empty());
  }
  EXPECT_FALSE(first_.failed_stage);
  EXPECT_TRUE(fs::is_regular_file(dir_ / "manifest.json"));
}

TEST_F(PipelineRun, ManifestRoundTripsThroughJson) {
  auto back = manifest_from_json(nlohmann::json::parse(slurp(dir_ / "manifest.json")));
  EXPECT_EQ(back.artifact_digests(), first_.artifact_digests());
}

TEST_F(PipelineRun, RerunIsAllCacheHits) {
  auto again = run_pipeline(desk(dir_));
  ASSERT_EQ(again.stages.size(), 11u);
  for (const auto& s : again.stages) EXPECT_TRUE(s.cached) << s.name;
  EXPECT_EQ(again.artifact_digests(), first_.artifact_digests());
}

TEST_F(PipelineRun, CircleCountMatchesEmbeddedHeaders) {
  const auto svg = slurp(dir_ / "plot/clusters.svg");
  std::ifstream in(dir_ / "tsne/lowdim.tsv");
  auto e = read_lowdim_tsv(in);
  EXPECT_EQ(count_of(svg, "<circle"), e.size());
  EXPECT_GT(e.size(), 0u);
}

TEST_F(PipelineRun, TurtleOutputsParse) {
  auto onto = rdf::parse_turtle(slurp(dir_ / "ontology/ontology.ttl"));
  EXPECT_GT(onto.triples.size(), 50u);
  auto ann = rdf::parse_turtle(slurp(dir_ / "annotate/annotations.ttl"));
  EXPECT_GT(ann.triples.size(), onto.triples.size());
}

TEST_F(PipelineRun, DeletingOneOutputRecomputesOnlyDescendants) {
  auto copy = fresh_dir("pipeline_iso");
  fs::copy(dir_, copy, fs::copy_options::recursive);
  fs::remove(copy / "tsne/lowdim.tsv");
  auto m = run_pipeline(desk(copy));
  const std::set<std::string> expected{"tsne", "cluster", "summarize", "ontology", "annotate", "plot"};
  for (const auto& s : m.stages) EXPECT_EQ(s.cached, !expected.count(s.name)) << s.name;
  EXPECT_EQ(m.artifact_digests(), first_.artifact_digests());
}

TEST(Pipeline, MissingCorpusFailsBeforeAnyStage) {
  auto dir = fresh_dir("pipeline_missing");
  auto cfg = desk(dir);
  cfg.corpus = "/nonexistent/corpus.jsonl";
  EXPECT_THROW(run_pipeline(cfg), DataError);
  EXPECT_FALSE(fs::exists(dir / "manifest.json"));
}

TEST(Pipeline, StageFailureRecordsCompletedStages) {
  auto dir = fresh_dir("pipeline_fail");
  auto cfg = desk(dir);
  cfg.tsne.perplexity = 1000;  // infeasible for the toy corpus
  EXPECT_THROW(run_pipeline(cfg), ParameterError);
  auto m = manifest_from_json(nlohmann::json::parse(slurp(dir / "manifest.json")));
  EXPECT_EQ(m.failed_stage.value(), "tsne");
  EXPECT_EQ(m.stages.size(), 4u);
}
