#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "../support/gradcheck.hpp"
#include "doconto/encoder.hpp"

using namespace doconto;

namespace {

std::vector<HeaderRecord> records(std::initializer_list<const char*> raws) {
  std::vector<HeaderRecord> out;
  for (auto r : raws) out.push_back(make_header_record("d", HeaderLevel::top, r));
  return out;
}

VaeParameters tiny_vae(std::uint64_t seed = 3) {
  std::mt19937_64 rng(seed);
  return VaeParameters::initialize({6, 3, 4, 2, 3}, rng);
}

}  // namespace

TEST(Vocabulary, RankRuleAndTies) {
  auto v = build_vocabulary(records({"intro intro intro intro intro", "of of of", "x"}), 4);
  EXPECT_EQ(v.size(), 4u);
  EXPECT_EQ(v.index_of("intro"), 2u);
  EXPECT_EQ(v.index_of("of"), 3u);
  EXPECT_EQ(v.index_of("x"), kUnk);

  auto empty = build_vocabulary(std::vector<HeaderRecord>{}, 10);
  EXPECT_EQ(empty.size(), 2u);

  auto tie = build_vocabulary(records({"b a", "a b"}), 3);
  EXPECT_EQ(tie.size(), 3u);
  EXPECT_EQ(tie.index_of("a"), 2u);
  EXPECT_EQ(tie.index_of("b"), kUnk);
}

TEST(EncodeHeader, PadUnkAndTruncate) {
  Vocabulary v(std::vector<std::string>{"intro", "of"});
  std::vector<std::string> t{"intro", "of"};
  EXPECT_EQ(encode_tokens(t, v, 4).indices, (std::vector<TokenIndex>{2, 3, 0, 0}));
  std::vector<std::string> oov{"zzz"};
  EXPECT_EQ(encode_tokens(oov, v, 2).indices, (std::vector<TokenIndex>{1, 0}));
  std::vector<std::string> six{"intro", "of", "intro", "of", "x", "y"};
  EXPECT_EQ(encode_tokens(six, v, 4).indices, (std::vector<TokenIndex>{2, 3, 2, 3}));
}

TEST(KlDivergence, ClosedForm) {
  std::vector<double> z3(3, 0.0);
  EXPECT_EQ(kl_unit_gaussian(z3, z3), 0.0);
  std::vector<double> one{1.0}, zero{0.0};
  EXPECT_NEAR(kl_unit_gaussian(one, zero), 0.5, 1e-12);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> mu{n(rng), n(rng)}, ls{n(rng) / 3, n(rng) / 3};
    EXPECT_GE(kl_unit_gaussian(mu, ls), 0.0);
  }
}

TEST(VaeLoss, PerfectReconstructionNearZero) {
  VaeForwardOutput out;
  out.mu = {0.0};
  out.log_sigma = {0.0};
  EncodedHeader target{{2, 0, 1}};
  out.reconstruction = Tensor(3, 4);
  for (std::size_t l = 0; l < 3; ++l)
    for (std::size_t v = 0; v < 4; ++v) out.reconstruction(l, v) = clamp_probability(v == target.indices[l] ? 1.0 : 0.0);
  auto l = vae_loss(out, target);
  EXPECT_NEAR(l.recon, 0.0, 1e-4);
  EXPECT_EQ(l.kl, 0.0);
  EXPECT_DOUBLE_EQ(l.total, l.recon + l.kl);
}

TEST(VaeForward, Reparameterization) {
  auto p = tiny_vae();
  EncodedHeader x{{2, 3, 0}};
  std::vector<double> zero(2, 0.0), ones(2, 1.0);
  auto a = vae_forward(p, x, zero);
  EXPECT_EQ(a.z, a.mu);
  auto b = vae_forward(p, x, ones);
  for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(b.z[j], b.mu[j] + std::exp(b.log_sigma[j]));

  // zero log-sigma head: z = mu + 1 exactly
  auto q = p;
  q.logsig_w.zero();
  q.logsig_b.zero();
  auto c = vae_forward(q, x, ones);
  for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(c.z[j], c.mu[j] + 1.0);
}

TEST(VaeForward, BatchShapesAndRange) {
  auto p = tiny_vae();
  std::vector<EncodedHeader> batch{{{2, 3, 0}}, {{4, 0, 0}}, {{5, 5, 5}}};
  std::mt19937_64 rng(1);
  auto outs = vae_forward(p, batch, sample_noise(p, batch.size(), rng));
  ASSERT_EQ(outs.size(), 3u);
  for (const auto& o : outs) {
    EXPECT_EQ(o.reconstruction.rows, 3u);
    EXPECT_EQ(o.reconstruction.cols, 6u);
    for (double v : o.reconstruction.data) {
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
  }
  std::vector<double> bad(3, 0.0);
  EXPECT_THROW(vae_forward(p, batch[0], bad), ParameterError);
}

TEST(VaeForward, NonFiniteNamesLayer) {
  auto p = tiny_vae();
  p.enc_b.data[0] = std::numeric_limits<double>::infinity();
  std::vector<double> eps(2, 0.0);
  try {
    vae_forward(p, EncodedHeader{{2, 3, 0}}, eps);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("hidden"), std::string::npos) << e.what();
  }
}

TEST(Gradients, VaeMatchesFiniteDifferences) {
  for (std::uint64_t s = 0; s < 10; ++s) EXPECT_LE(doconto::testing::vae_gradcheck(s).max_rel, 1e-4) << "seed " << s;
}

TEST(Gradients, CaeMatchesFiniteDifferences) {
  for (std::uint64_t s = 0; s < 10; ++s) EXPECT_LE(doconto::testing::cae_gradcheck(s).max_rel, 1e-4) << "seed " << s;
}

namespace {

std::vector<EncodedHeader> one_header_corpus(std::size_t n) {
  return std::vector<EncodedHeader>(n, EncodedHeader{std::vector<TokenIndex>{2, 3, 4, 0, 0}});
}

TrainConfig small_cfg() {
  TrainConfig c;
  c.length = 5;
  c.embed = 8;
  c.hidden = 16;
  c.latent = 4;
  c.batch_size = 16;
  c.epochs = 20;
  return c;
}

}  // namespace

TEST(TrainVae, DeterministicHistoryAndSplit) {
  auto corpus = one_header_corpus(40);
  auto cfg = small_cfg();
  auto a = train_vae(corpus, 6, cfg);
  auto b = train_vae(corpus, 6, cfg);
  EXPECT_EQ(a.history, b.history);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.history.size(), cfg.epochs);
  EXPECT_EQ(a.val_rows.size(), 4u);
}

TEST(TrainVae, SingleHeaderLossHalves) {
  auto cfg = small_cfg();
  cfg.epochs = 200;
  cfg.batch_size = 64;
  auto r = train_vae(one_header_corpus(200), 6, cfg);
  EXPECT_LT(r.history.back().val_total, 0.5 * r.history.front().val_total);
}

TEST(TrainVae, ZeroLearningRateKeepsLossConstant) {
  auto cfg = small_cfg();
  cfg.learning_rate = 0.0;
  auto r = train_vae(one_header_corpus(40), 6, cfg);
  for (const auto& e : r.history) {
    EXPECT_NEAR(e.train_total, r.history.front().train_total, 1e-12);
    EXPECT_NEAR(e.val_total, r.history.front().val_total, 1e-12);
  }
}

TEST(TrainVae, RejectsBadConfig) {
  auto cfg = small_cfg();
  cfg.validation_fraction = 0.0;
  EXPECT_THROW(train_vae(one_header_corpus(10), 6, cfg), ParameterError);
}

TEST(TrainCae, MemorizesSmallSet) {
  std::vector<EncodedHeader> set;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) set.push_back(doconto::testing::random_header(12, 5, rng));
  std::vector<EncodedHeader> corpus;
  for (int rep = 0; rep < 10; ++rep) corpus.insert(corpus.end(), set.begin(), set.end());

  TrainConfig cfg = TrainConfig::cae_defaults();
  cfg.length = 5;
  cfg.embed = 16;
  cfg.channels = 32;
  cfg.batch_size = 16;
  cfg.epochs = 300;
  auto r = train_cae(corpus, 12, cfg);

  std::size_t hit = 0, total = 0;
  for (const auto& h : set) {
    auto out = cae_forward(r.params, h);
    for (std::size_t l = 0; l < 5; ++l) {
      if (h.indices[l] == kPad) continue;
      auto row = out.reconstruction.row(l);
      auto arg = std::max_element(row.begin(), row.end()) - row.begin();
      ++total;
      hit += static_cast<std::size_t>(arg) == h.indices[l];
    }
  }
  EXPECT_GE(static_cast<double>(hit), 0.9 * static_cast<double>(total));
}

TEST(TrainCae, DeterministicAndShapePreserving) {
  TrainConfig cfg = TrainConfig::cae_defaults();
  cfg.length = 5;
  cfg.embed = 4;
  cfg.channels = 4;
  cfg.epochs = 3;
  cfg.pool = 1;
  cfg.upsample = 1;
  auto corpus = one_header_corpus(20);
  auto a = train_cae(corpus, 6, cfg);
  EXPECT_EQ(a.history, train_cae(corpus, 6, cfg).history);
  EXPECT_EQ(cae_forward(a.params, corpus[0]).reconstruction.rows, 5u);
  EXPECT_EQ(cae_embed(a.params, corpus[0]).size(), 5u * 4u);
}

TEST(EmbedHeaders, DuplicatesAndShape) {
  auto p = tiny_vae();
  std::vector<EncodedHeader> hs{{{2, 3, 0}}, {{4, 0, 0}}, {{2, 3, 0}}};
  std::vector<std::string> labels{"a b", "c", "a b"};
  auto m = embed_headers(p, hs, labels);
  EXPECT_EQ(m.rows.rows, 3u);
  EXPECT_EQ(m.rows.cols, 2u);
  EXPECT_TRUE(std::equal(m.rows.row(0).begin(), m.rows.row(0).end(), m.rows.row(2).begin()));

  std::stringstream ss;
  write_embedding_tsv(ss, m);
  EXPECT_EQ(read_embedding_tsv(ss), m);
}

TEST(EmbedHeaders, VaeEmbeddingIgnoresNoiseSeed) {
  auto corpus = one_header_corpus(30);
  auto cfg = small_cfg();
  cfg.epochs = 5;
  auto a = train_vae(corpus, 6, cfg);
  auto b = train_vae(corpus, 6, cfg);
  EXPECT_EQ(vae_embed(a.params, corpus[0]), vae_embed(b.params, corpus[0]));
  std::vector<double> e1(4, 0.3), e2(4, -2.0);
  EXPECT_NE(vae_forward(a.params, corpus[0], e1).z, vae_forward(a.params, corpus[0], e2).z);
}

TEST(Checkpoint, JsonRoundTrip) {
  auto p = tiny_vae();
  Vocabulary v(std::vector<std::string>{"a", "b", "c", "d"});
  TrainConfig cfg;
  cfg.length = 3;
  VaeCheckpoint ck{p, v, cfg};
  auto back = std::get<VaeCheckpoint>(checkpoint_from_json(nlohmann::json::parse(to_json(ck).dump())));
  EXPECT_EQ(back.params, p);
  EXPECT_EQ(back.vocabulary, v);
}

TEST(Optimizer, AdamAndRmspropMoveDownhill) {
  for (auto kind : {OptimizerKind::adam, OptimizerKind::rmsprop}) {
    VaeParameters p = tiny_vae();
    auto x = EncodedHeader{{2, 3, 0}};
    std::vector<double> eps(2, 0.0);
    const double before = vae_loss(vae_forward(p, x, eps), x).total;
    Optimizer opt({kind, 1e-2}, p);
    for (int i = 0; i < 20; ++i) {
      VaeParameters g = VaeParameters::zeros(p.shape);
      vae_backward(p, x, eps, vae_forward(p, x, eps), g);
      opt.step(p, g);
    }
    EXPECT_LT(vae_loss(vae_forward(p, x, eps), x).total, before);
  }
}

TEST(LossCsv, RoundTrip) {
  std::vector<EpochLoss> h{{1, 2.5, 3.25}, {2, 1.0 / 3.0, 0.1}};
  std::stringstream ss;
  write_loss_csv(ss, h);
  EXPECT_EQ(read_loss_csv(ss), h);
}
