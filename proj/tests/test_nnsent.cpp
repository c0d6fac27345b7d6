#include <gtest/gtest.h>

#include <cmath>

#include "nn_oracle.hpp"
#include "test_util.hpp"
#include "xlsent/nnsent.hpp"

using namespace xlsent;
using namespace xlsent::nn;
using testutil::TempDir;

namespace {

using Tokens = std::vector<std::string>;

LabeledDataset dataset(const std::vector<std::pair<Tokens, SentimentLabel>>& rows, const std::string& lang = "xa") {
  LabeledDataset d;
  d.language = lang;
  for (const auto& [t, l] : rows) d.examples.push_back({{t, lang}, l});
  return d;
}

// 20 examples; each label owns a disjoint word pool.
LabeledDataset toy_set(std::uint64_t seed) {
  const std::vector<Tokens> pools{{"joy", "good", "great", "fine"}, {"bad", "awful", "sad", "poor"},
                                  {"table", "blue", "chair", "door"}};
  Rng rng(seed);
  std::vector<std::pair<Tokens, SentimentLabel>> rows;
  for (int i = 0; i < 20; ++i) {
    int l = i % 3;
    Tokens t;
    std::size_t n = 2 + rng.below(4);
    for (std::size_t k = 0; k < n; ++k) t.push_back(pools[static_cast<std::size_t>(l)][rng.below(4)]);
    rows.push_back({t, label_from_code(l)});
  }
  return dataset(rows);
}

Dims small_dims() { return {4, 6, 3, 5, 8, false}; }

xling::EmbeddingTable random_embeddings(const Tokens& words, int dim, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd v(static_cast<Eigen::Index>(words.size()), dim);
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = rng.uniform(-1, 1);
  return xling::EmbeddingTable(words, v);
}

double max_abs_diff(const Eigen::VectorXd& a, const std::vector<double>& b) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a(i) - b[static_cast<std::size_t>(i)]));
  return m;
}

}  // namespace

TEST(Features, DictionaryLookupAndUnknownRows) {
  FeatureConfig cfg;
  cfg.dims = {2, 2, 2, 2, 2, true};
  align::Dictionary dict("xa", "xb");
  dict.offer("bon", "good", 3);
  cfg.dictionary = dict;
  cfg.fixed_vocab = Vocabulary({"good", "bad"});
  cfg.word_vocab = Vocabulary({"bad", "good"});
  cfg.clusters.num_clusters = 2;
  cfg.clusters.assignment = {{"good", 1}, {"bad", 0}};
  lexicon::WordLexicon lex;
  lex.entries["good"] = {0.75, 0.0};
  cfg.lexicon = lex;

  auto x = featurize({{"bon", "bad", "zzz"}, "xa"}, cfg);
  ASSERT_EQ(x.size(), 3u);
  EXPECT_EQ(x.fixed, (std::vector<int>{1, 2, 0}));
  EXPECT_EQ(x.word, (std::vector<int>{2, 1, 0}));
  EXPECT_EQ(x.cluster, (std::vector<int>{2, 1, 0}));
  ASSERT_EQ(x.sentiment.size(), 3u);
  EXPECT_EQ(x.sentiment[0], (lexicon::Polarity{0.75, 0.0}));
  EXPECT_EQ(x.sentiment[2], (lexicon::Polarity{0.0, 0.0}));

  cfg.dims.lexicon_feature = false;
  EXPECT_TRUE(featurize({{"bon"}, "xa"}, cfg).sentiment.empty());
}

TEST(Features, InputWidth) {
  EXPECT_EQ((Dims{300, 400, 50, 400, 400, false}.input()), 750);
  EXPECT_EQ((Dims{300, 400, 50, 400, 400, true}.input()), 752);
}

TEST(Forward, ZeroParametersGiveUniform) {
  Dims d = small_dims();
  auto params = make_params(d, 2, 3, 2);
  TokenFeatures x{{0, 1}, {2, 1}, {1, 0}, {}};
  auto tr = forward(params, d, x);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(tr.probs(k), 1.0 / 3.0, 1e-15);
}

TEST(Forward, SingleTokenPoolIsItsFeature) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto in = oracle::random_instance(rng, 5, 1);
    auto tr = forward(in.params, in.dims, in.x);
    Eigen::MatrixXd f = input_features(in.params, in.dims, in.x);
    EXPECT_LT((tr.p - f.col(0)).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Forward, MatchesLoopOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    auto in = oracle::random_instance(rng, 6, 7, 1.0);
    auto tr = forward(in.params, in.dims, in.x);
    auto ref = oracle::forward(in.params, in.dims, in.x);
    EXPECT_LT(max_abs_diff(tr.probs, ref.probs), 1e-10) << trial;
    EXPECT_LT(max_abs_diff(tr.p, ref.p), 1e-12) << trial;
    EXPECT_NEAR(tr.probs.sum(), 1.0, 1e-12);
  }
}

TEST(Forward, PoolIgnoresOrderButFullOutputDoesNot) {
  Rng rng(5);
  auto in = oracle::random_instance(rng, 5, 1);
  in.dims.d_rec = 3;
  in.params = make_params(in.dims, 3, 3, 3);
  in.params.for_each_trainable([&](const char*, Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1, 1);
  });
  for (Eigen::Index i = 0; i < in.params.fixed_emb.size(); ++i) in.params.fixed_emb.data()[i] = rng.uniform(-1, 1);
  TokenFeatures a{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {}};
  TokenFeatures b{{2, 0, 1}, {0, 1, 2}, {1, 2, 0}, {}};
  in.dims.lexicon_feature = false;
  auto ta = forward(in.params, in.dims, a);
  auto tb = forward(in.params, in.dims, b);
  EXPECT_LT((ta.p - tb.p).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_GT((ta.probs - tb.probs).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Softmax, StableForLargeLogits) {
  Eigen::VectorXd z(3);
  z << 1000.0, 1000.0, -1000.0;
  auto p = softmax(z);
  EXPECT_TRUE(p.allFinite());
  EXPECT_NEAR(p(0), 0.5, 1e-15);
  EXPECT_NEAR(p(2), 0.0, 1e-15);
  Eigen::VectorXd shifted = z.array() - 1234.5;
  EXPECT_LT((softmax(shifted) - p).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Loss, ZeroParametersGiveLogThreePerExample) {
  Dims d = small_dims();
  auto params = make_params(d, 2, 3, 2);
  TokenFeatures x1{{0}, {1}, {0}, {}}, x2{{1, 0}, {2, 2}, {1, 1}, {}};
  Batch batch{{&x1, &x2, &x1}, {SentimentLabel::positive, SentimentLabel::neutral, SentimentLabel::negative}};
  auto grads = params.zeros_like();
  EXPECT_NEAR(loss_and_grad(params, d, batch, grads), 3.0 * std::log(3.0), 1e-12);
}

TEST(Loss, DuplicatedExampleDoublesGradient) {
  Rng rng(21);
  auto in = oracle::random_instance(rng, 5, 4);
  Batch one{{&in.x}, {in.gold}};
  Batch two{{&in.x, &in.x}, {in.gold, in.gold}};
  auto g1 = in.params.zeros_like();
  auto g2 = in.params.zeros_like();
  double l1 = loss_and_grad(in.params, in.dims, one, g1);
  double l2 = loss_and_grad(in.params, in.dims, two, g2);
  EXPECT_NEAR(l2, 2.0 * l1, 1e-12);
  std::vector<Eigen::MatrixXd> b1, b2;
  g1.for_each_trainable([&](const char*, const Eigen::MatrixXd& m) { b1.push_back(m); });
  g2.for_each_trainable([&](const char*, const Eigen::MatrixXd& m) { b2.push_back(m); });
  for (std::size_t k = 0; k < b1.size(); ++k) EXPECT_LT((2.0 * b1[k] - b2[k]).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Loss, BackwardAccumulates) {
  Rng rng(8);
  auto in = oracle::random_instance(rng, 4, 3);
  auto g = in.params.zeros_like();
  backward(in.params, in.dims, in.x, in.gold, g);
  auto once = g;
  backward(in.params, in.dims, in.x, in.gold, g);
  EXPECT_LT((g.hidden - 2.0 * once.hidden).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Gradient, EveryBlockMatchesFiniteDifferences) {
  Rng rng(2024);
  for (int trial = 0; trial < 12; ++trial) {
    auto in = oracle::random_instance(rng, 4, 5);
    auto errs = oracle::gradient_check(in);
    ASSERT_EQ(errs.size(), 12u);
    for (const auto& e : errs) EXPECT_LT(e.rel_error, 1e-4) << "trial " << trial << " block " << e.name;
  }
}

TEST(Init, ShapesAndForgetBias) {
  Dims d = small_dims();
  auto p = make_params(d, 4, 5, 3);
  EXPECT_EQ(p.fixed_emb.rows(), 4);
  EXPECT_EQ(p.fixed_emb.cols(), d.d_ce);
  EXPECT_EQ(p.fwd.W.rows(), 4 * d.d_rec);
  EXPECT_EQ(p.fwd.W.cols(), d.input());
  EXPECT_EQ(p.hidden.cols(), 2 * d.d_rec + d.input());
  EXPECT_EQ(p.out.rows(), 3);
  Rng rng(1);
  init_params(p, rng);
  for (int k = 0; k < d.d_rec; ++k) {
    EXPECT_EQ(p.fwd.b(d.d_rec + k, 0), 1.0);
    EXPECT_EQ(p.bwd.b(k, 0), 0.0);
  }
  EXPECT_EQ(p.fixed_emb.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE(p.word_emb.cwiseAbs().maxCoeff(), 0.1);
  EXPECT_TRUE(p.all_finite());
}

TEST(Adam, ZeroGradientLeavesParameters) {
  Rng rng(4);
  auto in = oracle::random_instance(rng, 4, 2);
  auto before = in.params;
  auto state = AdamState::fresh(in.params);
  adam_step(in.params, in.params.zeros_like(), state);
  EXPECT_EQ(in.params.hidden, before.hidden);
  EXPECT_EQ(in.params.word_emb, before.word_emb);
  EXPECT_EQ(state.t, 1);
}

TEST(Adam, FirstStepHasLearningRateMagnitude) {
  auto p = make_params(small_dims(), 2, 2, 2);
  auto g = p.zeros_like();
  g.out_bias(0, 0) = 5.0;
  g.out_bias(1, 0) = -0.01;
  auto state = AdamState::fresh(p);
  adam_step(p, g, state);
  EXPECT_NEAR(p.out_bias(0, 0), -1e-3, 1e-10);
  EXPECT_NEAR(p.out_bias(1, 0), 1e-3, 1e-8);
  EXPECT_EQ(p.out_bias(2, 0), 0.0);
  adam_step(p, g, state);
  EXPECT_NEAR(p.out_bias(0, 0), -2e-3, 1e-9);
}

TEST(Adam, ShapeMismatchThrows) {
  auto p = make_params(small_dims(), 2, 2, 2);
  auto g = make_params(small_dims(), 2, 3, 2).zeros_like();
  auto state = AdamState::fresh(p);
  EXPECT_THROW(adam_step(p, g, state), std::exception);
}

TEST(Training, OverfitsTwentyExamples) {
  auto data = toy_set(1);
  Resources res;
  res.dims = small_dims();
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.batch_size = 5;
  cfg.adam.lr = 0.02;
  auto m = train(data, nullptr, res, cfg);
  EXPECT_EQ(accuracy_on(m, data), 1.0);
}

TEST(Training, LossDecreasesEarly) {
  auto data = toy_set(2);
  Resources res;
  res.dims = small_dims();
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 20;
  TrainHistory h;
  train(data, &data, res, cfg, &h);
  ASSERT_EQ(h.epoch_loss.size(), 5u);
  ASSERT_EQ(h.dev_accuracy.size(), 5u);
  for (std::size_t e = 1; e < 5; ++e) EXPECT_LT(h.epoch_loss[e], h.epoch_loss[e - 1]);
}

TEST(Training, FixedEmbeddingsUntouched) {
  auto data = toy_set(3);
  Resources res;
  res.dims = small_dims();
  res.embeddings = random_embeddings({"joy", "bad", "table", "chair"}, res.dims.d_ce, 9);
  auto start = build_model(data, res, 5);
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.batch_size = 4;
  cfg.seed = 5;
  auto m = train(data, nullptr, res, cfg);
  EXPECT_EQ(m.params.fixed_emb, start.params.fixed_emb);
  EXPECT_EQ(m.params.fixed_emb.row(0).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_NE(m.params.word_emb, start.params.word_emb);
}

TEST(Training, BitwiseDeterministic) {
  auto data = toy_set(4);
  Resources res;
  res.dims = small_dims();
  res.dims.lexicon_feature = true;
  lexicon::WordLexicon lex;
  lex.entries["good"] = {0.5, 0.0};
  res.lexicon = lex;
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 6;
  cfg.seed = 77;
  auto a = train(data, nullptr, res, cfg);
  auto b = train(data, nullptr, res, cfg);
  EXPECT_EQ(a.serialize(), b.serialize());
  cfg.seed = 78;
  EXPECT_NE(train(data, nullptr, res, cfg).serialize(), a.serialize());
}

TEST(Training, RejectsBadConfig) {
  auto data = toy_set(1);
  Resources res;
  res.dims = small_dims();
  TrainConfig cfg;
  cfg.epochs = -1;
  EXPECT_THROW(train(data, nullptr, res, cfg), InvalidArgument);
  cfg.epochs = 1;
  cfg.batch_size = 0;
  EXPECT_THROW(train(data, nullptr, res, cfg), InvalidArgument);
  cfg.batch_size = 4;
  res.embeddings = random_embeddings({"joy"}, res.dims.d_ce + 1, 1);
  cfg.epochs = 1;
  EXPECT_THROW(train(data, nullptr, res, cfg), InvalidArgument);
}

TEST(Predict, ArgmaxTiesGoToLowerCode) {
  EXPECT_EQ(argmax_label({0.2, 0.5, 0.3}), SentimentLabel::negative);
  EXPECT_EQ(argmax_label({0.4, 0.4, 0.2}), SentimentLabel::positive);
  EXPECT_EQ(argmax_label({1.0 / 3, 1.0 / 3, 1.0 / 3}), SentimentLabel::positive);
  EXPECT_EQ(argmax_label({0.1, 0.45, 0.45}), SentimentLabel::negative);
}

TEST(Predict, UntrainedZeroModelPredictsPositive) {
  auto data = toy_set(1);
  Resources res;
  res.dims = small_dims();
  auto m = build_model(data, res, 1);
  m.params.for_each_trainable([](const char*, Eigen::MatrixXd& b) { b.setZero(); });
  auto p = m.predict({{"anything"}, "xa"});
  EXPECT_EQ(p.label, SentimentLabel::positive);
  for (double v : p.distribution) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
}

TEST(Model, SaveLoadRoundTrip) {
  TempDir dir;
  auto data = toy_set(6);
  Resources res;
  res.dims = small_dims();
  res.dims.lexicon_feature = true;
  res.embeddings = random_embeddings({"joy", "sad"}, res.dims.d_ce, 2);
  res.clusters.num_clusters = 2;
  res.clusters.assignment = {{"joy", 0}, {"sad", 1}};
  align::Dictionary dict("xa", "xb");
  dict.offer("great", "joy", 1);
  res.dictionary = dict;
  lexicon::WordLexicon lex;
  lex.entries["joy"] = {0.9, 0.1};
  res.lexicon = lex;
  TrainConfig cfg;
  cfg.epochs = 2;
  auto m = train(data, nullptr, res, cfg);
  m.save(dir / "m.txt");
  auto back = SentimentModel::load(dir / "m.txt");
  EXPECT_EQ(back.serialize(), m.serialize());
  EXPECT_EQ(back.features.dims, m.features.dims);
  for (const auto& ex : data.examples) {
    auto a = m.predict(ex.sentence), b = back.predict(ex.sentence);
    EXPECT_EQ(a.label, b.label);
    EXPECT_EQ(a.distribution, b.distribution);
  }
}

TEST(Model, CorruptFileRejected) {
  EXPECT_THROW(SentimentModel::deserialize("not a model"), DataError);
  TempDir dir;
  EXPECT_THROW(SentimentModel::load(dir / "absent.txt"), DataError);
}
