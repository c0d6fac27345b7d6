#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "test_util.hpp"
#include "xlsent/nbsvm.hpp"

using namespace xlsent;
using namespace xlsent::nbsvm;
using testutil::TempDir;

namespace {

using Tokens = std::vector<std::string>;

LabeledDataset dataset(const std::vector<std::pair<Tokens, SentimentLabel>>& rows) {
  LabeledDataset d;
  d.language = "xa";
  for (const auto& [t, l] : rows) d.examples.push_back({{t, "xa"}, l});
  return d;
}

LabeledDataset separable() {
  using L = SentimentLabel;
  return dataset({{{"good", "movie"}, L::positive},
                  {{"a", "good", "day"}, L::positive},
                  {{"good"}, L::positive},
                  {{"bad", "movie"}, L::negative},
                  {{"a", "bad", "day"}, L::negative},
                  {{"bad"}, L::negative},
                  {{"the", "movie"}, L::neutral},
                  {{"a", "day"}, L::neutral}});
}

double train_accuracy(const NbSvmModel& m, const LabeledDataset& d) {
  std::size_t ok = 0;
  for (const auto& ex : d.examples) ok += predict_nbsvm(m, ex.sentence.tokens).label == ex.label;
  return static_cast<double>(ok) / static_cast<double>(d.size());
}

}  // namespace

TEST(Ratio, HandComputedValue) {
  // vocab {w, u}: p = (2, 0), q = (0, 2), alpha = 1
  auto r = log_count_ratio({2.0, 0.0}, {0.0, 2.0}, 1.0);
  EXPECT_NEAR(r[0], std::log(3.0), 1e-15);
  EXPECT_NEAR(r[1], -std::log(3.0), 1e-15);
}

TEST(Ratio, DuplicatedCountsInSmallAlphaLimit) {
  std::vector<double> p{3, 1, 0.5, 2}, q{1, 4, 2, 0.5};
  std::vector<double> p2, q2;
  for (double v : p) p2.push_back(2 * v);
  for (double v : q) q2.push_back(2 * v);
  auto a = log_count_ratio(p, q, 1e-9), b = log_count_ratio(p2, q2, 1e-9);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-8);
  EXPECT_THROW(log_count_ratio(p, q, 0.0), InvalidArgument);
  EXPECT_THROW(log_count_ratio(p, {1.0}, 1.0), InvalidArgument);
}

TEST(Train, DuplicatedDatasetKeepsRatios) {
  auto d = separable();
  auto dd = d;
  for (const auto& ex : d.examples) dd.examples.push_back(ex);
  NbSvmConfig cfg;
  cfg.alpha = 1e-9;
  auto a = train_nbsvm(d, cfg), b = train_nbsvm(dd, cfg);
  ASSERT_EQ(a.vocabulary, b.vocabulary);
  // Features unseen on one side diverge with log(alpha) and are not compared.
  std::size_t compared = 0;
  for (std::size_t c = 0; c < kNumLabels; ++c)
    for (std::size_t i = 0; i < a.vocabulary.size(); ++i) {
      if (std::abs(a.ratios[c][i]) > 10.0) continue;
      EXPECT_NEAR(a.ratios[c][i], b.ratios[c][i], 1e-7);
      ++compared;
    }
  EXPECT_GT(compared, 3u);
}

TEST(Train, SeparableToySet) {
  auto m = train_nbsvm(separable());
  EXPECT_EQ(train_accuracy(m, separable()), 1.0);
  EXPECT_EQ(predict_nbsvm(m, {"good", "good"}).label, SentimentLabel::positive);
  EXPECT_EQ(predict_nbsvm(m, {"bad"}).label, SentimentLabel::negative);
  for (const auto& w : m.weights)
    for (double v : w) EXPECT_TRUE(std::isfinite(v));
}

TEST(Train, SingleLabelIsError) {
  using L = SentimentLabel;
  EXPECT_THROW(train_nbsvm(dataset({{{"a"}, L::positive}, {{"b"}, L::positive}})), InvalidArgument);
  NbSvmConfig cfg;
  cfg.epochs = 0;
  EXPECT_THROW(train_nbsvm(separable(), cfg), InvalidArgument);
}

TEST(Train, Deterministic) {
  auto a = train_nbsvm(separable()), b = train_nbsvm(separable());
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
}

TEST(Predict, OovFallsBackToBiases) {
  auto m = train_nbsvm(separable());
  auto p = predict_nbsvm(m, {"zzz", "qqq"});
  EXPECT_EQ(p.scores, m.bias);
  auto best = std::max_element(m.bias.begin(), m.bias.end()) - m.bias.begin();
  EXPECT_EQ(label_code(p.label), best);
}

TEST(Predict, TieGoesToLowerCode) {
  NbSvmModel m;
  m.bias = {0.5, 0.5, 0.5};
  EXPECT_EQ(predict_nbsvm(m, {"x"}).label, SentimentLabel::positive);
  m.bias = {0.1, 0.7, 0.7};
  EXPECT_EQ(predict_nbsvm(m, {"x"}).label, SentimentLabel::negative);
}

TEST(Predict, TokenOrderInvariant) {
  auto m = train_nbsvm(separable());
  Tokens s{"a", "good", "movie", "day"};
  auto base = predict_nbsvm(m, s).scores;
  std::sort(s.begin(), s.end());
  do {
    EXPECT_EQ(predict_nbsvm(m, s).scores, base);
  } while (std::next_permutation(s.begin(), s.end()));
}

TEST(Features, BinarisedAndBigrams) {
  auto m = train_nbsvm(separable());
  EXPECT_EQ(m.features({"good", "good"}), m.features({"good"}));
  EXPECT_EQ(feature_strings({"a", "b", "c"}, true), (Tokens{"a", "b", "c", "a_b", "b_c"}));
  NbSvmConfig cfg;
  cfg.bigrams = true;
  auto mb = train_nbsvm(separable(), cfg);
  EXPECT_TRUE(mb.index.count("good_movie"));
  EXPECT_EQ(train_accuracy(mb, separable()), 1.0);
}

TEST(Model, SaveLoadKeepsScores) {
  TempDir dir;
  auto m = train_nbsvm(separable());
  m.save(dir / "m.tsv");
  auto back = NbSvmModel::load(dir / "m.tsv");
  for (const Tokens& s : {Tokens{"good"}, Tokens{"bad", "day"}, Tokens{"zzz"}, Tokens{"a", "movie"}}) {
    auto a = predict_nbsvm(m, s), b = predict_nbsvm(back, s);
    EXPECT_EQ(a.label, b.label);
    for (std::size_t c = 0; c < kNumLabels; ++c) EXPECT_NEAR(a.scores[c], b.scores[c], 1e-12);
  }
  testutil::write_file(dir / "bad.tsv", "positive\tgood\n");
  EXPECT_THROW(NbSvmModel::load(dir / "bad.tsv"), DataError);
}
