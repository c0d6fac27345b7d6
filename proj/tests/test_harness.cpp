#include <gtest/gtest.h>

#include <set>

#include "test_util.hpp"
#include "xlsent/config.hpp"
#include "xlsent/metrics.hpp"
#include "xlsent/profile.hpp"
#include "xlsent/synthetic.hpp"

using namespace xlsent;
using namespace xlsent::harness;
using testutil::TempDir;
using L = SentimentLabel;

TEST(Metrics, Accuracy) {
  std::vector<L> g{L::positive, L::negative, L::neutral, L::positive};
  EXPECT_EQ(accuracy(g, g), 1.0);
  std::vector<L> half{L::positive, L::positive, L::positive, L::positive};
  EXPECT_EQ(accuracy(half, g), 0.5);
  EXPECT_THROW(accuracy({}, {}), InvalidArgument);
  EXPECT_THROW(accuracy({L::positive}, g), InvalidArgument);
}

TEST(Metrics, MacroF1) {
  std::vector<L> g{L::positive, L::negative, L::neutral};
  EXPECT_EQ(macro_f1(g, g), 1.0);
  // Nine examples, gold uniform, every prediction positive: F1(pos) = 1/2.
  std::vector<L> gold, pred(9, L::positive);
  for (int i = 0; i < 9; ++i) gold.push_back(label_from_code(i % 3));
  EXPECT_NEAR(macro_f1(pred, gold), 1.0 / 6.0, 1e-15);
  // Neutral absent from both sides contributes zero.
  std::vector<L> two{L::positive, L::negative};
  EXPECT_NEAR(macro_f1(two, two), 2.0 / 3.0, 1e-15);
  EXPECT_THROW(macro_f1({}, {}), InvalidArgument);
}

TEST(Metrics, ConfusionAndRanges) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 1 + rng.below(40);
    std::vector<L> p, g;
    for (std::size_t i = 0; i < n; ++i) {
      p.push_back(label_from_code(static_cast<int>(rng.below(3))));
      g.push_back(label_from_code(static_cast<int>(rng.below(3))));
    }
    auto m = evaluate(p, g);
    EXPECT_EQ(m.total, n);
    for (std::size_t c = 0; c < kNumLabels; ++c) {
      std::size_t row = 0, gold_count = 0;
      for (std::size_t k = 0; k < kNumLabels; ++k) row += m.confusion[c][k];
      for (L l : g) gold_count += static_cast<std::size_t>(label_code(l)) == c;
      EXPECT_EQ(row, gold_count);
      for (double v : {m.precision[c], m.recall[c], m.f1[c]}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
    EXPECT_NEAR(m.accuracy, accuracy(p, g), 1e-15);
    EXPECT_NEAR(m.macro_f1, (m.f1[0] + m.f1[1] + m.f1[2]) / 3.0, 1e-15);
  }
  EXPECT_FALSE(format_report(evaluate({L::positive}, {L::positive}), "t").empty());
}

TEST(Synthetic, CiphersComposeIntoGoldDictionaries) {
  SyntheticSpec spec;
  spec.languages = {"xa", "xb"};
  spec.vocab_size = 80;
  spec.positive_keywords = 8;
  spec.negative_keywords = 8;
  spec.labeled_per_language = 60;
  spec.parallel_size = 40;
  auto w = gen_synthetic(spec);
  const auto& d = w.gold_dictionaries.at({"xa", "xb"});
  EXPECT_EQ(d.size(), 80u);
  for (const auto& row : w.parallel.rows) {
    ASSERT_EQ(row.size(), 2u);
    ASSERT_EQ(row[0].tokens.size(), row[1].tokens.size());
    for (std::size_t i = 0; i < row[0].tokens.size(); ++i) EXPECT_EQ(*d.translate(row[0].tokens[i]), row[1].tokens[i]);
  }
  for (std::size_t k = 0; k < w.ciphers.size(); ++k) {
    std::set<std::string> uniq(w.ciphers[k].begin(), w.ciphers[k].end());
    EXPECT_EQ(uniq.size(), w.ciphers[k].size());
  }
}

TEST(Synthetic, DeterministicBySeed) {
  SyntheticSpec spec;
  spec.labeled_per_language = 30;
  spec.parallel_size = 20;
  auto a = gen_synthetic(spec), b = gen_synthetic(spec);
  EXPECT_EQ(a.ciphers, b.ciphers);
  EXPECT_EQ(a.parallel, b.parallel);
  EXPECT_EQ(a.labeled, b.labeled);
  spec.seed = 8;
  EXPECT_NE(gen_synthetic(spec).parallel, a.parallel);
}

TEST(Synthetic, LabelsBalancedForDefaultSpec) {
  auto w = gen_synthetic(SyntheticSpec{});
  for (const auto& [lang, d] : w.labeled) {
    std::array<double, kNumLabels> h{};
    for (const auto& ex : d.examples) h[static_cast<std::size_t>(label_code(ex.label))] += 1.0;
    for (double c : h) EXPECT_NEAR(c / static_cast<double>(d.size()), 1.0 / 3.0, 0.1) << lang;
  }
}

TEST(Synthetic, NonBijectiveCipherRejected) {
  SyntheticSpec spec;
  spec.languages = {"xa", "xb"};
  spec.vocab_size = 3;
  spec.positive_keywords = 1;
  spec.negative_keywords = 1;
  spec.ciphers = {{"a", "b", "c"}, {"x", "x", "z"}};
  EXPECT_THROW(gen_synthetic(spec), InvalidArgument);
  EXPECT_THROW(validate_ciphers({{"a", "b"}}, 3), InvalidArgument);
  EXPECT_NO_THROW(validate_ciphers({{"a", "b", "c"}}, 3));
}

TEST(Synthetic, WritesFiles) {
  TempDir dir;
  SyntheticSpec spec;
  spec.labeled_per_language = 30;
  spec.parallel_size = 10;
  spec.monolingual_size = 5;
  spec.tagged_size = 5;
  auto files = write_synthetic(gen_synthetic(spec), dir.path());
  for (const auto& f : files) EXPECT_TRUE(std::filesystem::exists(f)) << f;
  EXPECT_TRUE(std::filesystem::exists(dir / "xa.train.tsv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "dict.gold.xa-xc.tsv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "parallel.xc.txt"));
}

TEST(Profile, FullScaleValues) {
  auto h = default_hyperparameters();
  EXPECT_EQ(h.full.dims, (nn::Dims{300, 400, 50, 400, 400, false}));
  EXPECT_EQ(h.full.batch_size, 10000);
  EXPECT_EQ(h.full.epochs_single_source, 7);
  EXPECT_EQ(h.full.epochs_multi_source, 2);
  EXPECT_EQ(h.full.lexicon_delta, 0.1);
  EXPECT_EQ(h.full.clusters, 500);
}

TEST(Profile, DeskAndLookup) {
  auto h = default_hyperparameters();
  EXPECT_EQ(h.desk.dims, (nn::Dims{16, 16, 8, 16, 16, false}));
  EXPECT_EQ(h.desk.batch_size, 32);
  EXPECT_EQ(profile_by_name("full").name, "full");
  EXPECT_EQ(profile_by_name("desk").name, "desk");
  EXPECT_THROW(profile_by_name("huge"), InvalidArgument);
}

TEST(Config, ParsesSectionsAndTypes) {
  auto c = Config::parse("top = 1\n[plan]\nmethod = projection\nseed=42\n; note\n[resources]\ntrain.en = a.tsv\n"
                         "train.de = b.tsv\ntest = t.tsv\n[x]\nflag = yes\nrate = 0.25\n");
  EXPECT_EQ(c.get("plan", "method"), "projection");
  EXPECT_EQ(c.get_int("plan", "seed", 0), 42);
  EXPECT_EQ(c.get_int("plan", "missing", 7), 7);
  EXPECT_TRUE(c.get_bool("x", "flag", false));
  EXPECT_EQ(c.get_double("x", "rate", 0), 0.25);
  EXPECT_EQ(c.get("", "top"), "1");
  EXPECT_FALSE(c.get("nope", "k").has_value());
  auto m = c.with_prefix("resources", "train.");
  EXPECT_EQ(m, (std::map<std::string, std::string>{{"de", "b.tsv"}, {"en", "a.tsv"}}));
  EXPECT_THROW(c.get_int("plan", "method", 0), DataError);
  EXPECT_THROW(c.get_bool("plan", "method", false), DataError);
  c.set("plan", "seed", "5");
  EXPECT_EQ(c.get_int("plan", "seed", 0), 5);
}

TEST(Config, LoadErrors) {
  TempDir dir;
  EXPECT_THROW(Config::load(dir / "absent.ini"), DataError);
  testutil::write_file(dir / "bad.ini", "[open\nkey\n");
  EXPECT_THROW(Config::load(dir / "bad.ini"), DataError);
}
