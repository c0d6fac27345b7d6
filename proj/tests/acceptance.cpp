// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "nn_oracle.hpp"
#include "synthetic_oracle.hpp"
#include "test_util.hpp"
#include "xlsent/align.hpp"
#include "xlsent/lexicon.hpp"
#include "xlsent/nbsvm.hpp"
#include "xlsent/nnsent.hpp"
#include "xlsent/postag.hpp"
#include "xlsent/profile.hpp"
#include "xlsent/synthetic.hpp"
#include "xlsent/transfer.hpp"
#include "xlsent/xlingrep.hpp"

using namespace xlsent;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::string failures;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    failures += (failures.empty() ? "" : "; ") + what;
    pass = false;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

harness::SyntheticSpec world_spec() {
  harness::SyntheticSpec spec;
  spec.languages = {"xa", "xb", "xc"};
  spec.vocab_size = 200;
  spec.labeled_per_language = 750;  // 600 / 75 / 75 after the split
  spec.parallel_size = 1000;
  spec.monolingual_size = 1000;
  spec.tagged_size = 200;
  spec.seed = 7;
  return spec;
}

DatasetSplit split_of(const harness::SyntheticWorld& w, const std::string& lang) {
  return split_dataset(w.labeled.at(lang), 0);
}

// ---------------------------------------------------------------------------

void gradient_oracle(Outcome& o) {
  auto t0 = Clock::now();
  Rng rng(20240);
  double worst = 0.0;
  const int configs = 24;
  for (int c = 0; c < configs; ++c) {
    auto in = oracle::random_instance(rng, 8, 5);
    for (const auto& e : oracle::gradient_check(in)) {
      worst = std::max(worst, e.rel_error);
      if (!(e.rel_error < 1e-4)) o.require(false, "config " + std::to_string(c) + " block " + e.name);
    }
  }
  double secs = seconds_since(t0);
  o.require(secs < 60.0, "runtime " + std::to_string(secs) + " s");
  o.detail << configs << " configs, 12 blocks each, worst rel error " << worst << ", " << secs << " s";
}

void forward_oracle(Outcome& o) {
  Rng rng(777);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    auto in = oracle::random_instance(rng, 8, 8, 1.0);
    auto tr = nn::forward(in.params, in.dims, in.x);
    auto ref = oracle::forward(in.params, in.dims, in.x);
    for (std::size_t k = 0; k < kNumLabels; ++k)
      worst = std::max(worst, std::abs(tr.probs(static_cast<Eigen::Index>(k)) - ref.probs[k]));
  }
  o.require(worst <= 1e-10, "max deviation " + std::to_string(worst));
  o.detail << "100 instances, max |dp| " << worst;
}

void em_properties(Outcome& o) {
  double worst_dev = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    harness::SyntheticSpec spec;
    spec.languages = {"xa", "xb"};
    spec.vocab_size = 60 + 20 * static_cast<int>(seed);
    spec.positive_keywords = 5;
    spec.negative_keywords = 5;
    spec.labeled_per_language = 10;
    spec.parallel_size = 150;
    spec.seed = seed;
    auto w = harness::gen_synthetic(spec);
    auto bt = align::Bitext::from(w.parallel, 0, 1);
    double prev = align::log_likelihood(align::init_ibm1(bt), bt);
    align::Ibm1Options opt;
    opt.iterations = 10;
    opt.on_iteration = [&](int it, const align::TranslationTable& t) {
      double ll = align::log_likelihood(t, bt);
      o.require(ll >= prev - 1e-9 * std::abs(prev),
                "corpus " + std::to_string(seed) + " likelihood fell at iteration " + std::to_string(it));
      prev = ll;
      double dev = t.max_row_deviation();
      worst_dev = std::max(worst_dev, dev);
      o.require(dev <= 1e-6, "corpus " + std::to_string(seed) + " row sum off at iteration " + std::to_string(it));
    };
    align::train_ibm1(bt, opt);
  }
  o.detail << "5 corpora x 10 iterations, worst row deviation " << worst_dev;
}

void dictionary_recovery(Outcome& o) {
  auto t0 = Clock::now();
  harness::SyntheticSpec spec;
  spec.languages = {"xa", "xb"};
  spec.vocab_size = 200;
  spec.labeled_per_language = 10;
  spec.parallel_size = 500;
  spec.seed = 11;
  auto w = harness::gen_synthetic(spec);
  auto bt = align::Bitext::from(w.parallel, 0, 1);
  auto dict = align::induce_dictionary(bt);
  const auto& gold = w.gold_dictionaries.at({"xa", "xb"});
  std::set<std::string> observed;
  for (const auto& row : w.parallel.rows) observed.insert(row[0].tokens.begin(), row[0].tokens.end());
  std::size_t correct = 0, recovered = 0;
  for (const auto& [src, e] : dict.entries()) correct += *gold.translate(src) == e.target;
  for (const auto& wd : observed) {
    const std::string* t = dict.translate(wd);
    recovered += t && *t == *gold.translate(wd);
  }
  double precision = dict.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(dict.size());
  double recall = static_cast<double>(recovered) / static_cast<double>(observed.size());
  double secs = seconds_since(t0);
  o.require(precision == 1.0, "precision " + std::to_string(precision));
  o.require(recall >= 0.95, "recall " + std::to_string(recall));
  o.require(secs < 30.0, "runtime " + std::to_string(secs) + " s");
  o.detail << "precision " << precision << ", recall " << recall << " over " << observed.size() << " words, " << secs
           << " s";
}

// Cross-lingual resources for the target language: induced dictionaries,
// code-switched embeddings and clusters.
struct Pipeline {
  std::map<std::string, align::Dictionary> to_target;
  nn::Resources resources;
};

Pipeline build_pipeline(const harness::SyntheticWorld& w, const harness::Profile& prof, std::uint64_t seed) {
  Pipeline p;
  std::vector<align::Dictionary> dicts;
  for (std::size_t k = 0; k + 1 < w.languages.size(); ++k) {
    auto bt = align::Bitext::from(w.parallel, k, w.languages.size() - 1);
    p.to_target[w.languages[k]] = align::induce_dictionary(bt);
    dicts.push_back(p.to_target[w.languages[k]]);
    dicts.push_back(align::induce_dictionary(bt.reversed()));
  }
  std::vector<xling::MonolingualCorpus> corpora;
  for (const auto& lang : w.languages) {
    xling::MonolingualCorpus mc{lang, {}};
    for (const auto& s : w.monolingual.at(lang)) mc.sentences.push_back(s.tokens);
    corpora.push_back(std::move(mc));
  }
  xling::CodeSwitchConfig cs;
  cs.rate = prof.code_switch_rate;
  cs.seed = seed;
  auto mixed = xling::code_switch(corpora, dicts, cs);
  xling::SgnsConfig sg;
  sg.dim = prof.dims.d_ce;
  sg.seed = seed;
  p.resources.dims = prof.dims;
  p.resources.embeddings = xling::train_sgns(mixed, sg);
  p.resources.clusters = xling::induce_clusters(p.resources.embeddings, prof.clusters, seed);
  return p;
}

nn::TrainConfig train_config(const harness::Profile& prof, std::uint64_t seed) {
  nn::TrainConfig tc;
  tc.epochs = 30;
  tc.batch_size = prof.batch_size;
  tc.adam.lr = prof.learning_rate;
  tc.seed = seed;
  return tc;
}

void direct_transfer(Outcome& o) {
  auto t0 = Clock::now();
  auto spec = world_spec();
  auto w = harness::gen_synthetic(spec);
  auto prof = harness::profile_by_name("desk");
  auto pipe = build_pipeline(w, prof, spec.seed);
  std::vector<LabeledDataset> sets;
  std::vector<align::Dictionary> dicts;
  for (const std::string src : {"xa", "xb"}) {
    sets.push_back(split_of(w, src).train);
    dicts.push_back(pipe.to_target.at(src));
  }
  o.require(sets[0].size() == 600 && sets[1].size() == 600, "train size");
  auto train = transfer::direct_concat(sets, dicts, "xc");
  auto model = nn::train(train, nullptr, pipe.resources, train_config(prof, spec.seed));
  auto test = split_of(w, "xc").test;
  double acc = nn::accuracy_on(model, test);
  double secs = seconds_since(t0);
  o.require(acc >= 0.90, "accuracy " + std::to_string(acc));
  o.require(secs < 300.0, "runtime " + std::to_string(secs) + " s");
  o.detail << "target accuracy " << acc << " on " << test.size() << " examples, " << secs << " s";
}

void projection(Outcome& o) {
  auto spec = world_spec();
  auto w = harness::gen_synthetic(spec);
  auto prof = harness::profile_by_name("desk");
  nbsvm::NbSvmConfig ncfg;
  ncfg.seed = spec.seed;
  transfer::NbSvmClassifier source(nbsvm::train_nbsvm(split_of(w, "xa").train, ncfg));
  auto projected = transfer::project(source, w.parallel, {"xa"}, "xc");
  std::size_t agree = 0;
  for (std::size_t i = 0; i < projected.size(); ++i) agree += projected.examples[i].label == w.parallel_gold[i];
  double fidelity = static_cast<double>(agree) / static_cast<double>(projected.size());
  o.require(fidelity == 1.0, "fidelity " + std::to_string(fidelity));

  auto pipe = build_pipeline(w, prof, spec.seed);
  auto model = nn::train(projected, nullptr, pipe.resources, train_config(prof, spec.seed));
  double acc = nn::accuracy_on(model, split_of(w, "xc").test);
  o.require(acc >= 0.90, "target accuracy " + std::to_string(acc));
  o.detail << "fidelity " << fidelity << " over " << projected.size() << " rows, target accuracy " << acc;
}

void ensemble_kl_algebra(Outcome& o) {
  auto w = transfer::kl_weights({0.5, 1.0});
  o.require(std::abs(w[0] - 16.0 / 17.0) < 1e-15 && std::abs(w[1] - 1.0 / 17.0) < 1e-15, "hand weights");
  auto clamp = transfer::kl_weights({0.0, 0.3});
  o.require(std::abs(clamp[0] - 1.0) < 1e-9, "clamped source does not dominate");

  Rng rng(50);
  int scaling = 0, reductions = 0;
  for (int c = 0; c < 50; ++c) {
    const std::size_t n_models = 2 + rng.below(4);
    std::vector<transfer::FunctionClassifier> owned;
    for (std::size_t m = 0; m < n_models; ++m) {
      std::uint64_t salt = rng.below(1u << 30);
      owned.emplace_back(
          [salt](const Sentence& s) {
            Rng r = Rng::substream(salt, s.tokens[0]);
            transfer::Prediction p;
            double a = r.uniform(), b = r.uniform(), d = r.uniform();
            p.distribution = {a / (a + b + d), b / (a + b + d), d / (a + b + d)};
            std::size_t best = 0;
            for (std::size_t k = 1; k < kNumLabels; ++k)
              if (p.distribution[k] > p.distribution[best]) best = k;
            p.label = label_from_code(static_cast<int>(best));
            return p;
          },
          "m" + std::to_string(m));
    }
    std::vector<const transfer::Classifier*> models;
    for (const auto& m : owned) models.push_back(&m);
    std::vector<Sentence> test;
    for (int i = 0; i < 30; ++i) test.push_back({{"s" + std::to_string(rng.below(1000))}, "t"});

    std::vector<double> kls;
    for (std::size_t m = 0; m < n_models; ++m) kls.push_back(rng.uniform(0.01, 2.0));
    auto weights = transfer::kl_weights(kls);
    for (bool soft : {false, true}) {
      auto base = transfer::ensemble_weighted(models, weights, test, soft);
      double scale = std::exp(rng.uniform(-8.0, 8.0));
      std::vector<double> scaled;
      for (double v : weights) scaled.push_back(v * scale);
      bool same = transfer::ensemble_weighted(models, scaled, test, soft) == base;
      o.require(same, "scaling changed case " + std::to_string(c));
      scaling += same;
    }

    std::vector<std::vector<std::string>> seqs;
    for (int s = 0; s < 5; ++s) {
      std::vector<std::string> t;
      for (std::size_t k = 0, n = 1 + rng.below(6); k < n; ++k) t.push_back(std::string(1, char('A' + rng.below(3))));
      seqs.push_back(t);
    }
    auto dist = postag::trigram_distribution(seqs, {"A", "B", "C"}, 0.1);
    std::vector<postag::TrigramDist> sources(n_models, dist);
    bool eq = transfer::ensemble_kl(models, sources, dist, test) == transfer::ensemble_flat(models, test);
    o.require(eq, "equal distributions differ from flat in case " + std::to_string(c));
    reductions += eq;
  }
  o.detail << "hand weights ok, " << scaling << "/100 scaling checks, " << reductions << "/50 flat reductions";
}

void lexicon_baseline(Outcome& o) {
  auto rule = [](double sp, double sn, double delta) {
    int fired = (sp - sn > delta) + (sn - sp > delta);
    if (fired == 0) return SentimentLabel::neutral;
    return sp - sn > delta ? SentimentLabel::positive : SentimentLabel::negative;
  };
  o.require(lexicon::classify_threshold({0.3, 0.1}, 0.1) == SentimentLabel::positive, "(0.3, 0.1)");
  o.require(lexicon::classify_threshold({0.15, 0.10}, 0.1) == SentimentLabel::neutral, "(0.15, 0.10)");
  o.require(lexicon::classify_threshold({0.1, 0.3}, 0.1) == SentimentLabel::negative, "(0.1, 0.3)");
  Rng rng(1000);
  int agree = 0;
  for (int i = 0; i < 1000; ++i) {
    double sp = rng.uniform(), sn = rng.uniform();
    agree += lexicon::classify_threshold({sp, sn}, 0.1) == rule(sp, sn, 0.1);
  }
  o.require(agree == 1000, std::to_string(1000 - agree) + " random pairs disagree");
  o.detail << "3 worked cases, " << agree << "/1000 random pairs";
}

void determinism(Outcome& o) {
  testutil::TempDir dir;
  harness::SyntheticSpec spec;
  spec.labeled_per_language = 60;
  spec.parallel_size = 120;
  spec.monolingual_size = 150;
  spec.tagged_size = 40;
  spec.seed = 3;
  auto prof = harness::profile_by_name("desk");
  prof.clusters = 10;

  // Runs every stage and returns its artifacts as strings.
  auto run = [&](const std::filesystem::path& d) {
    std::map<std::string, std::string> art;
    auto w = harness::gen_synthetic(spec);
    for (const auto& f : harness::write_synthetic(w, d / "world")) art["synth/" + f.filename().string()] = testutil::read_file(f);
    auto bt = align::Bitext::from(w.parallel, 0, 2);
    align::train_ibm1(bt).save(d / "t.tsv");
    art["ibm1"] = testutil::read_file(d / "t.tsv");
    auto dict = align::induce_dictionary(bt);
    dict.save(d / "dict.tsv");
    art["dict"] = testutil::read_file(d / "dict.tsv");
    auto pipe = build_pipeline(w, prof, spec.seed);
    pipe.resources.embeddings.save(d / "emb.txt");
    art["embeddings"] = testutil::read_file(d / "emb.txt");
    pipe.resources.clusters.save(d / "clusters.tsv");
    art["clusters"] = testutil::read_file(d / "clusters.tsv");
    postag::train_tagger(w.tagged.at("xa"), {5, spec.seed}).save(d / "tagger.tsv");
    art["tagger"] = testutil::read_file(d / "tagger.tsv");
    auto src = split_of(w, "xa").train;
    nbsvm::NbSvmConfig ncfg;
    ncfg.seed = spec.seed;
    auto nb = nbsvm::train_nbsvm(src, ncfg);
    nb.save(d / "nb.tsv");
    art["nbsvm"] = testutil::read_file(d / "nb.tsv");
    auto projected = transfer::project(transfer::NbSvmClassifier(nb), w.parallel, {"xa"}, "xc");
    save_labeled(d / "proj.tsv", projected);
    art["projected"] = testutil::read_file(d / "proj.tsv");
    auto tc = train_config(prof, spec.seed);
    tc.epochs = 3;
    auto train = transfer::direct_concat({src}, {dict}, "xc");
    art["neural"] = nn::train(train, nullptr, pipe.resources, tc).serialize();
    return art;
  };
  std::filesystem::create_directories(dir / "a");
  std::filesystem::create_directories(dir / "b");
  auto a = run(dir / "a");
  auto b = run(dir / "b");
  std::size_t same = 0;
  for (const auto& [name, content] : a) {
    bool eq = b.count(name) && b.at(name) == content;
    o.require(eq, name + " differs");
    same += eq;
  }
  o.require(a.size() == b.size(), "artifact sets differ");
  o.detail << same << "/" << a.size() << " artifacts byte-identical";
}

void full_profile(Outcome& o) {
  auto p = harness::default_hyperparameters().full;
  o.require(p.dims.d_ce == 300 && p.dims.d_e == 400 && p.dims.d_cc == 50 && p.dims.d_rec == 400 && p.dims.d_h == 400,
            "dimensions");
  o.require(p.batch_size == 10000, "batch size");
  o.require(p.epochs_single_source == 7 && p.epochs_multi_source == 2, "epochs");
  o.require(p.lexicon_delta == 0.1, "delta");
  o.require(p.clusters == 500, "clusters");
  o.detail << "dims " << p.dims.d_ce << "/" << p.dims.d_e << "/" << p.dims.d_cc << "/" << p.dims.d_rec << "/"
           << p.dims.d_h << ", batch " << p.batch_size << ", epochs " << p.epochs_single_source << "/"
           << p.epochs_multi_source << ", delta " << p.lexicon_delta << ", K " << p.clusters;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"gradient oracle", gradient_oracle},
      {"forward oracle", forward_oracle},
      {"EM properties", em_properties},
      {"dictionary recovery", dictionary_recovery},
      {"end-to-end direct transfer", direct_transfer},
      {"end-to-end projection", projection},
      {"ensemble-KL algebra", ensemble_kl_algebra},
      {"lexicon baseline", lexicon_baseline},
      {"determinism", determinism},
      {"full-scale profile", full_profile},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      check(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail.str();
    if (!o.pass) std::cout << " [" << o.failures << "]";
    std::cout << std::endl;
    failed += !o.pass;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
