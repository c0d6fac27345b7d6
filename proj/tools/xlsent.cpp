// Command-line front end: one subcommand per pipeline stage.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xlsent/align.hpp"
#include "xlsent/common.hpp"
#include "xlsent/config.hpp"
#include "xlsent/corpus.hpp"
#include "xlsent/lexicon.hpp"
#include "xlsent/metrics.hpp"
#include "xlsent/nbsvm.hpp"
#include "xlsent/nnsent.hpp"
#include "xlsent/postag.hpp"
#include "xlsent/profile.hpp"
#include "xlsent/synthetic.hpp"
#include "xlsent/transfer.hpp"
#include "xlsent/xlingrep.hpp"

namespace fs = std::filesystem;
using namespace xlsent;

namespace {

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  int threads = 1;

  std::uint64_t seed_or(std::uint64_t fallback) const { return seed.value_or(fallback); }
};

// "key=value" -> pair; used for per-language resources.
std::pair<std::string, std::string> key_value(const std::string& s, const std::string& flag) {
  auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
    throw InvalidArgument(flag + " expects LANG=PATH, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

void need_file(const fs::path& p) {
  if (!fs::exists(p)) throw DataError("missing input file: " + p.string());
}

ParallelCorpus read_pair(const std::string& src, const std::string& tgt, const std::string& src_lang,
                         const std::string& tgt_lang) {
  need_file(src);
  need_file(tgt);
  return load_parallel({src, tgt}, {src_lang, tgt_lang});
}

harness::Config base_config(const Globals& g, fs::path* base) {
  if (g.config.empty()) return {};
  need_file(g.config);
  *base = fs::path(g.config).parent_path();
  return harness::Config::load(g.config);
}

// Flags shared by the transfer subcommands; written into the config so that
// command line values override the file. Paths are made absolute so they
// resolve against the working directory.
struct PlanFlags {
  std::vector<std::string> sources;
  std::string target;
  std::vector<std::string> train, dev, dict, parallel, tagged;
  std::string test, embeddings, clusters, lexicon, tagger;
  std::string classifier, source_classifier, profile;
  std::optional<int> epochs;
  std::optional<double> delta;
  std::string predictions, model_out, report;
  bool soft = false;
  bool via_dictionary = false;

  void attach(CLI::App* app) {
    app->add_option("--source", sources, "source language (repeatable)");
    app->add_option("--target", target, "target language");
    app->add_option("--train", train, "LANG=PATH labeled source data");
    app->add_option("--dev", dev, "LANG=PATH labeled development data");
    app->add_option("--dict", dict, "LANG=PATH dictionary from LANG into the target");
    app->add_option("--parallel", parallel, "LANG=PATH one side of the parallel corpus");
    app->add_option("--tagged", tagged, "LANG=PATH tagged corpus");
    app->add_option("--test", test, "labeled target test set");
    app->add_option("--embeddings", embeddings, "cross-lingual embeddings");
    app->add_option("--clusters", clusters, "word clusters");
    app->add_option("--lexicon", lexicon, "source-language polarity lexicon");
    app->add_option("--tagger", tagger, "tagger model for untagged text");
    app->add_option("--classifier", classifier, "neural or nbsvm");
    app->add_option("--profile", profile, "full or desk");
    app->add_option("--epochs", epochs, "training epochs");
    app->add_option("--predictions", predictions, "write test predictions here");
    app->add_option("--model-out", model_out, "write the target model here");
    app->add_option("--report", report, "write the evaluation report here");
  }

  void apply(harness::Config& cfg) const {
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
      return s;
    };
    if (!sources.empty()) cfg.set("plan", "sources", join(sources));
    if (!target.empty()) cfg.set("plan", "target", target);
    if (!classifier.empty()) cfg.set("plan", "classifier", classifier);
    if (!source_classifier.empty()) cfg.set("plan", "source_classifier", source_classifier);
    if (!profile.empty()) cfg.set("neural", "profile", profile);
    if (epochs) cfg.set("neural", "epochs", std::to_string(*epochs));
    if (delta) cfg.set("lexicon", "delta", format_double(*delta));
    if (via_dictionary) cfg.set("lexicon", "via_dictionary", "true");
    if (soft) cfg.set("ensemble", "soft", "true");
    auto per_lang = [&](const std::vector<std::string>& v, const std::string& prefix) {
      for (const auto& s : v) {
        auto [k, p] = key_value(s, "--" + prefix);
        cfg.set("resources", prefix + "." + k, fs::absolute(p).string());
      }
    };
    per_lang(train, "train");
    per_lang(dev, "dev");
    per_lang(dict, "dict");
    per_lang(parallel, "parallel");
    per_lang(tagged, "tagged");
    auto single = [&](const std::string& v, const std::string& section, const std::string& key) {
      if (!v.empty()) cfg.set(section, key, fs::absolute(v).string());
    };
    single(test, "resources", "test");
    single(embeddings, "resources", "embeddings");
    single(clusters, "resources", "clusters");
    single(lexicon, "resources", "lexicon");
    single(tagger, "resources", "tagger");
    single(predictions, "output", "predictions");
    single(model_out, "output", "model");
    single(report, "output", "report");
  }
};

transfer::RunReport run_with(const Globals& g, const PlanFlags& flags, std::optional<transfer::Method> method,
                             const std::string& projected_out = {}) {
  fs::path base;
  harness::Config cfg = base_config(g, &base);
  flags.apply(cfg);
  if (method) cfg.set("plan", "method", transfer::method_name(*method));
  transfer::TransferPlan plan = transfer::plan_from_config(cfg, base);
  if (g.seed) {
    plan.seed = *g.seed;
    plan.nbsvm.seed = *g.seed;
  }
  plan.threads = g.threads;
  transfer::RunReport report = transfer::run_plan(plan);
  if (!projected_out.empty() && report.projected) save_labeled(projected_out, *report.projected);
  std::cout << report.summary;
  return report;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-lingual sentiment transfer toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "INI configuration file");
  app.add_option("--seed", g.seed, "master random seed");
  app.add_option("--threads", g.threads, "worker threads for parallel stages")->check(CLI::PositiveNumber);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic ciphered world");
  std::string synth_out;
  harness::SyntheticSpec spec;
  std::vector<std::string> synth_langs;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--languages", synth_langs, "language codes")->delimiter(',');
  synth->add_option("--vocab", spec.vocab_size, "latent vocabulary size");
  synth->add_option("--labeled", spec.labeled_per_language, "labeled examples per language");
  synth->add_option("--parallel", spec.parallel_size, "parallel rows");
  synth->add_option("--mono", spec.monolingual_size, "monolingual sentences per language");
  synth->add_option("--tagged", spec.tagged_size, "tagged sentences per language");

  // align
  auto* align_cmd = app.add_subcommand("align", "train IBM Model 1 translation probabilities");
  std::string a_src, a_tgt, a_src_lang = "src", a_tgt_lang = "tgt", a_out;
  int a_iter = 5;
  align_cmd->add_option("--src", a_src, "source side, one sentence per line")->required();
  align_cmd->add_option("--tgt", a_tgt, "target side, one sentence per line")->required();
  align_cmd->add_option("--src-lang", a_src_lang);
  align_cmd->add_option("--tgt-lang", a_tgt_lang);
  align_cmd->add_option("--iterations", a_iter)->check(CLI::PositiveNumber);
  align_cmd->add_option("--out", a_out, "translation table TSV")->required();

  // dict
  auto* dict_cmd = app.add_subcommand("dict", "induce a bilingual dictionary from parallel text");
  std::string d_src, d_tgt, d_src_lang = "src", d_tgt_lang = "tgt", d_out;
  int d_iter = 5;
  dict_cmd->add_option("--src", d_src)->required();
  dict_cmd->add_option("--tgt", d_tgt)->required();
  dict_cmd->add_option("--src-lang", d_src_lang);
  dict_cmd->add_option("--tgt-lang", d_tgt_lang);
  dict_cmd->add_option("--iterations", d_iter)->check(CLI::PositiveNumber);
  dict_cmd->add_option("--out", d_out)->required();

  // codeswitch
  auto* cs_cmd = app.add_subcommand("codeswitch", "build a code-switched corpus");
  std::vector<std::string> cs_mono, cs_dict;
  std::string cs_out;
  double cs_rate = 0.3;
  cs_cmd->add_option("--mono", cs_mono, "LANG=PATH monolingual text")->required();
  cs_cmd->add_option("--dict", cs_dict, "SRC:TGT=PATH dictionary")->required();
  cs_cmd->add_option("--rate", cs_rate, "swap probability per token");
  cs_cmd->add_option("--out", cs_out)->required();

  // embed
  auto* embed_cmd = app.add_subcommand("embed", "train skip-gram embeddings");
  std::string e_corpus, e_out;
  xling::SgnsConfig sgns;
  sgns.dim = 16;
  embed_cmd->add_option("--corpus", e_corpus, "tokenised text, one sentence per line")->required();
  embed_cmd->add_option("--dim", sgns.dim)->check(CLI::PositiveNumber);
  embed_cmd->add_option("--window", sgns.window)->check(CLI::PositiveNumber);
  embed_cmd->add_option("--negatives", sgns.negatives)->check(CLI::NonNegativeNumber);
  embed_cmd->add_option("--epochs", sgns.epochs)->check(CLI::PositiveNumber);
  embed_cmd->add_option("--lr", sgns.learning_rate);
  embed_cmd->add_option("--min-count", sgns.min_count);
  embed_cmd->add_option("--out", e_out)->required();

  // cluster
  auto* cluster_cmd = app.add_subcommand("cluster", "k-means word clusters over embeddings");
  std::string c_emb, c_out;
  int c_k = 50;
  cluster_cmd->add_option("--embeddings", c_emb)->required();
  cluster_cmd->add_option("--k", c_k)->check(CLI::PositiveNumber);
  cluster_cmd->add_option("--out", c_out)->required();

  // train-tagger
  auto* tagger_cmd = app.add_subcommand("train-tagger", "train the averaged perceptron tagger");
  std::string t_in, t_out;
  int t_epochs = 5;
  tagger_cmd->add_option("--tagged", t_in)->required();
  tagger_cmd->add_option("--epochs", t_epochs)->check(CLI::PositiveNumber);
  tagger_cmd->add_option("--out", t_out)->required();

  // train-sent
  auto* sent_cmd = app.add_subcommand("train-sent", "train the neural sentiment model");
  std::string s_train, s_dev, s_lang = "xx", s_emb, s_clusters, s_dict, s_lex, s_profile = "desk", s_out;
  std::optional<int> s_epochs;
  sent_cmd->add_option("--train", s_train)->required();
  sent_cmd->add_option("--dev", s_dev);
  sent_cmd->add_option("--lang", s_lang);
  sent_cmd->add_option("--embeddings", s_emb);
  sent_cmd->add_option("--clusters", s_clusters);
  sent_cmd->add_option("--dict", s_dict, "dictionary applied to tokens before lookup");
  sent_cmd->add_option("--lexicon", s_lex, "adds lexicon scores to every token");
  sent_cmd->add_option("--profile", s_profile);
  sent_cmd->add_option("--epochs", s_epochs);
  sent_cmd->add_option("--out", s_out)->required();

  // train-nbsvm
  auto* nb_cmd = app.add_subcommand("train-nbsvm", "train the NBSVM baseline");
  std::string n_train, n_out, n_lang = "xx";
  nbsvm::NbSvmConfig nb_cfg;
  nb_cmd->add_option("--train", n_train)->required();
  nb_cmd->add_option("--lang", n_lang);
  nb_cmd->add_option("--epochs", nb_cfg.epochs)->check(CLI::PositiveNumber);
  nb_cmd->add_flag("--bigrams", nb_cfg.bigrams);
  nb_cmd->add_option("--out", n_out)->required();

  // transfer subcommands
  PlanFlags proj_flags, direct_flags, ens_flags, lex_flags, run_flags;
  std::string projected_out, ens_method = "flat";
  auto* proj_cmd = app.add_subcommand("project", "annotation projection through parallel text");
  proj_flags.attach(proj_cmd);
  proj_cmd->add_option("--source-classifier", proj_flags.source_classifier, "neural or nbsvm");
  proj_cmd->add_option("--projected", projected_out, "write the projected target data here");
  auto* direct_cmd = app.add_subcommand("direct", "direct transfer on translated source data");
  direct_flags.attach(direct_cmd);
  auto* ens_cmd = app.add_subcommand("ensemble", "multi-source ensemble (flat or kl)");
  ens_flags.attach(ens_cmd);
  ens_cmd->add_option("--method", ens_method)->check(CLI::IsMember({"flat", "kl"}));
  ens_cmd->add_flag("--soft", ens_flags.soft, "weight distributions instead of votes");
  auto* lex_cmd = app.add_subcommand("baseline-lexicon", "translated lexicon threshold baseline");
  lex_flags.attach(lex_cmd);
  lex_cmd->add_option("--delta", lex_flags.delta);
  lex_cmd->add_flag("--via-dictionary", lex_flags.via_dictionary);
  auto* run_cmd = app.add_subcommand("run", "execute the plan in --config");
  run_flags.attach(run_cmd);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "score predictions against gold labels");
  std::string ev_pred, ev_gold, ev_out;
  eval_cmd->add_option("--pred", ev_pred, "index<TAB>label predictions")->required();
  eval_cmd->add_option("--gold", ev_gold, "labeled TSV")->required();
  eval_cmd->add_option("--out", ev_out, "also write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*synth) {
      if (!synth_langs.empty()) spec.languages = synth_langs;
      spec.seed = g.seed_or(spec.seed);
      auto world = harness::gen_synthetic(spec);
      auto written = harness::write_synthetic(world, synth_out);
      std::cout << "wrote " << written.size() << " files to " << synth_out << "\n";
    } else if (*align_cmd) {
      ParallelCorpus pc = read_pair(a_src, a_tgt, a_src_lang, a_tgt_lang);
      auto bitext = align::Bitext::from(pc, 0, 1);
      align::Ibm1Options opt;
      opt.iterations = a_iter;
      opt.threads = g.threads;
      opt.on_iteration = [&](int it, const align::TranslationTable& t) {
        std::cerr << "iteration " << it << " log-likelihood " << format_double(align::log_likelihood(t, bitext))
                  << "\n";
      };
      align::train_ibm1(bitext, opt).save(a_out);
    } else if (*dict_cmd) {
      ParallelCorpus pc = read_pair(d_src, d_tgt, d_src_lang, d_tgt_lang);
      align::Ibm1Options opt;
      opt.iterations = d_iter;
      opt.threads = g.threads;
      auto dict = align::induce_dictionary(align::Bitext::from(pc, 0, 1), opt);
      dict.save(d_out);
      std::cout << "dictionary entries " << dict.size() << "\n";
    } else if (*cs_cmd) {
      std::vector<xling::MonolingualCorpus> corpora;
      for (const auto& m : cs_mono) {
        auto [lang, path] = key_value(m, "--mono");
        need_file(path);
        xling::MonolingualCorpus c{lang, {}};
        for (auto& s : load_monolingual(path, lang)) c.sentences.push_back(std::move(s.tokens));
        corpora.push_back(std::move(c));
      }
      std::vector<align::Dictionary> dicts;
      for (const auto& d : cs_dict) {
        auto [pair, path] = key_value(d, "--dict");
        auto colon = pair.find(':');
        if (colon == std::string::npos) throw InvalidArgument("--dict expects SRC:TGT=PATH, got '" + d + "'");
        need_file(path);
        dicts.push_back(align::load_dictionary(path, pair.substr(0, colon), pair.substr(colon + 1)));
      }
      xling::CodeSwitchConfig cfg;
      cfg.rate = cs_rate;
      cfg.seed = g.seed_or(1);
      xling::CodeSwitchStats stats;
      auto out = xling::code_switch(corpora, dicts, cfg, &stats);
      std::string text;
      for (const auto& s : out) text += join_tokens(s) + "\n";
      write_text(cs_out, text);
      std::cout << "tokens " << stats.tokens << " swapped " << stats.swapped << "\n";
    } else if (*embed_cmd) {
      need_file(e_corpus);
      std::vector<std::vector<std::string>> corpus;
      for (auto& s : load_monolingual(e_corpus, "", TokenizerConfig{false})) corpus.push_back(std::move(s.tokens));
      sgns.seed = g.seed_or(1);
      xling::train_sgns(corpus, sgns).save(e_out);
    } else if (*cluster_cmd) {
      need_file(c_emb);
      auto result = xling::kmeans(xling::EmbeddingTable::load(c_emb), c_k, g.seed_or(1));
      result.clusters.save(c_out);
      std::cout << "iterations " << result.iterations << " objective "
                << format_double(result.objective.empty() ? 0.0 : result.objective.back()) << "\n";
    } else if (*tagger_cmd) {
      need_file(t_in);
      postag::TaggerOptions opt;
      opt.epochs = t_epochs;
      opt.seed = g.seed_or(1);
      postag::train_tagger(load_tagged(t_in), opt).save(t_out);
    } else if (*sent_cmd) {
      need_file(s_train);
      harness::Profile prof = harness::profile_by_name(s_profile);
      nn::Resources res;
      res.dims = prof.dims;
      if (!s_emb.empty()) {
        need_file(s_emb);
        res.embeddings = xling::EmbeddingTable::load(s_emb);
        res.dims.d_ce = res.embeddings.dim();
      }
      if (!s_clusters.empty()) {
        need_file(s_clusters);
        res.clusters = xling::ClusterMap::load(s_clusters);
      }
      if (!s_dict.empty()) {
        need_file(s_dict);
        res.dictionary = align::load_dictionary(s_dict);
      }
      if (!s_lex.empty()) {
        need_file(s_lex);
        res.lexicon = lexicon::load_lexicon(s_lex);
        res.dims.lexicon_feature = true;
      }
      LabeledDataset train = load_labeled(s_train, s_lang);
      std::optional<LabeledDataset> dev;
      if (!s_dev.empty()) {
        need_file(s_dev);
        dev = load_labeled(s_dev, s_lang);
      }
      nn::TrainConfig tc;
      tc.epochs = s_epochs.value_or(prof.epochs_single_source);
      tc.batch_size = prof.batch_size;
      tc.adam.lr = prof.learning_rate;
      tc.seed = g.seed_or(1);
      tc.on_epoch = [](int epoch, double loss, std::optional<double> acc) {
        std::cerr << "epoch " << epoch << " loss " << format_double(loss);
        if (acc) std::cerr << " dev " << format_double(*acc);
        std::cerr << "\n";
      };
      nn::train(train, dev ? &*dev : nullptr, res, tc).save(s_out);
    } else if (*nb_cmd) {
      need_file(n_train);
      nb_cfg.seed = g.seed_or(1);
      nbsvm::train_nbsvm(load_labeled(n_train, n_lang), nb_cfg).save(n_out);
    } else if (*proj_cmd) {
      run_with(g, proj_flags, transfer::Method::projection, projected_out);
    } else if (*direct_cmd) {
      run_with(g, direct_flags, transfer::Method::direct_concat);
    } else if (*ens_cmd) {
      run_with(g, ens_flags, ens_method == "kl" ? transfer::Method::ensemble_kl : transfer::Method::ensemble_flat);
    } else if (*lex_cmd) {
      run_with(g, lex_flags, transfer::Method::lexicon_baseline);
    } else if (*run_cmd) {
      run_with(g, run_flags, std::nullopt);
    } else if (*eval_cmd) {
      need_file(ev_pred);
      need_file(ev_gold);
      auto pred = transfer::parse_predictions(read_lines(ev_pred));
      auto gold = load_labeled(ev_gold, "");
      std::vector<SentimentLabel> g_labels;
      for (const auto& ex : gold.examples) g_labels.push_back(ex.label);
      if (pred.size() != g_labels.size())
        throw DataError(ev_pred + ": " + std::to_string(pred.size()) + " predictions for " +
                        std::to_string(g_labels.size()) + " gold labels in " + ev_gold);
      std::string report = harness::format_report(harness::evaluate(pred, g_labels), ev_pred);
      std::cout << report;
      if (!ev_out.empty()) write_text(ev_out, report);
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
