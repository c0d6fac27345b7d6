#include "xlsent/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "xlsent/common.hpp"
#include "xlsent/xlingrep.hpp"

namespace xlsent::transfer {

namespace fs = std::filesystem;

Prediction NeuralClassifier::predict(const Sentence& sentence) const {
  auto p = model_.predict(sentence);
  return {p.label, p.distribution, name_};
}

Prediction NbSvmClassifier::predict(const Sentence& sentence) const {
  auto p = nbsvm::predict_nbsvm(model_, sentence.tokens);
  double mx = *std::max_element(p.scores.begin(), p.scores.end());
  std::array<double, kNumLabels> dist{};
  double z = 0.0;
  for (std::size_t l = 0; l < kNumLabels; ++l) {
    dist[l] = std::exp(p.scores[l] - mx);
    z += dist[l];
  }
  for (double& v : dist) v /= z;
  return {p.label, dist, name_};
}

Prediction LexiconClassifier::predict(const Sentence& sentence) const {
  auto label = lexicon::classify_threshold(lexicon::score_sentence(lexicon_, sentence.tokens), delta_);
  Prediction p{label, {}, name_};
  p.distribution[label_code(label)] = 1.0;
  return p;
}

namespace {

// Highest score; ties by summed distribution mass, then by label code.
SentimentLabel resolve(const std::array<double, kNumLabels>& score, const std::vector<Prediction>& predictions) {
  std::array<double, kNumLabels> mass{};
  for (const auto& p : predictions)
    for (std::size_t l = 0; l < kNumLabels; ++l) mass[l] += p.distribution[l];
  std::size_t best = 0;
  for (std::size_t l = 1; l < kNumLabels; ++l) {
    if (score[l] > score[best] || (score[l] == score[best] && mass[l] > mass[best])) best = l;
  }
  return label_from_code(static_cast<int>(best));
}

}  // namespace

SentimentLabel majority_vote(const std::vector<Prediction>& predictions) {
  if (predictions.empty()) throw InvalidArgument("majority_vote: no predictions");
  std::array<double, kNumLabels> count{};
  for (const auto& p : predictions) count[label_code(p.label)] += 1.0;
  return resolve(count, predictions);
}

SentimentLabel weighted_vote(const std::vector<Prediction>& predictions, const std::vector<double>& weights,
                             bool soft) {
  if (predictions.empty()) throw InvalidArgument("weighted_vote: no predictions");
  if (predictions.size() != weights.size())
    throw InvalidArgument("weighted_vote: " + std::to_string(predictions.size()) + " predictions but " +
                          std::to_string(weights.size()) + " weights");
  std::array<double, kNumLabels> score{};
  for (std::size_t s = 0; s < predictions.size(); ++s) {
    if (soft) {
      for (std::size_t l = 0; l < kNumLabels; ++l) score[l] += weights[s] * predictions[s].distribution[l];
    } else {
      score[label_code(predictions[s].label)] += weights[s];
    }
  }
  return resolve(score, predictions);
}

LabeledDataset project(const std::map<std::string, const Classifier*>& models, const ParallelCorpus& parallel,
                       const std::vector<std::string>& sources, const std::string& target) {
  if (parallel.rows.empty()) throw DataError("project: empty parallel corpus");
  if (sources.empty()) throw InvalidArgument("project: no source languages");
  auto tcol = std::find(parallel.languages.begin(), parallel.languages.end(), target);
  if (tcol == parallel.languages.end())
    throw InvalidArgument("project: target language '" + target + "' not in parallel corpus");
  std::size_t target_col = static_cast<std::size_t>(tcol - parallel.languages.begin());

  std::vector<std::pair<std::size_t, const Classifier*>> voters;
  for (const auto& src : sources) {
    auto m = models.find(src);
    if (m == models.end() || m->second == nullptr)
      throw InvalidArgument("project: no model for source language '" + src + "'");
    bool found = false;
    for (std::size_t c = 0; c < parallel.languages.size(); ++c) {
      if (parallel.languages[c] == src && c != target_col) {
        voters.emplace_back(c, m->second);
        found = true;
      }
    }
    if (!found) throw InvalidArgument("project: source language '" + src + "' not in parallel corpus");
  }

  LabeledDataset out;
  out.language = target;
  out.examples.reserve(parallel.rows.size());
  std::vector<Prediction> votes;
  for (const auto& row : parallel.rows) {
    votes.clear();
    for (const auto& [col, model] : voters) votes.push_back(model->predict(row[col]));
    out.examples.push_back({row[target_col], majority_vote(votes)});
  }
  return out;
}

LabeledDataset project(const Classifier& model, const ParallelCorpus& parallel,
                       const std::vector<std::string>& sources, const std::string& target) {
  std::map<std::string, const Classifier*> models;
  for (const auto& s : sources) models[s] = &model;
  return project(models, parallel, sources, target);
}

LabeledDataset translate_dataset(const LabeledDataset& d, const align::Dictionary& dict) {
  LabeledDataset out;
  out.language = dict.target_language().empty() ? d.language : dict.target_language();
  out.examples.reserve(d.size());
  for (const auto& ex : d.examples) {
    LabeledExample t{{{}, out.language}, ex.label};
    t.sentence.tokens.reserve(ex.sentence.tokens.size());
    for (const auto& tok : ex.sentence.tokens) {
      const std::string* tr = dict.translate(tok);
      t.sentence.tokens.push_back(tr ? *tr : tok);
    }
    out.examples.push_back(std::move(t));
  }
  return out;
}

LabeledDataset direct_concat(const std::vector<LabeledDataset>& datasets,
                             const std::vector<align::Dictionary>& dicts, const std::string& target) {
  if (datasets.size() != dicts.size())
    throw InvalidArgument("direct_concat: " + std::to_string(datasets.size()) + " datasets but " +
                          std::to_string(dicts.size()) + " dictionaries");
  LabeledDataset out;
  out.language = target;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    LabeledDataset t = translate_dataset(datasets[i], dicts[i]);
    for (auto& ex : t.examples) {
      ex.sentence.language = target;
      out.examples.push_back(std::move(ex));
    }
  }
  return out;
}

std::vector<SentimentLabel> ensemble_flat(const std::vector<const Classifier*>& models,
                                          const std::vector<Sentence>& test) {
  if (models.empty()) throw InvalidArgument("ensemble_flat: no models");
  std::vector<SentimentLabel> out;
  out.reserve(test.size());
  std::vector<Prediction> votes;
  for (const auto& s : test) {
    votes.clear();
    for (const auto* m : models) votes.push_back(m->predict(s));
    out.push_back(majority_vote(votes));
  }
  return out;
}

std::vector<double> kl_weights(const std::vector<double>& kls, double floor) {
  if (kls.empty()) throw InvalidArgument("kl_weights: no divergences");
  if (!(floor > 0.0)) throw InvalidArgument("kl_weights: floor must be positive");
  std::vector<double> w;
  w.reserve(kls.size());
  double total = 0.0;
  for (double k : kls) {
    if (!std::isfinite(k) || k < 0.0) throw InvalidArgument("kl_weights: invalid divergence " + format_double(k));
    double inv = 1.0 / std::max(k, floor);
    double v = inv * inv * inv * inv;
    w.push_back(v);
    total += v;
  }
  for (double& v : w) v /= total;
  return w;
}

std::vector<SentimentLabel> ensemble_weighted(const std::vector<const Classifier*>& models,
                                              const std::vector<double>& weights,
                                              const std::vector<Sentence>& test, bool soft) {
  if (models.empty()) throw InvalidArgument("ensemble: no models");
  if (models.size() != weights.size()) throw InvalidArgument("ensemble: models and weights differ in count");
  std::vector<SentimentLabel> out;
  out.reserve(test.size());
  std::vector<Prediction> votes;
  for (const auto& s : test) {
    votes.clear();
    for (const auto* m : models) votes.push_back(m->predict(s));
    out.push_back(weighted_vote(votes, weights, soft));
  }
  return out;
}

std::vector<SentimentLabel> ensemble_kl(const std::vector<const Classifier*>& models,
                                        const std::vector<postag::TrigramDist>& source_dists,
                                        const postag::TrigramDist& target_dist, const std::vector<Sentence>& test,
                                        const EnsembleKlOptions& options) {
  if (models.size() != source_dists.size())
    throw InvalidArgument("ensemble_kl: models and source distributions differ in count");
  std::vector<double> kls;
  for (const auto& d : source_dists) kls.push_back(postag::kl_between(target_dist, d, options.direction));
  return ensemble_weighted(models, kl_weights(kls, options.floor), test, options.soft);
}

std::string method_name(Method m) {
  switch (m) {
    case Method::projection: return "projection";
    case Method::direct_concat: return "direct_concat";
    case Method::ensemble_flat: return "ensemble_flat";
    case Method::ensemble_kl: return "ensemble_kl";
    case Method::lexicon_baseline: return "lexicon_baseline";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::projection, Method::direct_concat, Method::ensemble_flat, Method::ensemble_kl,
                   Method::lexicon_baseline}) {
    if (method_name(m) == name) return m;
  }
  throw InvalidArgument("unknown method '" + name +
                        "' (expected projection, direct_concat, ensemble_flat, ensemble_kl or lexicon_baseline)");
}

namespace {

ClassifierKind parse_kind(const std::string& name) {
  if (name == "neural") return ClassifierKind::neural;
  if (name == "nbsvm") return ClassifierKind::nbsvm;
  throw InvalidArgument("unknown classifier '" + name + "' (expected neural or nbsvm)");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

void TransferPlan::validate() const {
  if (target.empty()) throw InvalidArgument("plan: no target language");
  if (sources.empty() && method != Method::lexicon_baseline) throw InvalidArgument("plan: no source languages");
  if (std::find(sources.begin(), sources.end(), target) != sources.end())
    throw InvalidArgument("plan: target language '" + target + "' is also a source");
  if (threads < 1) throw InvalidArgument("plan: threads must be at least 1");
  if (epochs && *epochs < 1) throw InvalidArgument("plan: epochs must be at least 1");
}

TransferPlan plan_from_config(const harness::Config& config, const fs::path& base) {
  auto resolve_path = [&](const std::string& p) {
    fs::path path(p);
    return path.is_relative() && !base.empty() ? base / path : path;
  };
  auto opt_path = [&](const std::string& section, const std::string& key) -> std::optional<fs::path> {
    auto v = config.get(section, key);
    if (!v || v->empty()) return std::nullopt;
    return resolve_path(*v);
  };
  auto path_map = [&](const std::string& prefix) {
    std::map<std::string, fs::path> out;
    for (const auto& [k, v] : config.with_prefix("resources", prefix)) out[k] = resolve_path(v);
    return out;
  };

  TransferPlan plan;
  plan.method = parse_method(config.get_or("plan", "method", "direct_concat"));
  plan.sources = split_list(config.get_or("plan", "sources", ""));
  plan.target = config.get_or("plan", "target", "");
  plan.classifier = parse_kind(config.get_or("plan", "classifier", "neural"));
  plan.source_classifier = parse_kind(config.get_or("plan", "source_classifier", "neural"));
  plan.seed = static_cast<std::uint64_t>(config.get_int("plan", "seed", 1));
  plan.threads = static_cast<int>(config.get_int("plan", "threads", 1));
  plan.lowercase = config.get_bool("plan", "lowercase", true);

  plan.profile = harness::profile_by_name(config.get_or("neural", "profile", "desk"));
  auto& p = plan.profile;
  p.dims.d_ce = static_cast<int>(config.get_int("neural", "d_ce", p.dims.d_ce));
  p.dims.d_e = static_cast<int>(config.get_int("neural", "d_e", p.dims.d_e));
  p.dims.d_cc = static_cast<int>(config.get_int("neural", "d_cc", p.dims.d_cc));
  p.dims.d_rec = static_cast<int>(config.get_int("neural", "d_rec", p.dims.d_rec));
  p.dims.d_h = static_cast<int>(config.get_int("neural", "d_h", p.dims.d_h));
  p.dims.lexicon_feature = config.get_bool("neural", "lexicon_feature", p.dims.lexicon_feature);
  p.batch_size = static_cast<int>(config.get_int("neural", "batch", p.batch_size));
  p.learning_rate = config.get_double("neural", "lr", p.learning_rate);
  if (auto e = config.get("neural", "epochs")) plan.epochs = static_cast<int>(config.get_int("neural", "epochs", 0));
  p.lexicon_delta = config.get_double("lexicon", "delta", p.lexicon_delta);
  plan.lexicon_via_dictionary = config.get_bool("lexicon", "via_dictionary", false);

  plan.nbsvm.alpha = config.get_double("nbsvm", "alpha", plan.nbsvm.alpha);
  plan.nbsvm.l2 = config.get_double("nbsvm", "l2", plan.nbsvm.l2);
  plan.nbsvm.epochs = static_cast<int>(config.get_int("nbsvm", "epochs", plan.nbsvm.epochs));
  plan.nbsvm.lr = config.get_double("nbsvm", "lr", plan.nbsvm.lr);
  plan.nbsvm.bigrams = config.get_bool("nbsvm", "bigrams", plan.nbsvm.bigrams);
  plan.nbsvm.seed = plan.seed;

  plan.kl.floor = config.get_double("ensemble", "kl_floor", p.kl_floor);
  plan.kl.soft = config.get_bool("ensemble", "soft", false);
  std::string dir = config.get_or("ensemble", "kl_direction", "target_to_source");
  if (dir == "target_to_source") {
    plan.kl.direction = postag::KlDirection::target_to_source;
  } else if (dir == "source_to_target") {
    plan.kl.direction = postag::KlDirection::source_to_target;
  } else {
    throw InvalidArgument("unknown kl_direction '" + dir + "'");
  }
  p.trigram_alpha = config.get_double("ensemble", "trigram_alpha", p.trigram_alpha);

  plan.train = path_map("train.");
  plan.dev = path_map("dev.");
  plan.dict = path_map("dict.");
  plan.parallel = path_map("parallel.");
  plan.tagged = path_map("tagged.");
  plan.tagger = opt_path("resources", "tagger");
  plan.test = opt_path("resources", "test");
  plan.embeddings = opt_path("resources", "embeddings");
  plan.clusters = opt_path("resources", "clusters");
  plan.lexicon = opt_path("resources", "lexicon");
  plan.predictions_out = opt_path("output", "predictions");
  plan.model_out = opt_path("output", "model");
  plan.report_out = opt_path("output", "report");
  plan.validate();
  return plan;
}

namespace {

const fs::path& require(const std::map<std::string, fs::path>& m, const std::string& lang, const std::string& what) {
  auto it = m.find(lang);
  if (it == m.end()) throw DataError("plan: no " + what + " resource for language '" + lang + "'");
  return it->second;
}

void require_exists(const fs::path& p) {
  if (!fs::exists(p)) throw DataError("missing resource: " + p.string());
}

std::unique_ptr<Classifier> train_classifier(ClassifierKind kind, const LabeledDataset& train,
                                             const LabeledDataset* dev, const nn::Resources& resources,
                                             const TransferPlan& plan, int epochs, std::uint64_t seed,
                                             std::optional<nn::SentimentModel>* keep = nullptr) {
  if (kind == ClassifierKind::nbsvm) {
    nbsvm::NbSvmConfig cfg = plan.nbsvm;
    cfg.seed = seed;
    return std::make_unique<NbSvmClassifier>(nbsvm::train_nbsvm(train, cfg));
  }
  nn::TrainConfig tc;
  tc.epochs = epochs;
  tc.batch_size = plan.profile.batch_size;
  tc.adam.lr = plan.profile.learning_rate;
  tc.seed = seed;
  nn::SentimentModel model = nn::train(train, dev, resources, tc);
  if (keep) *keep = model;
  return std::make_unique<NeuralClassifier>(std::move(model));
}

std::vector<Sentence> sentences_of(const LabeledDataset& d) {
  std::vector<Sentence> out;
  out.reserve(d.size());
  for (const auto& ex : d.examples) out.push_back(ex.sentence);
  return out;
}

std::vector<SentimentLabel> labels_of(const LabeledDataset& d) {
  std::vector<SentimentLabel> out;
  out.reserve(d.size());
  for (const auto& ex : d.examples) out.push_back(ex.label);
  return out;
}

std::vector<SentimentLabel> predict_all(const Classifier& c, const std::vector<Sentence>& test) {
  std::vector<SentimentLabel> out;
  out.reserve(test.size());
  for (const auto& s : test) out.push_back(c.predict(s).label);
  return out;
}

// Tag sequences for a language: a tagged corpus if given, otherwise the
// sentences run through the tagger.
std::vector<std::vector<std::string>> tag_sequences(const TransferPlan& plan, const std::string& lang,
                                                    const std::vector<Sentence>& fallback,
                                                    const std::optional<postag::TaggerModel>& tagger) {
  std::vector<std::vector<std::string>> seqs;
  auto it = plan.tagged.find(lang);
  if (it != plan.tagged.end()) {
    require_exists(it->second);
    for (auto& s : load_tagged(it->second).sentences) seqs.push_back(std::move(s.tags));
    return seqs;
  }
  if (!tagger) throw DataError("plan: no tagged corpus or tagger for language '" + lang + "'");
  for (const auto& s : fallback) seqs.push_back(tagger->tag(s.tokens));
  return seqs;
}

}  // namespace

RunReport run_plan(const TransferPlan& plan) {
  plan.validate();
  TokenizerConfig tok{plan.lowercase};
  const int epochs = plan.epochs.value_or(plan.sources.size() > 1 ? plan.profile.epochs_multi_source
                                                                  : plan.profile.epochs_single_source);

  auto load_lab = [&](const fs::path& p, const std::string& lang) {
    require_exists(p);
    return load_labeled(p, lang, tok);
  };
  auto load_dict = [&](const std::string& src) {
    auto it = plan.dict.find(src);
    if (it == plan.dict.end()) return align::Dictionary(src, plan.target);
    require_exists(it->second);
    return align::load_dictionary(it->second, src, plan.target);
  };

  // Shared neural resources; dictionary translation happens on the data.
  nn::Resources resources;
  resources.dims = plan.profile.dims;
  if (plan.embeddings) {
    require_exists(*plan.embeddings);
    resources.embeddings = xling::EmbeddingTable::load(*plan.embeddings);
    if (resources.embeddings.dim() != resources.dims.d_ce)
      throw DataError(plan.embeddings->string() + ": embedding dimension " +
                      std::to_string(resources.embeddings.dim()) + " does not match d_ce " +
                      std::to_string(resources.dims.d_ce));
  }
  if (plan.clusters) {
    require_exists(*plan.clusters);
    resources.clusters = xling::ClusterMap::load(*plan.clusters);
  }
  std::optional<lexicon::WordLexicon> lex;
  if (plan.lexicon) {
    require_exists(*plan.lexicon);
    lex = lexicon::load_lexicon(*plan.lexicon);
  }
  if (resources.dims.lexicon_feature) {
    if (!lex) throw DataError("plan: lexicon_feature requires a lexicon resource");
    resources.lexicon = lex;
  }

  std::optional<LabeledDataset> test;
  if (plan.test) test = load_lab(*plan.test, plan.target);
  std::optional<LabeledDataset> target_dev;
  if (auto it = plan.dev.find(plan.target); it != plan.dev.end()) target_dev = load_lab(it->second, plan.target);
  const LabeledDataset* dev = target_dev ? &*target_dev : nullptr;

  RunReport report;
  std::vector<Sentence> test_sentences = test ? sentences_of(*test) : std::vector<Sentence>{};
  std::unique_ptr<Classifier> final_model;

  switch (plan.method) {
    case Method::direct_concat: {
      std::vector<LabeledDataset> sets;
      std::vector<align::Dictionary> dicts;
      for (const auto& src : plan.sources) {
        sets.push_back(load_lab(require(plan.train, src, "train"), src));
        dicts.push_back(load_dict(src));
      }
      LabeledDataset train = direct_concat(sets, dicts, plan.target);
      final_model = train_classifier(plan.classifier, train, dev, resources, plan, epochs, plan.seed, &report.model);
      break;
    }
    case Method::projection: {
      std::vector<fs::path> paths;
      std::vector<std::string> langs;
      for (const auto& [key, path] : plan.parallel) {
        require_exists(path);
        paths.push_back(path);
        langs.push_back(key.substr(0, key.find('.')));
      }
      ParallelCorpus parallel = load_parallel(paths, langs, tok);
      std::vector<std::unique_ptr<Classifier>> owned;
      std::map<std::string, const Classifier*> models;
      for (const auto& src : plan.sources) {
        LabeledDataset train = load_lab(require(plan.train, src, "train"), src);
        owned.push_back(train_classifier(plan.source_classifier, train, nullptr, resources, plan,
                                         plan.profile.epochs_single_source, plan.seed));
        models[src] = owned.back().get();
      }
      LabeledDataset projected = project(models, parallel, plan.sources, plan.target);
      final_model =
          train_classifier(plan.classifier, projected, dev, resources, plan, epochs, plan.seed, &report.model);
      report.projected = std::move(projected);
      break;
    }
    case Method::ensemble_flat:
    case Method::ensemble_kl: {
      std::vector<LabeledDataset> sets;
      for (const auto& src : plan.sources) {
        LabeledDataset raw = load_lab(require(plan.train, src, "train"), src);
        sets.push_back(translate_dataset(raw, load_dict(src)));
      }
      std::vector<std::unique_ptr<Classifier>> owned(sets.size());
      auto fit = [&](std::size_t i) {
        return train_classifier(plan.classifier, sets[i], dev, resources, plan, plan.profile.epochs_single_source,
                                plan.seed);
      };
      if (plan.threads > 1) {
        std::vector<std::future<std::unique_ptr<Classifier>>> jobs;
        for (std::size_t i = 0; i < sets.size(); ++i) jobs.push_back(std::async(std::launch::async, fit, i));
        for (std::size_t i = 0; i < sets.size(); ++i) owned[i] = jobs[i].get();
      } else {
        for (std::size_t i = 0; i < sets.size(); ++i) owned[i] = fit(i);
      }
      std::vector<const Classifier*> models;
      for (const auto& m : owned) models.push_back(m.get());
      if (!test) throw DataError("plan: ensemble methods need a test resource");
      if (plan.method == Method::ensemble_flat) {
        report.predictions = ensemble_flat(models, test_sentences);
        report.ensemble_weights.assign(models.size(), 1.0 / static_cast<double>(models.size()));
      } else {
        std::optional<postag::TaggerModel> tagger;
        if (plan.tagger) {
          require_exists(*plan.tagger);
          tagger = postag::TaggerModel::load(*plan.tagger);
        }
        std::vector<std::vector<std::vector<std::string>>> src_seqs;
        std::set<std::string> tagset;
        for (std::size_t i = 0; i < plan.sources.size(); ++i) {
          LabeledDataset raw = load_lab(require(plan.train, plan.sources[i], "train"), plan.sources[i]);
          src_seqs.push_back(tag_sequences(plan, plan.sources[i], sentences_of(raw), tagger));
        }
        auto tgt_seqs = tag_sequences(plan, plan.target, test_sentences, tagger);
        for (const auto& seqs : src_seqs)
          for (const auto& s : seqs) tagset.insert(s.begin(), s.end());
        for (const auto& s : tgt_seqs) tagset.insert(s.begin(), s.end());
        std::vector<std::string> tags(tagset.begin(), tagset.end());
        auto tdist = postag::trigram_distribution(tgt_seqs, tags, plan.profile.trigram_alpha);
        std::vector<double> kls;
        for (const auto& seqs : src_seqs) {
          auto sdist = postag::trigram_distribution(seqs, tags, plan.profile.trigram_alpha);
          kls.push_back(postag::kl_between(tdist, sdist, plan.kl.direction));
        }
        report.ensemble_weights = kl_weights(kls, plan.kl.floor);
        report.predictions = ensemble_weighted(models, report.ensemble_weights, test_sentences, plan.kl.soft);
      }
      break;
    }
    case Method::lexicon_baseline: {
      if (!lex) throw DataError("plan: lexicon_baseline needs a lexicon resource");
      if (!test) throw DataError("plan: lexicon_baseline needs a test resource");
      std::string src = plan.sources.empty() ? std::string() : plan.sources.front();
      align::Dictionary dict = src.empty() ? align::Dictionary() : load_dict(src);
      if (plan.lexicon_via_dictionary) {
        align::Dictionary inverse(plan.target, src);
        for (const auto& [w, e] : dict.entries()) inverse.offer(e.target, w, e.count);
        for (const auto& s : test_sentences)
          report.predictions.push_back(lexicon::classify_threshold(
              lexicon::score_sentence_via_dictionary(*lex, inverse, s.tokens), plan.profile.lexicon_delta));
      } else {
        LexiconClassifier c(lexicon::translate_lexicon(*lex, dict), plan.profile.lexicon_delta);
        report.predictions = predict_all(c, test_sentences);
      }
      break;
    }
  }

  if (final_model && test) report.predictions = predict_all(*final_model, test_sentences);

  std::ostringstream summary;
  summary << "method\t" << method_name(plan.method) << "\n";
  summary << "target\t" << plan.target << "\n";
  if (report.projected) summary << "projected\t" << report.projected->size() << "\n";
  for (std::size_t i = 0; i < report.ensemble_weights.size(); ++i)
    summary << "weight." << plan.sources[i] << "\t" << format_double(report.ensemble_weights[i]) << "\n";
  if (test && !test->empty()) {
    report.metrics = harness::evaluate(report.predictions, labels_of(*test));
    summary << harness::format_report(*report.metrics, method_name(plan.method) + " -> " + plan.target);
  }
  report.summary = summary.str();

  if (plan.predictions_out) write_text(*plan.predictions_out, format_predictions(report.predictions));
  if (plan.report_out) write_text(*plan.report_out, report.summary);
  if (plan.model_out) {
    if (report.model) {
      report.model->save(*plan.model_out);
    } else if (final_model) {
      if (auto* nb = dynamic_cast<const NbSvmClassifier*>(final_model.get())) nb->model().save(*plan.model_out);
    }
  }
  return report;
}

std::string format_predictions(const std::vector<SentimentLabel>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out += std::to_string(i);
    out += '\t';
    out += label_name(labels[i]);
    out += '\n';
  }
  return out;
}

std::vector<SentimentLabel> parse_predictions(const std::vector<std::string>& lines) {
  std::vector<SentimentLabel> out;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    auto cols = split(lines[n], '\t');
    if (cols.size() != 2) throw DataError("expected 2 tab-separated columns at line " + std::to_string(n + 1));
    if (parse_int(cols[0]) != static_cast<long long>(out.size()))
      throw DataError("prediction index out of order at line " + std::to_string(n + 1));
    auto l = parse_label(trim(cols[1]));
    if (!l) throw DataError("unknown label at line " + std::to_string(n + 1));
    out.push_back(*l);
  }
  return out;
}

}  // namespace xlsent::transfer
