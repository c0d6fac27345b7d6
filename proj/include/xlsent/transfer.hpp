#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xlsent/align.hpp"
#include "xlsent/config.hpp"
#include "xlsent/corpus.hpp"
#include "xlsent/lexicon.hpp"
#include "xlsent/metrics.hpp"
#include "xlsent/nbsvm.hpp"
#include "xlsent/nnsent.hpp"
#include "xlsent/postag.hpp"
#include "xlsent/profile.hpp"

namespace xlsent::transfer {

struct Prediction {
  SentimentLabel label = SentimentLabel::neutral;
  std::array<double, kNumLabels> distribution{};
  std::string source;
};

/// Anything that labels a sentence.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual Prediction predict(const Sentence& sentence) const = 0;
  virtual std::string name() const = 0;
};

class NeuralClassifier final : public Classifier {
 public:
  explicit NeuralClassifier(nn::SentimentModel model, std::string name = "neural")
      : model_(std::move(model)), name_(std::move(name)) {}
  Prediction predict(const Sentence& sentence) const override;
  std::string name() const override { return name_; }
  const nn::SentimentModel& model() const { return model_; }

 private:
  nn::SentimentModel model_;
  std::string name_;
};

/// Distribution is the softmax of the per-label linear scores.
class NbSvmClassifier final : public Classifier {
 public:
  explicit NbSvmClassifier(nbsvm::NbSvmModel model, std::string name = "nbsvm")
      : model_(std::move(model)), name_(std::move(name)) {}
  Prediction predict(const Sentence& sentence) const override;
  std::string name() const override { return name_; }
  const nbsvm::NbSvmModel& model() const { return model_; }

 private:
  nbsvm::NbSvmModel model_;
  std::string name_;
};

/// Threshold rule over averaged lexicon scores; distribution is one-hot.
class LexiconClassifier final : public Classifier {
 public:
  LexiconClassifier(lexicon::WordLexicon lexicon, double delta, std::string name = "lexicon")
      : lexicon_(std::move(lexicon)), delta_(delta), name_(std::move(name)) {}
  Prediction predict(const Sentence& sentence) const override;
  std::string name() const override { return name_; }

 private:
  lexicon::WordLexicon lexicon_;
  double delta_;
  std::string name_;
};

/// Wraps a callable; used for oracles and tests.
class FunctionClassifier final : public Classifier {
 public:
  FunctionClassifier(std::function<Prediction(const Sentence&)> fn, std::string name)
      : fn_(std::move(fn)), name_(std::move(name)) {}
  Prediction predict(const Sentence& sentence) const override { return fn_(sentence); }
  std::string name() const override { return name_; }

 private:
  std::function<Prediction(const Sentence&)> fn_;
  std::string name_;
};

/// Most frequent label; ties go to the label with the larger summed
/// distribution mass over all predictions, then to the lower label code.
SentimentLabel majority_vote(const std::vector<Prediction>& predictions);

/// Predicts every source-language column of each row with that language's
/// model (one vote per column, so repeated translations each vote) and labels
/// the row's target sentence by majority vote.
LabeledDataset project(const std::map<std::string, const Classifier*>& models, const ParallelCorpus& parallel,
                       const std::vector<std::string>& sources, const std::string& target);

/// Single-model convenience form: the same classifier serves every source.
LabeledDataset project(const Classifier& model, const ParallelCorpus& parallel,
                       const std::vector<std::string>& sources, const std::string& target);

/// Word-by-word dictionary translation; labels and token counts unchanged.
LabeledDataset translate_dataset(const LabeledDataset& d, const align::Dictionary& dict);

/// Translates each dataset with its dictionary and concatenates in order.
LabeledDataset direct_concat(const std::vector<LabeledDataset>& datasets,
                             const std::vector<align::Dictionary>& dicts, const std::string& target);

std::vector<SentimentLabel> ensemble_flat(const std::vector<const Classifier*>& models,
                                          const std::vector<Sentence>& test);

inline constexpr double kKlFloor = 1e-6;

/// (1 / max(kl, floor))^4, normalised to sum to one.
std::vector<double> kl_weights(const std::vector<double>& kls, double floor = kKlFloor);

/// Weighted vote per sentence. Hard mode adds weight_s to model s's label;
/// soft mode adds weight_s * distribution_s. Ties resolve as in majority_vote.
SentimentLabel weighted_vote(const std::vector<Prediction>& predictions, const std::vector<double>& weights,
                             bool soft = false);

struct EnsembleKlOptions {
  postag::KlDirection direction = postag::KlDirection::target_to_source;
  double floor = kKlFloor;
  bool soft = false;
};

std::vector<SentimentLabel> ensemble_kl(const std::vector<const Classifier*>& models,
                                        const std::vector<postag::TrigramDist>& source_dists,
                                        const postag::TrigramDist& target_dist, const std::vector<Sentence>& test,
                                        const EnsembleKlOptions& options = {});

/// Same vote with precomputed weights.
std::vector<SentimentLabel> ensemble_weighted(const std::vector<const Classifier*>& models,
                                              const std::vector<double>& weights,
                                              const std::vector<Sentence>& test, bool soft = false);

enum class Method { projection, direct_concat, ensemble_flat, ensemble_kl, lexicon_baseline };
enum class ClassifierKind { neural, nbsvm };

std::string method_name(Method m);
Method parse_method(const std::string& name);

/// Declarative description of one transfer experiment.
struct TransferPlan {
  Method method = Method::direct_concat;
  std::vector<std::string> sources;
  std::string target;
  ClassifierKind classifier = ClassifierKind::neural;
  /// Classifier used as the source-side supervised system for projection.
  ClassifierKind source_classifier = ClassifierKind::neural;
  harness::Profile profile;
  std::optional<int> epochs;
  std::uint64_t seed = 1;
  int threads = 1;
  nbsvm::NbSvmConfig nbsvm;
  EnsembleKlOptions kl;
  bool lowercase = true;
  /// Lexicon scoring through a target -> source dictionary instead of a
  /// translated lexicon.
  bool lexicon_via_dictionary = false;

  // Resources. Per-language maps are keyed by language code.
  std::map<std::string, std::filesystem::path> train;     // labeled source data
  std::map<std::string, std::filesystem::path> dev;
  std::map<std::string, std::filesystem::path> dict;      // source -> target
  std::map<std::string, std::filesystem::path> parallel;  // one file per language
  std::map<std::string, std::filesystem::path> tagged;    // for ensemble_kl
  std::optional<std::filesystem::path> tagger;            // tags raw text when `tagged` lacks a language
  std::optional<std::filesystem::path> test;              // labeled target test set
  std::optional<std::filesystem::path> embeddings;
  std::optional<std::filesystem::path> clusters;
  std::optional<std::filesystem::path> lexicon;           // source-language lexicon
  std::optional<std::filesystem::path> predictions_out;
  std::optional<std::filesystem::path> model_out;
  std::optional<std::filesystem::path> report_out;

  /// Throws InvalidArgument on structural problems (no sources, target in sources).
  void validate() const;
};

/// Reads a plan from `[plan]`, `[resources]`, `[neural]`, `[nbsvm]`,
/// `[ensemble]` and `[output]` sections. Relative paths resolve against `base`.
TransferPlan plan_from_config(const harness::Config& config, const std::filesystem::path& base = {});

struct RunReport {
  std::vector<SentimentLabel> predictions;
  std::optional<harness::Metrics> metrics;
  std::optional<nn::SentimentModel> model;
  std::optional<LabeledDataset> projected;
  std::vector<double> ensemble_weights;
  std::string summary;
};

RunReport run_plan(const TransferPlan& plan);

/// `index<TAB>label` lines.
std::string format_predictions(const std::vector<SentimentLabel>& labels);
std::vector<SentimentLabel> parse_predictions(const std::vector<std::string>& lines);

}  // namespace xlsent::transfer
