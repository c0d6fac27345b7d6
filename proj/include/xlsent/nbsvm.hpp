#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "xlsent/corpus.hpp"

namespace xlsent::nbsvm {

struct NbSvmConfig {
  double alpha = 1.0;  // add-alpha smoothing of the count vectors
  double l2 = 1e-4;
  int epochs = 30;
  double lr = 0.5;
  std::uint64_t seed = 1;
  bool bigrams = false;
};

/// One-vs-rest logistic classifiers over NB-scaled binary bag-of-words features.
struct NbSvmModel {
  std::vector<std::string> vocabulary;
  std::unordered_map<std::string, int> index;
  std::array<std::vector<double>, kNumLabels> ratios;   // NB log-count ratios per label
  std::array<std::vector<double>, kNumLabels> weights;  // linear weights per label
  std::array<double, kNumLabels> bias{};
  bool bigrams = false;

  /// Active (deduplicated) feature ids of a sentence; OOV features dropped.
  std::vector<int> features(const std::vector<std::string>& tokens) const;
  std::array<double, kNumLabels> scores(const std::vector<std::string>& tokens) const;

  /// TSV `label<TAB>feature<TAB>weight`; the feature `<bias>` holds the bias.
  /// Stored weights are the effective products weight * ratio.
  void save(const std::filesystem::path& path) const;
  static NbSvmModel load(const std::filesystem::path& path);
};

/// Feature strings of a token sequence: unigrams, plus `a_b` bigrams if asked.
std::vector<std::string> feature_strings(const std::vector<std::string>& tokens, bool bigrams);

/// r = log((p / |p|_1) / (q / |q|_1)) with p = alpha + in-class counts and
/// q = alpha + out-of-class counts.
std::vector<double> log_count_ratio(const std::vector<double>& in_class, const std::vector<double>& out_class,
                                    double alpha);

NbSvmModel train_nbsvm(const LabeledDataset& train, const NbSvmConfig& config = {});

struct NbSvmPrediction {
  SentimentLabel label;
  std::array<double, kNumLabels> scores;
};

NbSvmPrediction predict_nbsvm(const NbSvmModel& model, const std::vector<std::string>& tokens);

}  // namespace xlsent::nbsvm
