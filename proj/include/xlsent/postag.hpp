#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "xlsent/corpus.hpp"

namespace xlsent::postag {

/// Averaged-perceptron tagger weights. Tags are kept in sorted order; score
/// ties resolve to the earlier tag.
class TaggerModel {
 public:
  TaggerModel() = default;
  explicit TaggerModel(std::vector<std::string> tagset);

  const std::vector<std::string>& tagset() const { return tags_; }
  const std::unordered_map<std::string, std::vector<double>>& weights() const { return weights_; }

  std::vector<std::string> tag(const std::vector<std::string>& tokens) const;

  void save(const std::filesystem::path& path) const;
  static TaggerModel load(const std::filesystem::path& path);

 private:
  friend class PerceptronTrainer;
  int predict(const std::vector<std::string>& features) const;

  std::vector<std::string> tags_;
  std::unordered_map<std::string, std::vector<double>> weights_;
};

/// Feature strings for position i given the two previous (predicted) tags.
std::vector<std::string> tagger_features(const std::vector<std::string>& tokens, std::size_t i,
                                         const std::string& prev, const std::string& prev2);

struct TaggerOptions {
  int epochs = 5;
  /// Sentence order is reshuffled each epoch from this seed.
  std::uint64_t seed = 1;
};

TaggerModel train_tagger(const TaggedCorpus& corpus, const TaggerOptions& options = {});

inline std::vector<std::string> tag(const TaggerModel& model, const std::vector<std::string>& tokens) {
  return model.tag(tokens);
}

inline const std::string kBos = "<BOS>";
inline const std::string kEos = "<EOS>";

/// Smoothed distribution over tag trigrams drawn from tagset plus the two
/// boundary tags. Each sentence contributes BOS BOS t1 .. tn EOS.
struct TrigramDist {
  std::vector<std::string> tags;  // sorted real tags, then BOS, EOS
  std::vector<double> probs;      // size tags.size()^3, row-major
  double alpha = 0.0;

  double prob(const std::string& a, const std::string& b, const std::string& c) const;
};

/// Tagset is taken from the data.
TrigramDist trigram_distribution(const std::vector<std::vector<std::string>>& tag_sequences, double alpha = 0.1);
/// Shared tagset, so distributions from different corpora are comparable.
TrigramDist trigram_distribution(const std::vector<std::vector<std::string>>& tag_sequences,
                                 const std::vector<std::string>& tagset, double alpha = 0.1);

/// sum p ln(p / q) over a common support.
double kl_divergence(std::span<const double> p, std::span<const double> q);
double kl(const TrigramDist& p, const TrigramDist& q);

enum class KlDirection { target_to_source, source_to_target };

/// KL(target || source) by default.
double kl_between(const TrigramDist& target, const TrigramDist& source,
                  KlDirection direction = KlDirection::target_to_source);

}  // namespace xlsent::postag
