#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "xlsent/align.hpp"
#include "xlsent/corpus.hpp"

namespace xlsent::xling {

/// Word vectors with a word -> row index. Rows follow insertion order.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(int dim) : dim_(dim) {}
  EmbeddingTable(std::vector<std::string> words, Eigen::MatrixXd vectors);

  int dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const Eigen::MatrixXd& vectors() const { return vectors_; }

  std::optional<std::size_t> index(const std::string& word) const;
  Eigen::VectorXd vector(const std::string& word) const;  // throws if absent

  /// word2vec text format: `|V| d` header, then `word v1 ... vd`.
  void save(const std::filesystem::path& path) const;
  static EmbeddingTable load(const std::filesystem::path& path);

  bool operator==(const EmbeddingTable& o) const {
    return dim_ == o.dim_ && words_ == o.words_ && vectors_ == o.vectors_;
  }

 private:
  int dim_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  Eigen::MatrixXd vectors_;
};

/// Hard word -> cluster id assignment, ids in [0, K).
struct ClusterMap {
  int num_clusters = 0;
  std::map<std::string, int> assignment;

  std::optional<int> cluster(const std::string& word) const;

  /// TSV `word<TAB>cluster_id`. K is stored as a `#clusters K` header line.
  void save(const std::filesystem::path& path) const;
  static ClusterMap load(const std::filesystem::path& path);
  bool operator==(const ClusterMap&) const = default;
};

struct MonolingualCorpus {
  std::string language;
  std::vector<std::vector<std::string>> sentences;
};

struct CodeSwitchConfig {
  double rate = 0.3;
  std::uint64_t seed = 1;
  /// When set, only dictionaries into this language are used.
  std::optional<std::string> fixed_target;
};

struct CodeSwitchStats {
  std::size_t tokens = 0;
  std::size_t selected = 0;
  std::size_t swapped = 0;
};

/// Replaces a random fraction of tokens with dictionary translations. Each
/// position is selected with probability `rate`; a selected token is swapped
/// into a language drawn uniformly from those whose dictionary (from the
/// sentence's language) contains it. Output keeps corpus and sentence order.
std::vector<std::vector<std::string>> code_switch(const std::vector<MonolingualCorpus>& corpora,
                                                  const std::vector<align::Dictionary>& dictionaries,
                                                  const CodeSwitchConfig& config,
                                                  CodeSwitchStats* stats = nullptr);

struct SgnsConfig {
  int dim = 300;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  double learning_rate = 0.025;
  int min_count = 1;
  /// Subsampling threshold; 0 disables it.
  double sample = 0.0;
  std::uint64_t seed = 1;
};

/// Skip-gram with negative sampling (unigram^0.75 noise, linear learning-rate
/// decay, reduced random window as in the reference word2vec tool).
EmbeddingTable train_sgns(const std::vector<std::vector<std::string>>& corpus, const SgnsConfig& config);

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct KMeansResult {
  ClusterMap clusters;
  /// Objective after every assignment step.
  std::vector<double> objective;
  int iterations = 0;
};

/// K-means with k-means++ seeding over the embedding rows, at most `max_iter`
/// Lloyd iterations.
KMeansResult kmeans(const EmbeddingTable& emb, int k, std::uint64_t seed, int max_iter = 100);

inline ClusterMap induce_clusters(const EmbeddingTable& emb, int k, std::uint64_t seed) {
  return kmeans(emb, k, seed).clusters;
}

}  // namespace xlsent::xling
