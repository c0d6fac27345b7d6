#pragma once

// BiLSTM + average-pool sentiment classifier with hand-written backprop.
//
// Per token the input is f = x_ce . x_e . x_cc (. x_sw): a fixed cross-lingual
// embedding, an updatable word embedding, a cluster embedding and, optionally,
// the two lexicon scores. The sentence representation concatenates the final
// states of a forward and a backward LSTM with the mean of all f, feeds it
// through a ReLU layer, and ends in a 3-way softmax.

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "xlsent/align.hpp"
#include "xlsent/corpus.hpp"
#include "xlsent/lexicon.hpp"
#include "xlsent/xlingrep.hpp"

namespace xlsent::nn {

struct Dims {
  int d_ce = 16;
  int d_e = 16;
  int d_cc = 8;
  int d_rec = 16;
  int d_h = 16;
  bool lexicon_feature = false;

  int input() const { return d_ce + d_e + d_cc + (lexicon_feature ? 2 : 0); }
  bool operator==(const Dims&) const = default;
};

/// String -> row map where row 0 is reserved for unknown words.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> words);

  int index(const std::string& word) const;  // 0 when absent
  std::size_t rows() const { return words_.size() + 1; }
  const std::vector<std::string>& words() const { return words_; }
  bool operator==(const Vocabulary& o) const { return words_ == o.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

/// External resources and lookup tables the model reads tokens through.
struct FeatureConfig {
  Dims dims;
  std::optional<align::Dictionary> dictionary;
  std::optional<lexicon::WordLexicon> lexicon;
  Vocabulary fixed_vocab;    // rows of the fixed embedding matrix
  Vocabulary word_vocab;     // rows of the updatable embedding matrix
  xling::ClusterMap clusters;

  /// Translation if the dictionary has one, else the word itself.
  const std::string& lookup_key(const std::string& word) const;
  int cluster_row(const std::string& key) const;  // cluster id + 1, 0 for unknown
};

/// Per-token row indexes plus the fixed lexicon scores.
struct TokenFeatures {
  std::vector<int> fixed;
  std::vector<int> word;
  std::vector<int> cluster;
  std::vector<lexicon::Polarity> sentiment;

  std::size_t size() const { return word.size(); }
};

TokenFeatures featurize(const Sentence& sentence, const FeatureConfig& cfg);

struct LstmParams {
  Eigen::MatrixXd W;  // 4*d_rec x d_i, gate order: input, forget, output, candidate
  Eigen::MatrixXd U;  // 4*d_rec x d_rec
  Eigen::MatrixXd b;  // 4*d_rec x 1
};

struct ModelParams {
  Eigen::MatrixXd fixed_emb;    // not trained; row 0 is the zero UNK row
  Eigen::MatrixXd word_emb;     // |V_w|+1 x d_e
  Eigen::MatrixXd cluster_emb;  // K+1 x d_cc
  LstmParams fwd;
  LstmParams bwd;
  Eigen::MatrixXd hidden;       // d_h x (2 d_rec + d_i)
  Eigen::MatrixXd hidden_bias;  // d_h x 1
  Eigen::MatrixXd out;          // 3 x d_h
  Eigen::MatrixXd out_bias;     // 3 x 1

  /// Visits every trainable block (everything except fixed_emb).
  template <typename Self, typename F>
  static void visit_trainable(Self& self, F&& f) {
    f("word_emb", self.word_emb);
    f("cluster_emb", self.cluster_emb);
    f("lstm_f.W", self.fwd.W);
    f("lstm_f.U", self.fwd.U);
    f("lstm_f.b", self.fwd.b);
    f("lstm_b.W", self.bwd.W);
    f("lstm_b.U", self.bwd.U);
    f("lstm_b.b", self.bwd.b);
    f("hidden", self.hidden);
    f("hidden_bias", self.hidden_bias);
    f("out", self.out);
    f("out_bias", self.out_bias);
  }
  template <typename F>
  void for_each_trainable(F&& f) { visit_trainable(*this, std::forward<F>(f)); }
  template <typename F>
  void for_each_trainable(F&& f) const { visit_trainable(*this, std::forward<F>(f)); }

  /// Same trainable shapes, all zeros; fixed_emb left empty.
  ModelParams zeros_like() const;
  bool all_finite() const;
};

/// Zero-initialised parameters of the right shapes.
ModelParams make_params(const Dims& dims, std::size_t fixed_rows, std::size_t word_rows,
                        std::size_t cluster_rows);

/// Xavier-uniform matrices, uniform(-0.1, 0.1) embeddings, zero biases except
/// the forget gates (1.0). The fixed matrix is left untouched.
void init_params(ModelParams& params, Rng& rng);

struct LstmTrace {
  Eigen::MatrixXd i, f, o, g, c, tanh_c, h;  // d_rec x n, in processing order
};

struct ForwardTrace {
  Eigen::MatrixXd inputs;  // d_i x n, token order
  LstmTrace fwd;
  LstmTrace bwd;           // column k holds token n-1-k
  Eigen::VectorXd r;       // 2 d_rec
  Eigen::VectorXd p;       // d_i
  Eigen::VectorXd pre_hidden;
  Eigen::VectorXd hidden;
  Eigen::VectorXd logits;
  Eigen::VectorXd probs;
};

/// Column t holds f_t for token t.
Eigen::MatrixXd input_features(const ModelParams& params, const Dims& dims, const TokenFeatures& x);

ForwardTrace forward(const ModelParams& params, const Dims& dims, const TokenFeatures& x);

/// Numerically stable softmax.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

/// Adds d(-log p(gold | x))/d(theta) into grads; returns -log p(gold | x).
double backward(const ModelParams& params, const Dims& dims, const TokenFeatures& x,
                SentimentLabel gold, ModelParams& grads);

struct Batch {
  std::vector<const TokenFeatures*> inputs;
  std::vector<SentimentLabel> labels;
};

/// Negated sum log-likelihood over the batch and its gradient.
double loss_and_grad(const ModelParams& params, const Dims& dims, const Batch& batch, ModelParams& grads);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  long long t = 0;
  ModelParams m;
  ModelParams v;

  static AdamState fresh(const ModelParams& params, AdamConfig config = {});
};

/// One bias-corrected Adam update over every trainable block.
void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state);

struct SentimentModel {
  FeatureConfig features;
  ModelParams params;

  struct Prediction {
    SentimentLabel label;
    std::array<double, kNumLabels> distribution;
  };
  Prediction predict(const Sentence& sentence) const;

  /// Text format headed `XLSENT-NN v1`; round trips bit-exactly.
  void save(const std::filesystem::path& path) const;
  static SentimentModel load(const std::filesystem::path& path);
  std::string serialize() const;
  static SentimentModel deserialize(const std::string& text);
};

/// Argmax with ties resolved toward the lower label code.
SentimentLabel argmax_label(const std::array<double, kNumLabels>& distribution);

struct TrainConfig {
  int epochs = 7;
  int batch_size = 32;
  AdamConfig adam;
  std::uint64_t seed = 1;
  /// Global gradient-norm clip; 0 disables.
  double clip_norm = 0.0;
  std::function<void(int epoch, double loss, std::optional<double> dev_accuracy)> on_epoch;
};

struct TrainHistory {
  std::vector<double> epoch_loss;
  std::vector<double> dev_accuracy;
};

/// External inputs for model construction. `embeddings` may be empty, in which
/// case every token reads the zero UNK row of a d_ce-wide fixed matrix.
struct Resources {
  Dims dims;
  xling::EmbeddingTable embeddings;
  xling::ClusterMap clusters;
  std::optional<align::Dictionary> dictionary;
  std::optional<lexicon::WordLexicon> lexicon;
};

/// Builds vocabularies from the training set and the resources, then
/// initialises the parameters from the seed's "init" stream.
SentimentModel build_model(const LabeledDataset& train_set, const Resources& resources, std::uint64_t seed);

SentimentModel train(const LabeledDataset& train_set, const LabeledDataset* dev_set,
                     const Resources& resources, const TrainConfig& config, TrainHistory* history = nullptr);

/// Continues training an existing model in place.
void train_model(SentimentModel& model, const LabeledDataset& train_set, const LabeledDataset* dev_set,
                 const TrainConfig& config, TrainHistory* history = nullptr);

double accuracy_on(const SentimentModel& model, const LabeledDataset& data);

}  // namespace xlsent::nn
