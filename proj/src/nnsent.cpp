#include "xlsent/nnsent.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace xlsent::nn {

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], static_cast<int>(i) + 1).second) {
      throw InvalidArgument("Vocabulary: duplicate word '" + words_[i] + "'");
    }
  }
}

int Vocabulary::index(const std::string& word) const {
  auto it = index_.find(word);
  return it == index_.end() ? 0 : it->second;
}

const std::string& FeatureConfig::lookup_key(const std::string& word) const {
  if (dictionary) {
    if (const std::string* t = dictionary->translate(word)) return *t;
  }
  return word;
}

int FeatureConfig::cluster_row(const std::string& key) const {
  auto c = clusters.cluster(key);
  return c ? *c + 1 : 0;
}

TokenFeatures featurize(const Sentence& sentence, const FeatureConfig& cfg) {
  TokenFeatures x;
  const std::size_t n = sentence.tokens.size();
  x.fixed.reserve(n);
  x.word.reserve(n);
  x.cluster.reserve(n);
  for (const auto& tok : sentence.tokens) {
    const std::string& key = cfg.lookup_key(tok);
    x.fixed.push_back(cfg.fixed_vocab.index(key));
    x.word.push_back(cfg.word_vocab.index(key));
    x.cluster.push_back(cfg.cluster_row(key));
    if (cfg.dims.lexicon_feature) {
      x.sentiment.push_back(cfg.lexicon ? cfg.lexicon->lookup(key) : lexicon::Polarity{0.0, 0.0});
    }
  }
  return x;
}

namespace {

std::vector<Eigen::MatrixXd*> blocks(ModelParams& p) {
  std::vector<Eigen::MatrixXd*> out;
  p.for_each_trainable([&](const char*, Eigen::MatrixXd& m) { out.push_back(&m); });
  return out;
}

std::vector<const Eigen::MatrixXd*> blocks(const ModelParams& p) {
  std::vector<const Eigen::MatrixXd*> out;
  p.for_each_trainable([&](const char*, const Eigen::MatrixXd& m) { out.push_back(&m); });
  return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

ModelParams ModelParams::zeros_like() const {
  ModelParams z;
  auto src = blocks(*this);
  auto dst = blocks(z);
  for (std::size_t k = 0; k < src.size(); ++k) *dst[k] = Eigen::MatrixXd::Zero(src[k]->rows(), src[k]->cols());
  return z;
}

bool ModelParams::all_finite() const {
  if (!fixed_emb.allFinite()) return false;
  for (const auto* m : blocks(*this)) {
    if (!m->allFinite()) return false;
  }
  return true;
}

ModelParams make_params(const Dims& dims, std::size_t fixed_rows, std::size_t word_rows,
                        std::size_t cluster_rows) {
  if (dims.d_ce < 1 || dims.d_e < 1 || dims.d_cc < 1 || dims.d_rec < 1 || dims.d_h < 1) {
    throw InvalidArgument("model dimensions must be >= 1");
  }
  const auto rows = [](std::size_t r) { return static_cast<Eigen::Index>(r); };
  const int di = dims.input();
  const int h = dims.d_rec;
  ModelParams p;
  p.fixed_emb = Eigen::MatrixXd::Zero(rows(fixed_rows), dims.d_ce);
  p.word_emb = Eigen::MatrixXd::Zero(rows(word_rows), dims.d_e);
  p.cluster_emb = Eigen::MatrixXd::Zero(rows(cluster_rows), dims.d_cc);
  for (LstmParams* l : {&p.fwd, &p.bwd}) {
    l->W = Eigen::MatrixXd::Zero(4 * h, di);
    l->U = Eigen::MatrixXd::Zero(4 * h, h);
    l->b = Eigen::MatrixXd::Zero(4 * h, 1);
  }
  p.hidden = Eigen::MatrixXd::Zero(dims.d_h, 2 * h + di);
  p.hidden_bias = Eigen::MatrixXd::Zero(dims.d_h, 1);
  p.out = Eigen::MatrixXd::Zero(kNumLabels, dims.d_h);
  p.out_bias = Eigen::MatrixXd::Zero(kNumLabels, 1);
  return p;
}

void init_params(ModelParams& p, Rng& rng) {
  auto uniform_fill = [&](Eigen::MatrixXd& m, double limit) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = rng.uniform(-limit, limit);
    }
  };
  auto xavier = [&](Eigen::MatrixXd& m) {
    uniform_fill(m, std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols())));
  };
  uniform_fill(p.word_emb, 0.1);
  uniform_fill(p.cluster_emb, 0.1);
  for (LstmParams* l : {&p.fwd, &p.bwd}) {
    xavier(l->W);
    xavier(l->U);
    const Eigen::Index h = l->U.cols();
    l->b.setZero();
    l->b.block(h, 0, h, 1).setOnes();
  }
  xavier(p.hidden);
  p.hidden_bias.setZero();
  xavier(p.out);
  p.out_bias.setZero();
}

Eigen::MatrixXd input_features(const ModelParams& params, const Dims& dims, const TokenFeatures& x) {
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd f(dims.input(), n);
  for (Eigen::Index t = 0; t < n; ++t) {
    f.block(0, t, dims.d_ce, 1) = params.fixed_emb.row(x.fixed[t]).transpose();
    f.block(dims.d_ce, t, dims.d_e, 1) = params.word_emb.row(x.word[t]).transpose();
    f.block(dims.d_ce + dims.d_e, t, dims.d_cc, 1) = params.cluster_emb.row(x.cluster[t]).transpose();
    if (dims.lexicon_feature) {
      const Eigen::Index off = dims.d_ce + dims.d_e + dims.d_cc;
      f(off, t) = x.sentiment[t][0];
      f(off + 1, t) = x.sentiment[t][1];
    }
  }
  return f;
}

namespace {

// Runs the cell over the columns of `inputs` in the given order.
LstmTrace run_lstm(const LstmParams& l, const Eigen::MatrixXd& inputs, bool reverse) {
  const Eigen::Index h = l.U.cols();
  const Eigen::Index n = inputs.cols();
  LstmTrace tr;
  for (Eigen::MatrixXd* m : {&tr.i, &tr.f, &tr.o, &tr.g, &tr.c, &tr.tanh_c, &tr.h}) m->resize(h, n);
  Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(h);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index t = reverse ? n - 1 - k : k;
    Eigen::VectorXd z = l.W * inputs.col(t) + l.U * h_prev + l.b.col(0);
    for (Eigen::Index j = 0; j < h; ++j) {
      tr.i(j, k) = sigmoid(z(j));
      tr.f(j, k) = sigmoid(z(h + j));
      tr.o(j, k) = sigmoid(z(2 * h + j));
      tr.g(j, k) = std::tanh(z(3 * h + j));
      tr.c(j, k) = tr.f(j, k) * c_prev(j) + tr.i(j, k) * tr.g(j, k);
      tr.tanh_c(j, k) = std::tanh(tr.c(j, k));
      tr.h(j, k) = tr.o(j, k) * tr.tanh_c(j, k);
    }
    h_prev = tr.h.col(k);
    c_prev = tr.c.col(k);
  }
  return tr;
}

// Backprop through one LSTM pass given dL/dh of its final state. Adds input
// gradients into dinputs (token order).
void backprop_lstm(const LstmParams& l, const LstmTrace& tr, const Eigen::MatrixXd& inputs, bool reverse,
                   const Eigen::VectorXd& dh_final, LstmParams& grad, Eigen::MatrixXd& dinputs) {
  const Eigen::Index h = l.U.cols();
  const Eigen::Index n = inputs.cols();
  Eigen::VectorXd dh = dh_final;
  Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd dz(4 * h);
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    const Eigen::Index t = reverse ? n - 1 - k : k;
    Eigen::VectorXd dc(h);
    for (Eigen::Index j = 0; j < h; ++j) {
      const double tc = tr.tanh_c(j, k);
      const double d_o = dh(j) * tc;
      dc(j) = dc_next(j) + dh(j) * tr.o(j, k) * (1.0 - tc * tc);
      const double c_prev = k > 0 ? tr.c(j, k - 1) : 0.0;
      const double d_i = dc(j) * tr.g(j, k);
      const double d_f = dc(j) * c_prev;
      const double d_g = dc(j) * tr.i(j, k);
      dz(j) = d_i * tr.i(j, k) * (1.0 - tr.i(j, k));
      dz(h + j) = d_f * tr.f(j, k) * (1.0 - tr.f(j, k));
      dz(2 * h + j) = d_o * tr.o(j, k) * (1.0 - tr.o(j, k));
      dz(3 * h + j) = d_g * (1.0 - tr.g(j, k) * tr.g(j, k));
      dc_next(j) = dc(j) * tr.f(j, k);
    }
    grad.W.noalias() += dz * inputs.col(t).transpose();
    if (k > 0) grad.U.noalias() += dz * tr.h.col(k - 1).transpose();
    grad.b.col(0) += dz;
    dinputs.col(t).noalias() += l.W.transpose() * dz;
    dh = l.U.transpose() * dz;
  }
}

}  // namespace

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double mx = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - mx).exp();
  return e / e.sum();
}

ForwardTrace forward(const ModelParams& params, const Dims& dims, const TokenFeatures& x) {
  if (x.size() == 0) throw InvalidArgument("forward: empty sentence");
  ForwardTrace tr;
  const int h = dims.d_rec;
  tr.inputs = input_features(params, dims, x);
  tr.fwd = run_lstm(params.fwd, tr.inputs, false);
  tr.bwd = run_lstm(params.bwd, tr.inputs, true);
  const Eigen::Index n = tr.inputs.cols();
  tr.r.resize(2 * h);
  tr.r.head(h) = tr.fwd.h.col(n - 1);
  tr.r.tail(h) = tr.bwd.h.col(n - 1);
  tr.p = tr.inputs.rowwise().sum() / static_cast<double>(n);
  Eigen::VectorXd u(2 * h + dims.input());
  u << tr.r, tr.p;
  tr.pre_hidden = params.hidden * u + params.hidden_bias.col(0);
  tr.hidden = tr.pre_hidden.cwiseMax(0.0);
  tr.logits = params.out * tr.hidden + params.out_bias.col(0);
  tr.probs = softmax(tr.logits);
  return tr;
}

double backward(const ModelParams& params, const Dims& dims, const TokenFeatures& x, SentimentLabel gold,
                ModelParams& grads) {
  ForwardTrace tr = forward(params, dims, x);
  const int h = dims.d_rec;
  const int g = label_code(gold);
  const double loss = -std::log(tr.probs(g));

  Eigen::VectorXd dlogits = tr.probs;
  dlogits(g) -= 1.0;
  grads.out.noalias() += dlogits * tr.hidden.transpose();
  grads.out_bias.col(0) += dlogits;

  Eigen::VectorXd dhid = params.out.transpose() * dlogits;
  for (Eigen::Index j = 0; j < dhid.size(); ++j) {
    if (tr.pre_hidden(j) <= 0.0) dhid(j) = 0.0;
  }
  Eigen::VectorXd u(2 * h + dims.input());
  u << tr.r, tr.p;
  grads.hidden.noalias() += dhid * u.transpose();
  grads.hidden_bias.col(0) += dhid;
  Eigen::VectorXd du = params.hidden.transpose() * dhid;

  const Eigen::Index n = tr.inputs.cols();
  Eigen::MatrixXd dinputs(tr.inputs.rows(), n);
  const Eigen::VectorXd dp = du.tail(dims.input()) / static_cast<double>(n);
  for (Eigen::Index t = 0; t < n; ++t) dinputs.col(t) = dp;

  backprop_lstm(params.fwd, tr.fwd, tr.inputs, false, du.head(h), grads.fwd, dinputs);
  backprop_lstm(params.bwd, tr.bwd, tr.inputs, true, du.segment(h, h), grads.bwd, dinputs);

  for (Eigen::Index t = 0; t < n; ++t) {
    grads.word_emb.row(x.word[t]) += dinputs.block(dims.d_ce, t, dims.d_e, 1).transpose();
    grads.cluster_emb.row(x.cluster[t]) += dinputs.block(dims.d_ce + dims.d_e, t, dims.d_cc, 1).transpose();
  }
  return loss;
}

double loss_and_grad(const ModelParams& params, const Dims& dims, const Batch& batch, ModelParams& grads) {
  if (batch.inputs.empty() || batch.inputs.size() != batch.labels.size()) {
    throw InvalidArgument("loss_and_grad: batch must be non-empty with one label per input");
  }
  double loss = 0.0;
  for (std::size_t k = 0; k < batch.inputs.size(); ++k) {
    loss += backward(params, dims, *batch.inputs[k], batch.labels[k], grads);
  }
  return loss;
}

AdamState AdamState::fresh(const ModelParams& params, AdamConfig config) {
  AdamState s;
  s.config = config;
  s.m = params.zeros_like();
  s.v = params.zeros_like();
  return s;
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state) {
  auto p = blocks(params);
  auto g = blocks(grads);
  auto m = blocks(state.m);
  auto v = blocks(state.v);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (g[k]->rows() != p[k]->rows() || g[k]->cols() != p[k]->cols() || m[k]->rows() != p[k]->rows() ||
        m[k]->cols() != p[k]->cols() || v[k]->rows() != p[k]->rows() || v[k]->cols() != p[k]->cols()) {
      throw InvalidArgument("adam_step: shape mismatch in parameter block " + std::to_string(k));
    }
  }
  const AdamConfig& c = state.config;
  ++state.t;
  const double corr1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
  const double corr2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));
  for (std::size_t k = 0; k < p.size(); ++k) {
    m[k]->array() = c.beta1 * m[k]->array() + (1.0 - c.beta1) * g[k]->array();
    v[k]->array() = c.beta2 * v[k]->array() + (1.0 - c.beta2) * g[k]->array().square();
    p[k]->array() -= c.lr * (m[k]->array() / corr1) / ((v[k]->array() / corr2).sqrt() + c.eps);
  }
}

SentimentLabel argmax_label(const std::array<double, kNumLabels>& d) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < kNumLabels; ++k) {
    if (d[k] > d[best]) best = k;
  }
  return label_from_code(static_cast<int>(best));
}

SentimentModel::Prediction SentimentModel::predict(const Sentence& sentence) const {
  if (sentence.tokens.empty()) throw InvalidArgument("predict: empty sentence");
  ForwardTrace tr = forward(params, features.dims, featurize(sentence, features));
  Prediction out{};
  for (std::size_t k = 0; k < kNumLabels; ++k) out.distribution[k] = tr.probs(static_cast<Eigen::Index>(k));
  out.label = argmax_label(out.distribution);
  return out;
}

SentimentModel build_model(const LabeledDataset& train_set, const Resources& res, std::uint64_t seed) {
  const Dims& dims = res.dims;
  if (!res.embeddings.words().empty() && res.embeddings.dim() != dims.d_ce) {
    throw InvalidArgument("embedding dimension " + std::to_string(res.embeddings.dim()) +
                          " does not match d_ce = " + std::to_string(dims.d_ce));
  }
  SentimentModel model;
  FeatureConfig& fc = model.features;
  fc.dims = dims;
  fc.dictionary = res.dictionary;
  fc.lexicon = res.lexicon;
  fc.clusters = res.clusters;
  fc.fixed_vocab = Vocabulary(res.embeddings.words());

  std::vector<std::string> words;
  std::set<std::string> seen;
  for (const auto& ex : train_set.examples) {
    for (const auto& tok : ex.sentence.tokens) {
      const std::string& key = fc.lookup_key(tok);
      if (seen.insert(key).second) words.push_back(key);
    }
  }
  fc.word_vocab = Vocabulary(std::move(words));

  model.params = make_params(dims, fc.fixed_vocab.rows(), fc.word_vocab.rows(),
                             static_cast<std::size_t>(res.clusters.num_clusters) + 1);
  if (!res.embeddings.words().empty()) {
    model.params.fixed_emb.bottomRows(res.embeddings.vectors().rows()) = res.embeddings.vectors();
  }
  Rng rng = Rng::substream(seed, "init");
  init_params(model.params, rng);
  return model;
}

double accuracy_on(const SentimentModel& model, const LabeledDataset& data) {
  if (data.empty()) throw InvalidArgument("accuracy_on: empty dataset");
  std::size_t hits = 0;
  for (const auto& ex : data.examples) {
    if (model.predict(ex.sentence).label == ex.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

void train_model(SentimentModel& model, const LabeledDataset& train_set, const LabeledDataset* dev_set,
                 const TrainConfig& config, TrainHistory* history) {
  if (train_set.empty()) throw InvalidArgument("train: empty training set");
  if (config.epochs < 0 || config.batch_size < 1) throw InvalidArgument("train: bad epochs/batch size");
  const Dims& dims = model.features.dims;

  std::vector<TokenFeatures> feats;
  feats.reserve(train_set.size());
  for (const auto& ex : train_set.examples) {
    if (ex.sentence.tokens.empty()) throw InvalidArgument("train: empty sentence in training set");
    feats.push_back(featurize(ex.sentence, model.features));
  }

  AdamState adam = AdamState::fresh(model.params, config.adam);
  ModelParams grads = model.params.zeros_like();
  auto grad_blocks = blocks(grads);
  Rng rng = Rng::substream(config.seed, "batching");
  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      Batch batch;
      for (std::size_t k = start; k < end; ++k) {
        batch.inputs.push_back(&feats[order[k]]);
        batch.labels.push_back(train_set.examples[order[k]].label);
      }
      for (auto* b : grad_blocks) b->setZero();
      epoch_loss += loss_and_grad(model.params, dims, batch, grads);
      if (config.clip_norm > 0.0) {
        double sq = 0.0;
        for (auto* b : grad_blocks) sq += b->squaredNorm();
        const double norm = std::sqrt(sq);
        if (norm > config.clip_norm) {
          for (auto* b : grad_blocks) *b *= config.clip_norm / norm;
        }
      }
      adam_step(model.params, grads, adam);
    }
    std::optional<double> dev_acc;
    if (dev_set && !dev_set->empty()) dev_acc = accuracy_on(model, *dev_set);
    if (history) {
      history->epoch_loss.push_back(epoch_loss);
      if (dev_acc) history->dev_accuracy.push_back(*dev_acc);
    }
    if (config.on_epoch) config.on_epoch(epoch, epoch_loss, dev_acc);
  }
}

SentimentModel train(const LabeledDataset& train_set, const LabeledDataset* dev_set, const Resources& resources,
                     const TrainConfig& config, TrainHistory* history) {
  if (train_set.empty()) throw InvalidArgument("train: empty training set");
  SentimentModel model = build_model(train_set, resources, config.seed);
  train_model(model, train_set, dev_set, config, history);
  return model;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr const char* kHeader = "XLSENT-NN v1";

void write_matrix(std::string& out, const std::string& name, const Eigen::MatrixXd& m) {
  out += "matrix " + name + " " + std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ' ';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
}

class LineReader {
 public:
  explicit LineReader(const std::string& text) : in_(text) {}

  std::string next() {
    std::string line;
    if (!std::getline(in_, line)) throw DataError("model file truncated after line " + std::to_string(n_));
    ++n_;
    return line;
  }

  std::vector<std::string> fields(std::size_t expected, const std::string& keyword) {
    auto f = split(next(), ' ');
    if (f.size() != expected || f[0] != keyword) {
      throw DataError("model file: expected '" + keyword + "' section at line " + std::to_string(n_));
    }
    return f;
  }

  Eigen::MatrixXd matrix(const std::string& name) {
    auto f = fields(4, "matrix");
    if (f[1] != name) throw DataError("model file: expected matrix " + name + " at line " + std::to_string(n_));
    const long long rows = parse_int(f[2]), cols = parse_int(f[3]);
    Eigen::MatrixXd m(rows, cols);
    for (long long r = 0; r < rows; ++r) {
      auto vals = split(next(), ' ');
      if (static_cast<long long>(vals.size()) != cols && cols > 0) {
        throw DataError("model file: wrong column count at line " + std::to_string(n_));
      }
      for (long long c = 0; c < cols; ++c) m(r, c) = parse_double(vals[static_cast<std::size_t>(c)]);
    }
    return m;
  }

  std::vector<std::string> word_list(const std::string& name) {
    auto f = fields(3, "vocab");
    if (f[1] != name) throw DataError("model file: expected vocab " + name);
    const long long n = parse_int(f[2]);
    std::vector<std::string> words;
    for (long long k = 0; k < n; ++k) words.push_back(next());
    return words;
  }

 private:
  std::istringstream in_;
  std::size_t n_ = 0;
};

}  // namespace

std::string SentimentModel::serialize() const {
  const FeatureConfig& fc = features;
  std::string out = std::string(kHeader) + "\n";
  out += "config d_ce " + std::to_string(fc.dims.d_ce) + "\n";
  out += "config d_e " + std::to_string(fc.dims.d_e) + "\n";
  out += "config d_cc " + std::to_string(fc.dims.d_cc) + "\n";
  out += "config d_rec " + std::to_string(fc.dims.d_rec) + "\n";
  out += "config d_h " + std::to_string(fc.dims.d_h) + "\n";
  out += "config lexicon_feature " + std::to_string(fc.dims.lexicon_feature ? 1 : 0) + "\n";

  auto vocab = [&](const std::string& name, const std::vector<std::string>& words) {
    out += "vocab " + name + " " + std::to_string(words.size()) + "\n";
    for (const auto& w : words) out += w + "\n";
  };
  vocab("fixed", fc.fixed_vocab.words());
  vocab("word", fc.word_vocab.words());

  out += "clusters " + std::to_string(fc.clusters.num_clusters) + " " +
         std::to_string(fc.clusters.assignment.size()) + "\n";
  for (const auto& [w, c] : fc.clusters.assignment) out += w + "\t" + std::to_string(c) + "\n";

  if (fc.dictionary) {
    out += "dictionary " + std::to_string(fc.dictionary->size()) + "\n";
    out += fc.dictionary->source_language() + "\t" + fc.dictionary->target_language() + "\n";
    for (const auto& [s, e] : fc.dictionary->entries()) {
      out += s + "\t" + e.target + "\t" + std::to_string(e.count) + "\n";
    }
  } else {
    out += "dictionary none\n";
  }
  if (fc.lexicon) {
    out += "lexicon " + std::to_string(fc.lexicon->entries.size()) + "\n";
    for (const auto& [w, p] : fc.lexicon->entries) {
      out += w + "\t" + format_double(p[0]) + "\t" + format_double(p[1]) + "\n";
    }
  } else {
    out += "lexicon none\n";
  }

  write_matrix(out, "fixed_emb", params.fixed_emb);
  params.for_each_trainable([&](const char* name, const Eigen::MatrixXd& m) { write_matrix(out, name, m); });
  return out;
}

SentimentModel SentimentModel::deserialize(const std::string& text) {
  LineReader in(text);
  if (in.next() != kHeader) throw DataError("not an XLSENT-NN v1 model file");
  SentimentModel model;
  FeatureConfig& fc = model.features;
  auto config_value = [&](const std::string& key) {
    auto f = in.fields(3, "config");
    if (f[1] != key) throw DataError("model file: expected config " + key);
    return static_cast<int>(parse_int(f[2]));
  };
  fc.dims.d_ce = config_value("d_ce");
  fc.dims.d_e = config_value("d_e");
  fc.dims.d_cc = config_value("d_cc");
  fc.dims.d_rec = config_value("d_rec");
  fc.dims.d_h = config_value("d_h");
  fc.dims.lexicon_feature = config_value("lexicon_feature") != 0;
  fc.fixed_vocab = Vocabulary(in.word_list("fixed"));
  fc.word_vocab = Vocabulary(in.word_list("word"));

  auto cl = in.fields(3, "clusters");
  fc.clusters.num_clusters = static_cast<int>(parse_int(cl[1]));
  for (long long k = parse_int(cl[2]); k > 0; --k) {
    auto cols = split(in.next(), '\t');
    if (cols.size() != 2) throw DataError("model file: bad cluster row");
    fc.clusters.assignment[cols[0]] = static_cast<int>(parse_int(cols[1]));
  }

  auto dict = split(in.next(), ' ');
  if (dict.size() != 2 || dict[0] != "dictionary") throw DataError("model file: expected dictionary section");
  if (dict[1] != "none") {
    auto langs = split(in.next(), '\t');
    if (langs.size() != 2) throw DataError("model file: bad dictionary languages");
    align::Dictionary d(langs[0], langs[1]);
    for (long long k = parse_int(dict[1]); k > 0; --k) {
      auto cols = split(in.next(), '\t');
      if (cols.size() != 3) throw DataError("model file: bad dictionary row");
      d.offer(cols[0], cols[1], parse_int(cols[2]));
    }
    fc.dictionary = std::move(d);
  }
  auto lex = split(in.next(), ' ');
  if (lex.size() != 2 || lex[0] != "lexicon") throw DataError("model file: expected lexicon section");
  if (lex[1] != "none") {
    lexicon::WordLexicon wl;
    for (long long k = parse_int(lex[1]); k > 0; --k) {
      auto cols = split(in.next(), '\t');
      if (cols.size() != 3) throw DataError("model file: bad lexicon row");
      wl.entries[cols[0]] = {parse_double(cols[1]), parse_double(cols[2])};
    }
    fc.lexicon = std::move(wl);
  }

  model.params.fixed_emb = in.matrix("fixed_emb");
  model.params.for_each_trainable([&](const char* name, Eigen::MatrixXd& m) { m = in.matrix(name); });

  ModelParams expect = make_params(fc.dims, fc.fixed_vocab.rows(), fc.word_vocab.rows(),
                                   static_cast<std::size_t>(fc.clusters.num_clusters) + 1);
  auto got = blocks(model.params);
  auto want = blocks(expect);
  for (std::size_t k = 0; k < got.size(); ++k) {
    if (got[k]->rows() != want[k]->rows() || got[k]->cols() != want[k]->cols()) {
      throw DataError("model file: parameter block " + std::to_string(k) + " has the wrong shape");
    }
  }
  if (model.params.fixed_emb.rows() != expect.fixed_emb.rows() ||
      model.params.fixed_emb.cols() != expect.fixed_emb.cols()) {
    throw DataError("model file: fixed embedding matrix has the wrong shape");
  }
  return model;
}

void SentimentModel::save(const std::filesystem::path& path) const { write_text(path, serialize()); }

SentimentModel SentimentModel::load(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  try {
    return deserialize(text);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace xlsent::nn
