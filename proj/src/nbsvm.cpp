#include "xlsent/nbsvm.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace xlsent::nbsvm {

namespace {
constexpr const char* kBiasFeature = "<bias>";
}

std::vector<std::string> feature_strings(const std::vector<std::string>& tokens, bool bigrams) {
  std::vector<std::string> out(tokens.begin(), tokens.end());
  if (bigrams) {
    for (std::size_t i = 1; i < tokens.size(); ++i) out.push_back(tokens[i - 1] + "_" + tokens[i]);
  }
  return out;
}

std::vector<int> NbSvmModel::features(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  for (const auto& f : feature_strings(tokens, bigrams)) {
    auto it = index.find(f);
    if (it != index.end()) ids.push_back(it->second);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::array<double, kNumLabels> NbSvmModel::scores(const std::vector<std::string>& tokens) const {
  std::array<double, kNumLabels> s = bias;
  for (int f : features(tokens)) {
    for (std::size_t c = 0; c < kNumLabels; ++c) s[c] += weights[c][f] * ratios[c][f];
  }
  return s;
}

std::vector<double> log_count_ratio(const std::vector<double>& in_class, const std::vector<double>& out_class,
                                    double alpha) {
  if (in_class.size() != out_class.size()) throw InvalidArgument("log_count_ratio: size mismatch");
  if (!(alpha > 0.0)) throw InvalidArgument("log_count_ratio: alpha must be > 0");
  double p_norm = 0.0, q_norm = 0.0;
  for (std::size_t i = 0; i < in_class.size(); ++i) {
    p_norm += in_class[i] + alpha;
    q_norm += out_class[i] + alpha;
  }
  std::vector<double> r(in_class.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = std::log(((in_class[i] + alpha) / p_norm) / ((out_class[i] + alpha) / q_norm));
  }
  return r;
}

NbSvmModel train_nbsvm(const LabeledDataset& train, const NbSvmConfig& config) {
  std::set<SentimentLabel> present;
  for (const auto& ex : train.examples) present.insert(ex.label);
  if (present.size() < 2) throw InvalidArgument("train_nbsvm: need at least two distinct labels");
  if (config.epochs < 1) throw InvalidArgument("train_nbsvm: epochs must be >= 1");

  NbSvmModel model;
  model.bigrams = config.bigrams;
  std::set<std::string> vocab;
  for (const auto& ex : train.examples) {
    for (auto& f : feature_strings(ex.sentence.tokens, config.bigrams)) vocab.insert(std::move(f));
  }
  model.vocabulary.assign(vocab.begin(), vocab.end());
  for (std::size_t i = 0; i < model.vocabulary.size(); ++i) model.index[model.vocabulary[i]] = static_cast<int>(i);
  const std::size_t V = model.vocabulary.size();

  std::vector<std::vector<int>> xs;
  std::array<std::vector<double>, kNumLabels> counts;
  for (auto& c : counts) c.assign(V, 0.0);
  std::vector<double> all(V, 0.0);
  for (const auto& ex : train.examples) {
    xs.push_back(model.features(ex.sentence.tokens));
    for (int f : xs.back()) {
      counts[label_code(ex.label)][f] += 1.0;
      all[f] += 1.0;
    }
  }
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    std::vector<double> rest(V);
    for (std::size_t f = 0; f < V; ++f) rest[f] = all[f] - counts[c][f];
    model.ratios[c] = log_count_ratio(counts[c], rest, config.alpha);
    model.weights[c].assign(V, 0.0);
  }

  // SGD on the logistic loss, one binary problem per label.
  Rng rng = Rng::substream(config.seed, "nbsvm");
  std::vector<std::size_t> order(xs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      const auto& x = xs[idx];
      const int gold = label_code(train.examples[idx].label);
      for (std::size_t c = 0; c < kNumLabels; ++c) {
        double z = model.bias[c];
        for (int f : x) z += model.weights[c][f] * model.ratios[c][f];
        const double y = static_cast<int>(c) == gold ? 1.0 : 0.0;
        const double err = 1.0 / (1.0 + std::exp(-z)) - y;
        for (int f : x) {
          double& w = model.weights[c][f];
          w -= config.lr * (err * model.ratios[c][f] + config.l2 * w);
        }
        model.bias[c] -= config.lr * err;
      }
    }
  }
  return model;
}

NbSvmPrediction predict_nbsvm(const NbSvmModel& model, const std::vector<std::string>& tokens) {
  NbSvmPrediction p;
  p.scores = model.scores(tokens);
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumLabels; ++c) {
    if (p.scores[c] > p.scores[best]) best = c;
  }
  p.label = label_from_code(static_cast<int>(best));
  return p;
}

void NbSvmModel::save(const std::filesystem::path& path) const {
  std::string out = bigrams ? "#bigrams\t1\t0\n" : "";
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    const std::string label(label_name(label_from_code(static_cast<int>(c))));
    out += label + '\t' + kBiasFeature + '\t' + format_double(bias[c]) + '\n';
    for (std::size_t f = 0; f < vocabulary.size(); ++f) {
      const double w = weights[c][f] * ratios[c][f];
      if (w != 0.0) out += label + '\t' + vocabulary[f] + '\t' + format_double(w) + '\n';
    }
  }
  write_text(path, out);
}

NbSvmModel NbSvmModel::load(const std::filesystem::path& path) {
  NbSvmModel m;
  std::map<std::string, std::array<double, kNumLabels>> rows;
  auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    auto cols = split(lines[i], '\t');
    const std::string where = path.string() + ": line " + std::to_string(i + 1);
    if (cols.size() != 3) throw DataError(where + ": expected label<TAB>feature<TAB>weight");
    if (cols[0] == "#bigrams") {
      m.bigrams = cols[1] == "1";
      continue;
    }
    auto label = parse_label(cols[0]);
    if (!label) throw DataError(where + ": unknown label");
    const double w = parse_double(cols[2]);
    if (cols[1] == kBiasFeature) {
      m.bias[label_code(*label)] = w;
    } else {
      auto& row = rows[cols[1]];
      row[label_code(*label)] = w;
    }
  }
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    m.weights[c].reserve(rows.size());
    m.ratios[c].assign(rows.size(), 1.0);
  }
  for (const auto& [f, w] : rows) {
    m.index[f] = static_cast<int>(m.vocabulary.size());
    m.vocabulary.push_back(f);
    for (std::size_t c = 0; c < kNumLabels; ++c) m.weights[c].push_back(w[c]);
  }
  return m;
}

}  // namespace xlsent::nbsvm
