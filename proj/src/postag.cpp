#include "xlsent/postag.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace xlsent::postag {

namespace {

// Byte offsets of code point starts in a UTF-8 string, plus the end offset.
std::vector<std::size_t> code_point_offsets(const std::string& s) {
  std::vector<std::size_t> off;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) off.push_back(i);
  }
  off.push_back(s.size());
  return off;
}

std::string lower_ascii(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  }
  return s;
}

std::string word_shape(const std::string& w) {
  std::string shape;
  for (unsigned char c : w) {
    char k;
    if (c >= 'A' && c <= 'Z') {
      k = 'X';
    } else if (c >= 'a' && c <= 'z') {
      k = 'x';
    } else if (c >= '0' && c <= '9') {
      k = 'd';
    } else if (c >= 0x80) {
      k = 'u';
    } else {
      k = static_cast<char>(c);
    }
    if (shape.empty() || shape.back() != k) shape.push_back(k);
  }
  return shape;
}

}  // namespace

std::vector<std::string> tagger_features(const std::vector<std::string>& tokens, std::size_t i,
                                         const std::string& prev, const std::string& prev2) {
  const std::string& w = tokens[i];
  std::vector<std::string> f;
  f.reserve(12);
  f.emplace_back("bias");
  f.push_back("w=" + w);
  f.push_back("lw=" + lower_ascii(w));
  auto off = code_point_offsets(w);
  const std::size_t n_cp = off.size() - 1;
  for (std::size_t k = 1; k <= 3 && k <= n_cp; ++k) {
    f.push_back("pre" + std::to_string(k) + "=" + w.substr(0, off[k]));
    f.push_back("suf" + std::to_string(k) + "=" + w.substr(off[n_cp - k]));
  }
  f.push_back("t1=" + prev);
  f.push_back("t2=" + prev2 + "|" + prev);
  f.push_back("shape=" + word_shape(w));
  return f;
}

TaggerModel::TaggerModel(std::vector<std::string> tagset) : tags_(std::move(tagset)) {
  std::sort(tags_.begin(), tags_.end());
  tags_.erase(std::unique(tags_.begin(), tags_.end()), tags_.end());
  if (tags_.empty()) throw InvalidArgument("TaggerModel: empty tagset");
}

int TaggerModel::predict(const std::vector<std::string>& features) const {
  std::vector<double> scores(tags_.size(), 0.0);
  for (const auto& f : features) {
    auto it = weights_.find(f);
    if (it == weights_.end()) continue;
    for (std::size_t t = 0; t < scores.size(); ++t) scores[t] += it->second[t];
  }
  int best = 0;
  for (std::size_t t = 1; t < scores.size(); ++t) {
    if (scores[t] > scores[best]) best = static_cast<int>(t);
  }
  return best;
}

std::vector<std::string> TaggerModel::tag(const std::vector<std::string>& tokens) const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  std::string prev = kBos, prev2 = kBos;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    int t = predict(tagger_features(tokens, i, prev, prev2));
    out.push_back(tags_[t]);
    prev2 = prev;
    prev = tags_[t];
  }
  return out;
}

void TaggerModel::save(const std::filesystem::path& path) const {
  std::map<std::string, const std::vector<double>*> sorted;
  for (const auto& [f, w] : weights_) sorted.emplace(f, &w);
  std::string out;
  // Bias rows are always written so the tagset survives a round trip.
  auto bias = weights_.find("bias");
  for (std::size_t t = 0; t < tags_.size(); ++t) {
    double w = bias == weights_.end() ? 0.0 : bias->second[t];
    out += "bias\t" + tags_[t] + '\t' + format_double(w) + '\n';
  }
  for (const auto& [f, w] : sorted) {
    if (f == "bias") continue;
    for (std::size_t t = 0; t < tags_.size(); ++t) {
      if ((*w)[t] != 0.0) out += f + '\t' + tags_[t] + '\t' + format_double((*w)[t]) + '\n';
    }
  }
  write_text(path, out);
}

TaggerModel TaggerModel::load(const std::filesystem::path& path) {
  struct Row {
    std::string feature, tag;
    double weight;
  };
  std::vector<Row> rows;
  std::set<std::string> tags;
  auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    auto cols = split(lines[i], '\t');
    if (cols.size() != 3) {
      throw DataError(path.string() + ": expected feature<TAB>tag<TAB>weight at line " +
                      std::to_string(i + 1));
    }
    rows.push_back({cols[0], cols[1], parse_double(cols[2])});
    tags.insert(cols[1]);
  }
  if (tags.empty()) throw DataError(path.string() + ": empty tagger model");
  TaggerModel m(std::vector<std::string>(tags.begin(), tags.end()));
  std::map<std::string, int> tag_id;
  for (std::size_t t = 0; t < m.tags_.size(); ++t) tag_id[m.tags_[t]] = static_cast<int>(t);
  for (const auto& r : rows) {
    auto& w = m.weights_[r.feature];
    if (w.empty()) w.assign(m.tags_.size(), 0.0);
    w[tag_id[r.tag]] = r.weight;
  }
  return m;
}

class PerceptronTrainer {
 public:
  explicit PerceptronTrainer(TaggerModel& model) : model_(model) {}

  int predict(const std::vector<std::string>& features) const { return model_.predict(features); }

  void update(int truth, int guess, const std::vector<std::string>& features) {
    ++instances_;
    if (truth == guess) return;
    const std::size_t T = model_.tags_.size();
    for (const auto& f : features) {
      auto& w = model_.weights_[f];
      if (w.empty()) w.assign(T, 0.0);
      auto& acc = totals_[f];
      if (acc.empty()) {
        acc.assign(T, 0.0);
        stamps_[f].assign(T, 0);
      }
      auto& ts = stamps_[f];
      for (int t : {truth, guess}) {
        acc[t] += static_cast<double>(instances_ - ts[t]) * w[t];
        ts[t] = instances_;
      }
      w[truth] += 1.0;
      w[guess] -= 1.0;
    }
  }

  void average() {
    const double n = static_cast<double>(std::max<long long>(instances_, 1));
    for (auto& [f, w] : model_.weights_) {
      auto& acc = totals_[f];
      auto& ts = stamps_[f];
      for (std::size_t t = 0; t < w.size(); ++t) {
        double total = acc[t] + static_cast<double>(instances_ - ts[t]) * w[t];
        w[t] = total / n;
      }
    }
  }

 private:
  TaggerModel& model_;
  long long instances_ = 0;
  std::unordered_map<std::string, std::vector<double>> totals_;
  std::unordered_map<std::string, std::vector<long long>> stamps_;
};

TaggerModel train_tagger(const TaggedCorpus& corpus, const TaggerOptions& options) {
  if (corpus.sentences.empty()) throw InvalidArgument("train_tagger: empty corpus");
  if (options.epochs < 1) throw InvalidArgument("train_tagger: epochs must be >= 1");
  std::set<std::string> tagset(corpus.tagset.begin(), corpus.tagset.end());
  for (const auto& s : corpus.sentences) {
    if (s.tags.size() != s.tokens.size()) throw InvalidArgument("train_tagger: tag/token count mismatch");
    tagset.insert(s.tags.begin(), s.tags.end());
  }
  TaggerModel model(std::vector<std::string>(tagset.begin(), tagset.end()));
  std::map<std::string, int> tag_id;
  for (std::size_t t = 0; t < model.tagset().size(); ++t) tag_id[model.tagset()[t]] = static_cast<int>(t);

  PerceptronTrainer trainer(model);
  std::vector<std::size_t> order(corpus.sentences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = Rng::substream(options.seed, "tagger");
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      const auto& s = corpus.sentences[idx];
      std::string prev = kBos, prev2 = kBos;
      for (std::size_t i = 0; i < s.tokens.size(); ++i) {
        auto feats = tagger_features(s.tokens, i, prev, prev2);
        int guess = trainer.predict(feats);
        trainer.update(tag_id[s.tags[i]], guess, feats);
        prev2 = prev;
        prev = model.tagset()[guess];
      }
    }
  }
  trainer.average();
  return model;
}

double TrigramDist::prob(const std::string& a, const std::string& b, const std::string& c) const {
  auto idx = [&](const std::string& t) -> std::size_t {
    auto it = std::find(tags.begin(), tags.end(), t);
    if (it == tags.end()) throw InvalidArgument("unknown tag: " + t);
    return static_cast<std::size_t>(it - tags.begin());
  };
  const std::size_t E = tags.size();
  return probs[(idx(a) * E + idx(b)) * E + idx(c)];
}

TrigramDist trigram_distribution(const std::vector<std::vector<std::string>>& tag_sequences, double alpha) {
  std::set<std::string> tagset;
  for (const auto& seq : tag_sequences) tagset.insert(seq.begin(), seq.end());
  return trigram_distribution(tag_sequences, std::vector<std::string>(tagset.begin(), tagset.end()), alpha);
}

TrigramDist trigram_distribution(const std::vector<std::vector<std::string>>& tag_sequences,
                                 const std::vector<std::string>& tagset, double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("trigram_distribution: alpha must be > 0");
  if (tag_sequences.empty()) throw InvalidArgument("trigram_distribution: empty input");
  TrigramDist dist;
  dist.alpha = alpha;
  std::set<std::string> real(tagset.begin(), tagset.end());
  real.erase(kBos);
  real.erase(kEos);
  dist.tags.assign(real.begin(), real.end());
  dist.tags.push_back(kBos);
  dist.tags.push_back(kEos);
  std::map<std::string, std::size_t> id;
  for (std::size_t i = 0; i < dist.tags.size(); ++i) id[dist.tags[i]] = i;
  const std::size_t E = dist.tags.size();

  std::vector<double> counts(E * E * E, 0.0);
  double n = 0.0;
  for (const auto& seq : tag_sequences) {
    if (seq.empty()) continue;
    std::vector<std::size_t> ids{id[kBos], id[kBos]};
    for (const auto& t : seq) {
      auto it = id.find(t);
      if (it == id.end() || t == kBos || t == kEos) {
        throw InvalidArgument("trigram_distribution: tag '" + t + "' outside the tagset");
      }
      ids.push_back(it->second);
    }
    ids.push_back(id[kEos]);
    for (std::size_t k = 2; k < ids.size(); ++k) {
      counts[(ids[k - 2] * E + ids[k - 1]) * E + ids[k]] += 1.0;
      n += 1.0;
    }
  }
  if (n == 0.0) throw InvalidArgument("trigram_distribution: no non-empty sequences");
  const double denom = n + alpha * static_cast<double>(counts.size());
  dist.probs.resize(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) dist.probs[k] = (counts[k] + alpha) / denom;
  return dist;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size() || p.empty()) throw InvalidArgument("kl: mismatched supports");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (!(q[i] > 0.0)) throw InvalidArgument("kl: q has zero mass where p does not");
    sum += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(sum, 0.0);
}

double kl(const TrigramDist& p, const TrigramDist& q) {
  if (p.tags != q.tags) throw InvalidArgument("kl: distributions use different tagsets");
  return kl_divergence(p.probs, q.probs);
}

double kl_between(const TrigramDist& target, const TrigramDist& source, KlDirection direction) {
  return direction == KlDirection::target_to_source ? kl(target, source) : kl(source, target);
}

}  // namespace xlsent::postag
