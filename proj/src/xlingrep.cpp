#include "xlsent/xlingrep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace xlsent::xling {

EmbeddingTable::EmbeddingTable(std::vector<std::string> words, Eigen::MatrixXd vectors)
    : dim_(static_cast<int>(vectors.cols())), words_(std::move(words)), vectors_(std::move(vectors)) {
  if (static_cast<std::size_t>(vectors_.rows()) != words_.size()) {
    throw InvalidArgument("EmbeddingTable: row count does not match vocabulary size");
  }
  if (dim_ < 1) throw InvalidArgument("EmbeddingTable: dimension must be >= 1");
  if (!vectors_.allFinite()) throw InvalidArgument("EmbeddingTable: non-finite entries");
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) {
      throw InvalidArgument("EmbeddingTable: duplicate word '" + words_[i] + "'");
    }
  }
}

std::optional<std::size_t> EmbeddingTable::index(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Eigen::VectorXd EmbeddingTable::vector(const std::string& word) const {
  auto i = index(word);
  if (!i) throw InvalidArgument("word not in embedding table: " + word);
  return vectors_.row(static_cast<Eigen::Index>(*i)).transpose();
}

void EmbeddingTable::save(const std::filesystem::path& path) const {
  std::string out = std::to_string(words_.size()) + " " + std::to_string(dim_) + "\n";
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out += words_[i];
    for (int d = 0; d < dim_; ++d) {
      out += ' ';
      out += format_double(vectors_(static_cast<Eigen::Index>(i), d));
    }
    out += '\n';
  }
  write_text(path, out);
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  auto fail = [&](const std::string& msg) { return DataError(path.string() + ": " + msg); };
  if (lines.empty()) throw fail("empty embedding file");
  std::istringstream head(lines[0]);
  long long n = -1, dim = -1;
  head >> n >> dim;
  if (!head || n < 0 || dim < 1) throw fail("bad header, expected '|V| d'");
  std::vector<std::string> words;
  Eigen::MatrixXd vecs(n, dim);
  std::size_t row = 0;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    std::string_view line = trim(lines[li]);
    if (line.empty()) continue;
    if (row >= static_cast<std::size_t>(n)) throw fail("more rows than the header declares");
    std::istringstream in{std::string(line)};
    std::string word, tok;
    in >> word;
    long long d = 0;
    while (in >> tok) {
      if (d >= dim) throw fail("too many values at line " + std::to_string(li + 1));
      vecs(static_cast<Eigen::Index>(row), d++) = parse_double(tok);
    }
    if (d != dim) throw fail("too few values at line " + std::to_string(li + 1));
    words.push_back(word);
    ++row;
  }
  if (row != static_cast<std::size_t>(n)) throw fail("fewer rows than the header declares");
  try {
    return EmbeddingTable(std::move(words), std::move(vecs));
  } catch (const InvalidArgument& e) {
    throw fail(e.what());
  }
}

std::optional<int> ClusterMap::cluster(const std::string& word) const {
  auto it = assignment.find(word);
  if (it == assignment.end()) return std::nullopt;
  return it->second;
}

void ClusterMap::save(const std::filesystem::path& path) const {
  std::string out = "#clusters\t" + std::to_string(num_clusters) + "\n";
  for (const auto& [w, c] : assignment) out += w + '\t' + std::to_string(c) + '\n';
  write_text(path, out);
}

ClusterMap ClusterMap::load(const std::filesystem::path& path) {
  ClusterMap m;
  auto lines = read_lines(path);
  int max_id = -1;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    auto cols = split(lines[i], '\t');
    if (cols.size() != 2) {
      throw DataError(path.string() + ": expected word<TAB>cluster_id at line " + std::to_string(i + 1));
    }
    if (cols[0] == "#clusters") {
      m.num_clusters = static_cast<int>(parse_int(cols[1]));
      continue;
    }
    long long id = parse_int(trim(cols[1]));
    if (id < 0) throw DataError(path.string() + ": negative cluster id at line " + std::to_string(i + 1));
    m.assignment[cols[0]] = static_cast<int>(id);
    max_id = std::max(max_id, static_cast<int>(id));
  }
  if (m.num_clusters == 0) m.num_clusters = max_id + 1;
  if (max_id >= m.num_clusters) throw DataError(path.string() + ": cluster id out of range");
  return m;
}

std::vector<std::vector<std::string>> code_switch(const std::vector<MonolingualCorpus>& corpora,
                                                  const std::vector<align::Dictionary>& dictionaries,
                                                  const CodeSwitchConfig& config,
                                                  CodeSwitchStats* stats) {
  if (!(config.rate >= 0.0 && config.rate <= 1.0)) {
    throw InvalidArgument("code_switch: rate must lie in [0, 1]");
  }
  Rng rng(config.seed);
  CodeSwitchStats local;
  std::vector<std::vector<std::string>> out;
  std::vector<const std::string*> options;

  for (const auto& corpus : corpora) {
    std::vector<const align::Dictionary*> dicts;
    for (const auto& d : dictionaries) {
      if (d.source_language() != corpus.language || d.target_language() == corpus.language) continue;
      if (config.fixed_target && d.target_language() != *config.fixed_target) continue;
      dicts.push_back(&d);
    }
    for (const auto& sentence : corpus.sentences) {
      std::vector<std::string> switched = sentence;
      for (auto& tok : switched) {
        ++local.tokens;
        // One draw per position keeps the stream independent of dictionary coverage.
        if (rng.uniform() >= config.rate) continue;
        ++local.selected;
        options.clear();
        for (const auto* d : dicts) {
          if (const std::string* t = d->translate(tok)) options.push_back(t);
        }
        if (options.empty()) continue;
        tok = *options[rng.below(options.size())];
        ++local.swapped;
      }
      out.push_back(std::move(switched));
    }
  }
  if (stats) *stats = local;
  return out;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

EmbeddingTable train_sgns(const std::vector<std::vector<std::string>>& corpus, const SgnsConfig& config) {
  if (config.dim < 1) throw InvalidArgument("train_sgns: dim must be >= 1");
  if (config.window < 1 || config.negatives < 0 || config.epochs < 1) {
    throw InvalidArgument("train_sgns: window >= 1, negatives >= 0, epochs >= 1 required");
  }
  std::map<std::string, long long> freq;
  for (const auto& s : corpus) {
    for (const auto& w : s) ++freq[w];
  }
  if (freq.empty()) throw InvalidArgument("train_sgns: empty corpus");

  // Vocabulary sorted by descending count, then by word.
  std::vector<std::pair<std::string, long long>> vocab;
  for (const auto& [w, c] : freq) {
    if (c >= config.min_count) vocab.emplace_back(w, c);
  }
  if (vocab.empty()) throw InvalidArgument("train_sgns: no word reaches min_count");
  std::stable_sort(vocab.begin(), vocab.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::unordered_map<std::string, int> id;
  for (std::size_t i = 0; i < vocab.size(); ++i) id.emplace(vocab[i].first, static_cast<int>(i));
  const int V = static_cast<int>(vocab.size());
  const int D = config.dim;

  std::vector<std::vector<int>> sents;
  long long total = 0;
  for (const auto& s : corpus) {
    std::vector<int> ids;
    for (const auto& w : s) {
      auto it = id.find(w);
      if (it != id.end()) ids.push_back(it->second);
    }
    total += static_cast<long long>(ids.size());
    if (!ids.empty()) sents.push_back(std::move(ids));
  }

  std::vector<double> noise_cdf(V);
  double acc = 0.0;
  for (int i = 0; i < V; ++i) {
    acc += std::pow(static_cast<double>(vocab[i].second), 0.75);
    noise_cdf[i] = acc;
  }
  for (double& x : noise_cdf) x /= acc;

  Rng rng = Rng::substream(config.seed, "sgns");
  Eigen::MatrixXd syn0(V, D);
  for (int i = 0; i < V; ++i) {
    for (int d = 0; d < D; ++d) syn0(i, d) = (rng.uniform() - 0.5) / D;
  }
  Eigen::MatrixXd syn1 = Eigen::MatrixXd::Zero(V, D);
  Eigen::VectorXd grad_in(D);

  const double budget = static_cast<double>(config.epochs) * static_cast<double>(total) + 1.0;
  long long processed = 0;
  std::vector<int> kept;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& sent : sents) {
      kept.clear();
      for (int w : sent) {
        ++processed;
        if (config.sample > 0.0) {
          double f = static_cast<double>(vocab[w].second);
          double thr = config.sample * static_cast<double>(total);
          double keep = (std::sqrt(f / thr) + 1.0) * thr / f;
          if (keep < rng.uniform()) continue;
        }
        kept.push_back(w);
      }
      double alpha = config.learning_rate * (1.0 - static_cast<double>(processed) / budget);
      alpha = std::max(alpha, config.learning_rate * 1e-4);

      const int n = static_cast<int>(kept.size());
      for (int pos = 0; pos < n; ++pos) {
        const int center = kept[pos];
        const int reduce = static_cast<int>(rng.below(static_cast<std::uint64_t>(config.window)));
        const int span = config.window - reduce;
        for (int off = -span; off <= span; ++off) {
          if (off == 0) continue;
          const int cpos = pos + off;
          if (cpos < 0 || cpos >= n) continue;
          const int context = kept[cpos];
          grad_in.setZero();
          for (int k = 0; k <= config.negatives; ++k) {
            int target;
            double label;
            if (k == 0) {
              target = center;
              label = 1.0;
            } else {
              double u = rng.uniform();
              target = static_cast<int>(std::upper_bound(noise_cdf.begin(), noise_cdf.end(), u) -
                                        noise_cdf.begin());
              target = std::min(target, V - 1);
              if (target == center) continue;
              label = 0.0;
            }
            const double score = syn0.row(context).dot(syn1.row(target));
            const double g = (label - sigmoid(score)) * alpha;
            grad_in += g * syn1.row(target).transpose();
            syn1.row(target) += g * syn0.row(context);
          }
          syn0.row(context) += grad_in.transpose();
        }
      }
    }
  }

  std::vector<std::string> words;
  words.reserve(V);
  for (const auto& [w, c] : vocab) words.push_back(w);
  return EmbeddingTable(std::move(words), std::move(syn0));
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

KMeansResult kmeans(const EmbeddingTable& emb, int k, std::uint64_t seed, int max_iter) {
  const Eigen::MatrixXd& X = emb.vectors();
  const Eigen::Index n = X.rows();
  if (k < 1) throw InvalidArgument("kmeans: K must be >= 1");
  if (k > n) {
    throw InvalidArgument("kmeans: K = " + std::to_string(k) + " exceeds vocabulary size " +
                          std::to_string(n));
  }
  Rng rng = Rng::substream(seed, "kmeans");

  // k-means++ seeding.
  std::vector<Eigen::Index> chosen;
  std::vector<bool> is_center(n, false);
  Eigen::VectorXd d2 = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  Eigen::MatrixXd centers(k, X.cols());
  Eigen::Index first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
  for (int c = 0; c < k; ++c) {
    Eigen::Index pick = first;
    if (c > 0) {
      double total = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!is_center[i]) total += d2(i);
      }
      if (total > 0.0) {
        double u = rng.uniform() * total;
        pick = -1;
        double run = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (is_center[i] || d2(i) == 0.0) continue;
          run += d2(i);
          pick = i;
          if (u < run) break;
        }
      } else {
        // All remaining points coincide with a center; take one uniformly.
        std::vector<Eigen::Index> rest;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (!is_center[i]) rest.push_back(i);
        }
        pick = rest[rng.below(rest.size())];
      }
    }
    is_center[pick] = true;
    centers.row(c) = X.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) d2(i) = std::min(d2(i), (X.row(i) - centers.row(c)).squaredNorm());
  }

  KMeansResult result;
  std::vector<int> assign(n, -1);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    double objective = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (X.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        double d = (X.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) changed = true;
      assign[i] = best;
      objective += best_d;
    }
    result.objective.push_back(objective);
    result.iterations = it + 1;
    if (!changed) break;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, X.cols());
    std::vector<long long> sizes(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[i]) += X.row(i);
      ++sizes[assign[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (sizes[c] > 0) centers.row(c) = sums.row(c) / static_cast<double>(sizes[c]);
    }
  }

  result.clusters.num_clusters = k;
  for (Eigen::Index i = 0; i < n; ++i) {
    result.clusters.assignment[emb.words()[static_cast<std::size_t>(i)]] = assign[i];
  }
  return result;
}

}  // namespace xlsent::xling
