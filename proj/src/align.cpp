#include "xlsent/align.hpp"

#include <cmath>
#include <thread>
#include <unordered_map>

namespace xlsent::align {

double TranslationTable::prob(const std::string& src, const std::string& tgt) const {
  auto r = rows_.find(src);
  if (r == rows_.end()) return 0.0;
  auto c = r->second.find(tgt);
  return c == r->second.end() ? 0.0 : c->second;
}

void TranslationTable::set(const std::string& src, const std::string& tgt, double p) {
  rows_[src][tgt] = p;
}

double TranslationTable::max_row_deviation() const {
  double worst = 0.0;
  for (const auto& [src, row] : rows_) {
    double sum = 0.0;
    for (const auto& [tgt, p] : row) sum += p;
    worst = std::max(worst, std::abs(1.0 - sum));
  }
  return worst;
}

void TranslationTable::save(const std::filesystem::path& path) const {
  std::string out;
  for (const auto& [src, row] : rows_) {
    for (const auto& [tgt, p] : row) {
      out += src + '\t' + tgt + '\t' + format_double(p) + '\n';
    }
  }
  write_text(path, out);
}

TranslationTable TranslationTable::load(const std::filesystem::path& path, std::string src_lang,
                                        std::string tgt_lang) {
  TranslationTable table(std::move(src_lang), std::move(tgt_lang));
  auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    auto cols = split(lines[i], '\t');
    if (cols.size() != 3) {
      throw DataError(path.string() + ": expected src<TAB>tgt<TAB>prob at line " +
                      std::to_string(i + 1));
    }
    table.set(cols[0], cols[1], parse_double(cols[2]));
  }
  return table;
}

Bitext Bitext::from(const ParallelCorpus& corpus, std::size_t src_col, std::size_t tgt_col) {
  if (src_col >= corpus.languages.size() || tgt_col >= corpus.languages.size()) {
    throw InvalidArgument("Bitext::from: column out of range");
  }
  Bitext b;
  b.src_lang = corpus.languages[src_col];
  b.tgt_lang = corpus.languages[tgt_col];
  b.pairs.reserve(corpus.rows.size());
  for (const auto& row : corpus.rows) {
    b.pairs.emplace_back(&row[src_col].tokens, &row[tgt_col].tokens);
  }
  return b;
}

Bitext Bitext::reversed() const {
  Bitext b;
  b.src_lang = tgt_lang;
  b.tgt_lang = src_lang;
  b.pairs.reserve(pairs.size());
  for (const auto& [s, t] : pairs) b.pairs.emplace_back(t, s);
  return b;
}

namespace {

// Integer-indexed EM state. Source id 0 is NULL. Every (source, target)
// co-occurrence owns one slot; each sentence pair caches its slot grid.
struct Ibm1State {
  std::vector<std::string> src_words{kNullToken};
  std::vector<std::string> tgt_words;
  std::vector<int> slot_src;
  std::vector<int> slot_tgt;
  std::vector<double> prob;
  // Per pair: (l+1) x m slot indexes, row-major over source positions.
  std::vector<std::vector<int>> grids;
  std::vector<std::size_t> tgt_len;
};

Ibm1State build_state(const Bitext& bitext) {
  Ibm1State st;
  std::unordered_map<std::string, int> src_id{{kNullToken, 0}};
  std::unordered_map<std::string, int> tgt_id;
  std::unordered_map<std::uint64_t, int> slot_of;
  auto intern = [](std::unordered_map<std::string, int>& ids, std::vector<std::string>& words,
                   const std::string& w) {
    auto [it, inserted] = ids.emplace(w, static_cast<int>(words.size()));
    if (inserted) words.push_back(w);
    return it->second;
  };

  for (const auto& [src, tgt] : bitext.pairs) {
    std::vector<int> s_ids{0};
    for (const auto& w : *src) s_ids.push_back(intern(src_id, st.src_words, w));
    std::vector<int> t_ids;
    for (const auto& w : *tgt) t_ids.push_back(intern(tgt_id, st.tgt_words, w));
    std::vector<int> grid;
    grid.reserve(s_ids.size() * t_ids.size());
    for (int s : s_ids) {
      for (int t : t_ids) {
        std::uint64_t key = (static_cast<std::uint64_t>(s) << 32) | static_cast<std::uint32_t>(t);
        auto [it, inserted] = slot_of.emplace(key, static_cast<int>(st.slot_src.size()));
        if (inserted) {
          st.slot_src.push_back(s);
          st.slot_tgt.push_back(t);
        }
        grid.push_back(it->second);
      }
    }
    st.grids.push_back(std::move(grid));
    st.tgt_len.push_back(t_ids.size());
  }

  std::vector<int> fanout(st.src_words.size(), 0);
  for (int s : st.slot_src) ++fanout[s];
  st.prob.resize(st.slot_src.size());
  for (std::size_t k = 0; k < st.prob.size(); ++k) st.prob[k] = 1.0 / fanout[st.slot_src[k]];
  return st;
}

void accumulate(const Ibm1State& st, std::size_t begin, std::size_t end, std::vector<double>& counts) {
  std::vector<double> col;
  for (std::size_t p = begin; p < end; ++p) {
    const auto& grid = st.grids[p];
    const std::size_t m = st.tgt_len[p];
    if (m == 0) continue;
    const std::size_t rows = grid.size() / m;
    for (std::size_t j = 0; j < m; ++j) {
      double denom = 0.0;
      for (std::size_t i = 0; i < rows; ++i) denom += st.prob[grid[i * m + j]];
      for (std::size_t i = 0; i < rows; ++i) {
        int slot = grid[i * m + j];
        counts[slot] += st.prob[slot] / denom;
      }
    }
  }
}

void em_iteration(Ibm1State& st, int threads) {
  const std::size_t n_slots = st.prob.size();
  const std::size_t n_pairs = st.grids.size();
  std::size_t workers = static_cast<std::size_t>(std::max(1, threads));
  workers = std::min(workers, std::max<std::size_t>(1, n_pairs));

  std::vector<std::vector<double>> partial(workers, std::vector<double>(n_slots, 0.0));
  if (workers == 1) {
    accumulate(st, 0, n_pairs, partial[0]);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      std::size_t b = n_pairs * w / workers;
      std::size_t e = n_pairs * (w + 1) / workers;
      pool.emplace_back([&st, &partial, w, b, e] { accumulate(st, b, e, partial[w]); });
    }
    for (auto& t : pool) t.join();
  }
  // Reduction in fixed worker order.
  std::vector<double>& counts = partial[0];
  for (std::size_t w = 1; w < workers; ++w) {
    for (std::size_t k = 0; k < n_slots; ++k) counts[k] += partial[w][k];
  }

  std::vector<double> totals(st.src_words.size(), 0.0);
  for (std::size_t k = 0; k < n_slots; ++k) totals[st.slot_src[k]] += counts[k];
  for (std::size_t k = 0; k < n_slots; ++k) st.prob[k] = counts[k] / totals[st.slot_src[k]];
}

TranslationTable to_table(const Ibm1State& st, const Bitext& bitext) {
  TranslationTable table(bitext.src_lang, bitext.tgt_lang);
  for (std::size_t k = 0; k < st.prob.size(); ++k) {
    table.set(st.src_words[st.slot_src[k]], st.tgt_words[st.slot_tgt[k]], st.prob[k]);
  }
  return table;
}

}  // namespace

TranslationTable init_ibm1(const Bitext& bitext) {
  if (bitext.pairs.empty()) throw InvalidArgument("train_ibm1: empty corpus");
  return to_table(build_state(bitext), bitext);
}

TranslationTable train_ibm1(const Bitext& bitext, const Ibm1Options& options) {
  if (bitext.pairs.empty()) throw InvalidArgument("train_ibm1: empty corpus");
  if (options.iterations < 1) throw InvalidArgument("train_ibm1: iterations must be >= 1");
  Ibm1State st = build_state(bitext);
  for (int it = 1; it <= options.iterations; ++it) {
    em_iteration(st, options.threads);
    if (options.on_iteration) options.on_iteration(it, to_table(st, bitext));
  }
  return to_table(st, bitext);
}

double log_likelihood(const TranslationTable& table, const Bitext& bitext) {
  double ll = 0.0;
  for (const auto& [src, tgt] : bitext.pairs) {
    const double norm = 1.0 / static_cast<double>(src->size() + 1);
    for (const auto& f : *tgt) {
      double sum = table.prob(kNullToken, f);
      for (const auto& e : *src) sum += table.prob(e, f);
      ll += std::log(sum * norm);
    }
  }
  return ll;
}

Alignment Alignment::transposed() const {
  Alignment out;
  for (const auto& [a, b] : links) out.links.emplace(b, a);
  return out;
}

Alignment viterbi_align(const TranslationTable& table, const std::vector<std::string>& src,
                        const std::vector<std::string>& tgt) {
  Alignment a;
  for (std::size_t j = 0; j < tgt.size(); ++j) {
    double best = 0.0;
    std::size_t best_i = src.size();
    for (std::size_t i = 0; i < src.size(); ++i) {
      double p = table.prob(src[i], tgt[j]);
      if (p > best) {
        best = p;
        best_i = i;
      }
    }
    if (best_i == src.size()) continue;
    if (table.prob(kNullToken, tgt[j]) > best) continue;
    a.links.emplace(best_i, j);
  }
  return a;
}

Alignment intersect(const Alignment& forward, const Alignment& backward_transposed) {
  Alignment out;
  for (const auto& link : forward.links) {
    if (backward_transposed.links.count(link)) out.links.insert(link);
  }
  return out;
}

void Dictionary::offer(const std::string& src, const std::string& tgt, long long count) {
  if (count < 1) throw InvalidArgument("dictionary counts must be >= 1");
  auto it = entries_.find(src);
  if (it == entries_.end()) {
    entries_.emplace(src, DictEntry{tgt, count});
    return;
  }
  DictEntry& cur = it->second;
  if (count > cur.count || (count == cur.count && tgt < cur.target)) cur = DictEntry{tgt, count};
}

const std::string* Dictionary::translate(const std::string& word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second.target;
}

std::optional<DictEntry> Dictionary::lookup(const std::string& word) const {
  auto it = entries_.find(word);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void Dictionary::save(const std::filesystem::path& path) const {
  std::string out;
  for (const auto& [src, e] : entries_) {
    out += src + '\t' + e.target + '\t' + std::to_string(e.count) + '\n';
  }
  write_text(path, out);
}

Dictionary extract_dictionary(const Bitext& bitext, const TranslationTable& forward,
                              const TranslationTable& backward) {
  std::map<std::pair<std::string, std::string>, long long> counts;
  for (const auto& [src, tgt] : bitext.pairs) {
    Alignment fwd = viterbi_align(forward, *src, *tgt);
    Alignment bwd = viterbi_align(backward, *tgt, *src).transposed();
    for (const auto& [i, j] : intersect(fwd, bwd).links) ++counts[{(*src)[i], (*tgt)[j]}];
  }
  Dictionary dict(bitext.src_lang, bitext.tgt_lang);
  for (const auto& [pair, c] : counts) dict.offer(pair.first, pair.second, c);
  return dict;
}

Dictionary induce_dictionary(const Bitext& bitext, const Ibm1Options& options) {
  Ibm1Options quiet = options;
  quiet.on_iteration = nullptr;
  TranslationTable fwd = train_ibm1(bitext, quiet);
  TranslationTable bwd = train_ibm1(bitext.reversed(), quiet);
  return extract_dictionary(bitext, fwd, bwd);
}

Dictionary parse_dictionary(const std::vector<std::string>& lines, std::string src_lang,
                            std::string tgt_lang) {
  Dictionary dict(std::move(src_lang), std::move(tgt_lang));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::string where = " at line " + std::to_string(i + 1);
    auto cols = split(lines[i], '\t');
    if (cols.size() != 2 && cols.size() != 3) {
      throw DataError("expected src<TAB>tgt[<TAB>count]" + where);
    }
    std::string src(trim(cols[0]));
    std::string tgt(trim(cols[1]));
    if (src.empty() || tgt.empty()) throw DataError("empty dictionary word" + where);
    long long count = 1;
    if (cols.size() == 3) {
      try {
        count = parse_int(trim(cols[2]));
      } catch (const DataError&) {
        throw DataError("bad count" + where);
      }
      if (count < 1) throw DataError("count must be >= 1" + where);
    }
    dict.offer(src, tgt, count);
  }
  return dict;
}

Dictionary load_dictionary(const std::filesystem::path& path, std::string src_lang,
                           std::string tgt_lang) {
  try {
    return parse_dictionary(read_lines(path), std::move(src_lang), std::move(tgt_lang));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace xlsent::align
