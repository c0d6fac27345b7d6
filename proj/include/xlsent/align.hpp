#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "xlsent/corpus.hpp"

namespace xlsent::align {

/// Reserved source token standing for the empty word.
inline const std::string kNullToken = "<NULL>";

/// Word-translation probabilities t(target | source) for one direction.
class TranslationTable {
 public:
  TranslationTable() = default;
  TranslationTable(std::string src_lang, std::string tgt_lang)
      : src_lang_(std::move(src_lang)), tgt_lang_(std::move(tgt_lang)) {}

  const std::string& source_language() const { return src_lang_; }
  const std::string& target_language() const { return tgt_lang_; }

  /// 0 for pairs never seen together.
  double prob(const std::string& src, const std::string& tgt) const;
  void set(const std::string& src, const std::string& tgt, double p);

  using Row = std::map<std::string, double>;
  const std::map<std::string, Row>& rows() const { return rows_; }

  /// Largest |1 - sum_t t(t|s)| over source words.
  double max_row_deviation() const;

  void save(const std::filesystem::path& path) const;
  static TranslationTable load(const std::filesystem::path& path, std::string src_lang,
                               std::string tgt_lang);

 private:
  std::string src_lang_;
  std::string tgt_lang_;
  std::map<std::string, Row> rows_;
};

/// Token-sequence view of one direction of a parallel corpus.
struct Bitext {
  std::string src_lang;
  std::string tgt_lang;
  std::vector<std::pair<const std::vector<std::string>*, const std::vector<std::string>*>> pairs;

  static Bitext from(const ParallelCorpus& corpus, std::size_t src_col, std::size_t tgt_col);
  Bitext reversed() const;
};

struct Ibm1Options {
  int iterations = 5;
  /// Worker threads for expected-count accumulation. 1 is bitwise reproducible.
  int threads = 1;
  /// Called after every EM iteration with (iteration index from 1, table).
  std::function<void(int, const TranslationTable&)> on_iteration;
};

/// IBM Model 1 with a NULL source word, uniform initialisation over the target
/// words that co-occur with each source word.
TranslationTable train_ibm1(const Bitext& bitext, const Ibm1Options& options = {});

/// Table after initialisation only (before any EM iteration).
TranslationTable init_ibm1(const Bitext& bitext);

/// sum over pairs of sum_j log( sum_i t(f_j | e_i) / (l + 1) ), NULL included.
double log_likelihood(const TranslationTable& table, const Bitext& bitext);

/// Links are (source index, target index).
struct Alignment {
  std::set<std::pair<std::size_t, std::size_t>> links;

  bool operator==(const Alignment&) const = default;
  Alignment transposed() const;
};

/// Each target word links to its most probable source word. Ties go to the
/// lowest source index; the NULL word wins only when strictly more probable.
Alignment viterbi_align(const TranslationTable& table, const std::vector<std::string>& src,
                        const std::vector<std::string>& tgt);

Alignment intersect(const Alignment& forward, const Alignment& backward_transposed);

struct DictEntry {
  std::string target;
  long long count = 0;

  bool operator==(const DictEntry&) const = default;
};

/// Total function source word -> single most frequent translation.
class Dictionary {
 public:
  Dictionary() = default;
  Dictionary(std::string src_lang, std::string tgt_lang)
      : src_lang_(std::move(src_lang)), tgt_lang_(std::move(tgt_lang)) {}

  const std::string& source_language() const { return src_lang_; }
  const std::string& target_language() const { return tgt_lang_; }

  /// Keeps the existing entry unless the candidate has a higher count, or the
  /// same count and a lexicographically smaller target.
  void offer(const std::string& src, const std::string& tgt, long long count);

  const std::string* translate(const std::string& word) const;
  std::optional<DictEntry> lookup(const std::string& word) const;

  const std::map<std::string, DictEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool operator==(const Dictionary&) const = default;

  /// `src<TAB>tgt<TAB>count`, sorted by source word.
  void save(const std::filesystem::path& path) const;

 private:
  std::string src_lang_;
  std::string tgt_lang_;
  std::map<std::string, DictEntry> entries_;
};

/// Count links over the intersected Viterbi alignments of every pair and keep
/// the most frequent target per source word (ties: smaller target string).
Dictionary extract_dictionary(const Bitext& bitext, const TranslationTable& forward,
                              const TranslationTable& backward);

/// Trains both directions and extracts the dictionary.
Dictionary induce_dictionary(const Bitext& bitext, const Ibm1Options& options = {});

/// TSV `src<TAB>tgt[<TAB>count]`; count defaults to 1.
Dictionary load_dictionary(const std::filesystem::path& path, std::string src_lang = {},
                           std::string tgt_lang = {});
Dictionary parse_dictionary(const std::vector<std::string>& lines, std::string src_lang = {},
                            std::string tgt_lang = {});

/// Hand-built dictionaries (e.g. scraped from a wiki) use the same format.
inline Dictionary load_manual_dictionary(const std::filesystem::path& path, std::string src_lang = {},
                                         std::string tgt_lang = {}) {
  return load_dictionary(path, std::move(src_lang), std::move(tgt_lang));
}

}  // namespace xlsent::align
