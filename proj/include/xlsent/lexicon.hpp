#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "xlsent/align.hpp"
#include "xlsent/corpus.hpp"

namespace xlsent::lexicon {

/// (positive, negative) scores, each in [0, 1].
using Polarity = std::array<double, 2>;

struct SenseLexicon {
  std::map<std::pair<std::string, std::string>, Polarity> entries;  // (word, sense)
};

struct WordLexicon {
  std::map<std::string, Polarity> entries;

  /// (0, 0) for absent words.
  Polarity lookup(const std::string& word) const;
  bool contains(const std::string& word) const { return entries.count(word) > 0; }
  bool operator==(const WordLexicon&) const = default;
};

WordLexicon sense_average(const SenseLexicon& lexicon);

/// Target entry t receives the mean score of every source word translating to t.
WordLexicon translate_lexicon(const WordLexicon& source, const align::Dictionary& dict);

/// Mean polarity over the tokens found in the lexicon; (0, 0) if none are.
Polarity score_sentence(const WordLexicon& lexicon, const std::vector<std::string>& tokens);

/// Scores a target sentence against a source-language lexicon by looking each
/// token up through a target -> source dictionary.
Polarity score_sentence_via_dictionary(const WordLexicon& source_lexicon,
                                       const align::Dictionary& target_to_source,
                                       const std::vector<std::string>& tokens);

inline constexpr double kDefaultDelta = 0.1;

/// positive if pos - neg > delta, negative if neg - pos > delta, else neutral.
SentimentLabel classify_threshold(const Polarity& scores, double delta = kDefaultDelta);

/// Accepts word-level `word<TAB>pos<TAB>neg` and sense-level
/// `word<TAB>sense<TAB>pos<TAB>neg` lines (sense-level rows are averaged).
WordLexicon load_lexicon(const std::filesystem::path& path);
WordLexicon parse_lexicon(const std::vector<std::string>& lines);
void save_lexicon(const std::filesystem::path& path, const WordLexicon& lexicon);

}  // namespace xlsent::lexicon
