#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "xlsent/common.hpp"

namespace xlsent {

/// Three-way sentiment label. The integer codes are part of every file format.
enum class SentimentLabel : int { positive = 0, negative = 1, neutral = 2 };

inline constexpr std::size_t kNumLabels = 3;
inline constexpr std::array<SentimentLabel, kNumLabels> kAllLabels = {
    SentimentLabel::positive, SentimentLabel::negative, SentimentLabel::neutral};

inline int label_code(SentimentLabel l) { return static_cast<int>(l); }
SentimentLabel label_from_code(int code);
std::string_view label_name(SentimentLabel l);
std::optional<SentimentLabel> parse_label(std::string_view name);

struct Sentence {
  std::vector<std::string> tokens;
  std::string language;

  bool operator==(const Sentence&) const = default;
};

struct LabeledExample {
  Sentence sentence;
  SentimentLabel label = SentimentLabel::neutral;

  bool operator==(const LabeledExample&) const = default;
};

struct LabeledDataset {
  std::string language;
  std::vector<LabeledExample> examples;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
  bool operator==(const LabeledDataset&) const = default;
};

/// Row-aligned multi-way parallel text. A language code may repeat when a
/// corpus carries several translations into the same language.
struct ParallelCorpus {
  std::vector<std::string> languages;
  std::vector<std::vector<Sentence>> rows;

  std::size_t size() const { return rows.size(); }
  bool operator==(const ParallelCorpus&) const = default;
};

struct TaggedSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;

  bool operator==(const TaggedSentence&) const = default;
};

struct TaggedCorpus {
  std::vector<TaggedSentence> sentences;
  std::set<std::string> tagset;
};

struct TokenizerConfig {
  bool lowercase = true;
};

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config = {});

/// Throws InvalidArgument if the sentence is empty or a token holds whitespace.
void validate_sentence(const Sentence& s);

/// Reads `label<TAB>text` lines. Blank lines are skipped (warning on stderr).
LabeledDataset load_labeled(const std::filesystem::path& path, std::string language,
                            const TokenizerConfig& config = {});
LabeledDataset parse_labeled(const std::vector<std::string>& lines, std::string language,
                             const TokenizerConfig& config = {});
void save_labeled(const std::filesystem::path& path, const LabeledDataset& d);

struct DatasetSplit {
  LabeledDataset train;
  LabeledDataset dev;
  LabeledDataset test;
};

/// 80/10/10 split after a seeded shuffle; sizes floor(0.8n), floor(0.1n), rest.
DatasetSplit split_dataset(const LabeledDataset& d, std::uint64_t seed);

/// One file per language, line i of every file forming row i.
ParallelCorpus load_parallel(const std::vector<std::filesystem::path>& paths,
                             const std::vector<std::string>& languages,
                             const TokenizerConfig& config = {});
void save_parallel(const std::vector<std::filesystem::path>& paths, const ParallelCorpus& corpus);

/// Monolingual text, one sentence per line; blank lines skipped.
std::vector<Sentence> load_monolingual(const std::filesystem::path& path, const std::string& language,
                                       const TokenizerConfig& config = {});

/// Reads `word/TAG word/TAG ...` lines; the tag is the text after the last '/'.
TaggedCorpus load_tagged(const std::filesystem::path& path);
TaggedCorpus parse_tagged(const std::vector<std::string>& lines);
void save_tagged(const std::filesystem::path& path, const TaggedCorpus& corpus);

std::string join_tokens(const std::vector<std::string>& tokens);

}  // namespace xlsent
