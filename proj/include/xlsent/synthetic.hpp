#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xlsent/align.hpp"
#include "xlsent/corpus.hpp"
#include "xlsent/lexicon.hpp"

namespace xlsent::harness {

/// Parameters of a ciphered multi-language sentiment world. Every language is
/// a word-for-word bijective cipher of one latent language; labels follow from
/// latent keywords.
struct SyntheticSpec {
  std::vector<std::string> languages{"xa", "xb", "xc"};
  int vocab_size = 200;
  int positive_keywords = 20;
  int negative_keywords = 20;
  int labeled_per_language = 750;
  int parallel_size = 500;
  int monolingual_size = 1000;
  int tagged_size = 200;
  int min_length = 4;
  int max_length = 10;
  std::uint64_t seed = 7;
  /// Optional explicit ciphers: ciphers[k][latent id] is language k's surface word.
  std::vector<std::vector<std::string>> ciphers;
};

struct SyntheticWorld {
  std::vector<std::string> languages;
  std::vector<std::vector<std::string>> ciphers;
  std::vector<std::string> latent_tags;  // per latent word
  std::map<std::string, LabeledDataset> labeled;
  ParallelCorpus parallel;
  std::vector<SentimentLabel> parallel_gold;
  std::map<std::string, std::vector<Sentence>> monolingual;
  std::map<std::string, TaggedCorpus> tagged;
  /// gold_dictionaries[{a, b}] maps language a's words to language b's.
  std::map<std::pair<std::string, std::string>, align::Dictionary> gold_dictionaries;
  /// Polarity lexicon over the first language's keywords.
  lexicon::WordLexicon lexicon;
};

/// Throws InvalidArgument if some language's cipher repeats a surface word or
/// has the wrong size.
void validate_ciphers(const std::vector<std::vector<std::string>>& ciphers, int vocab_size);

SyntheticWorld gen_synthetic(const SyntheticSpec& spec);

/// Writes the world as files under `dir` and returns the list of written paths.
std::vector<std::filesystem::path> write_synthetic(const SyntheticWorld& world, const std::filesystem::path& dir);

}  // namespace xlsent::harness
