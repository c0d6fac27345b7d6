#include "xlsent/corpus.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>

namespace xlsent {

SentimentLabel label_from_code(int code) {
  if (code < 0 || code >= static_cast<int>(kNumLabels)) {
    throw DataError("invalid label code " + std::to_string(code));
  }
  return static_cast<SentimentLabel>(code);
}

std::string_view label_name(SentimentLabel l) {
  switch (l) {
    case SentimentLabel::positive: return "positive";
    case SentimentLabel::negative: return "negative";
    case SentimentLabel::neutral: return "neutral";
  }
  return "neutral";
}

std::optional<SentimentLabel> parse_label(std::string_view name) {
  for (SentimentLabel l : kAllLabels) {
    if (label_name(l) == name) return l;
  }
  return std::nullopt;
}

namespace {

// Decodes one UTF-8 code point at text[i]; advances i. Invalid bytes decode
// as themselves so that arbitrary input never throws.
char32_t decode_utf8(std::string_view text, std::size_t& i) {
  auto byte = [&](std::size_t k) { return static_cast<unsigned char>(text[k]); };
  unsigned char b0 = byte(i);
  auto cont = [&](std::size_t k) { return k < text.size() && (byte(k) & 0xC0) == 0x80; };
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0 && cont(i + 1)) {
    char32_t cp = ((b0 & 0x1F) << 6) | (byte(i + 1) & 0x3F);
    i += 2;
    return cp;
  }
  if ((b0 & 0xF0) == 0xE0 && cont(i + 1) && cont(i + 2)) {
    char32_t cp = ((b0 & 0x0F) << 12) | ((byte(i + 1) & 0x3F) << 6) | (byte(i + 2) & 0x3F);
    i += 3;
    return cp;
  }
  if ((b0 & 0xF8) == 0xF0 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
    char32_t cp = ((b0 & 0x07) << 18) | ((byte(i + 1) & 0x3F) << 12) |
                  ((byte(i + 2) & 0x3F) << 6) | (byte(i + 3) & 0x3F);
    i += 4;
    return cp;
  }
  ++i;
  return b0;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_space(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

bool is_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
           (c >= 0x7B && c <= 0x7E);
  }
  switch (c) {
    case 0xA1: case 0xAB: case 0xBB: case 0xBF:
    case 0x060C: case 0x061B: case 0x061F: case 0x06D4:
    case 0x3001: case 0x3002: case 0xFF01: case 0xFF0C: case 0xFF1F:
      return true;
    default:
      return (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E);
  }
}

char32_t to_lower(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 0x20;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;  // Latin-1
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 0x20;  // Greek
  if (c >= 0x410 && c <= 0x42F) return c + 0x20;  // Cyrillic
  if (c >= 0x400 && c <= 0x40F) return c + 0x50;
  if (c == 0x178) return 0xFF;
  if (c >= 0x100 && c <= 0x17F && c != 0x130 && c != 0x131 && c != 0x138 && c != 0x149 &&
      c != 0x178 && c != 0x17F) {
    // Latin Extended-A alternates upper/lower, with a parity shift at U+0139..U+0148
    // and U+0179..U+017E.
    bool odd_upper = (c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E);
    bool upper = odd_upper ? (c % 2 == 1) : (c % 2 == 0);
    return upper ? c + 1 : c;
  }
  return c;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config) {
  std::vector<std::string> out;
  std::vector<char32_t> word;

  auto flush = [&] {
    if (word.empty()) return;
    std::size_t b = 0, e = word.size();
    while (b < e && is_punct(word[b])) ++b;
    while (e > b && is_punct(word[e - 1])) --e;
    for (std::size_t k = 0; k < b; ++k) {
      std::string t;
      encode_utf8(word[k], t);
      out.push_back(std::move(t));
    }
    if (b < e) {
      std::string t;
      for (std::size_t k = b; k < e; ++k) encode_utf8(word[k], t);
      out.push_back(std::move(t));
    }
    for (std::size_t k = e; k < word.size(); ++k) {
      std::string t;
      encode_utf8(word[k], t);
      out.push_back(std::move(t));
    }
    word.clear();
  };

  std::size_t i = 0;
  while (i < text.size()) {
    char32_t c = decode_utf8(text, i);
    if (is_space(c)) {
      flush();
    } else {
      word.push_back(config.lowercase ? to_lower(c) : c);
    }
  }
  flush();
  return out;
}

void validate_sentence(const Sentence& s) {
  if (s.tokens.empty()) throw InvalidArgument("sentence has no tokens");
  for (const auto& t : s.tokens) {
    if (t.empty()) throw InvalidArgument("empty token");
    if (t.find_first_of(" \t\r\n\f\v") != std::string::npos) {
      throw InvalidArgument("token contains whitespace: '" + t + "'");
    }
  }
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

LabeledDataset parse_labeled(const std::vector<std::string>& lines, std::string language,
                             const TokenizerConfig& config) {
  LabeledDataset d;
  d.language = std::move(language);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    const std::string where = " at line " + std::to_string(i + 1);
    if (trim(line).empty()) {
      std::cerr << "warning: skipping blank line" << where << "\n";
      continue;
    }
    auto cols = split(line, '\t');
    if (cols.size() != 2) throw DataError("expected 2 tab-separated columns" + where);
    auto label = parse_label(trim(cols[0]));
    if (!label) throw DataError("unknown label" + where);
    LabeledExample ex;
    ex.label = *label;
    ex.sentence.language = d.language;
    ex.sentence.tokens = tokenize(cols[1], config);
    if (ex.sentence.tokens.empty()) throw DataError("empty text" + where);
    d.examples.push_back(std::move(ex));
  }
  if (d.examples.empty()) throw DataError("empty dataset");
  return d;
}

LabeledDataset load_labeled(const std::filesystem::path& path, std::string language,
                            const TokenizerConfig& config) {
  try {
    return parse_labeled(read_lines(path), std::move(language), config);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_labeled(const std::filesystem::path& path, const LabeledDataset& d) {
  std::string out;
  for (const auto& ex : d.examples) {
    out += label_name(ex.label);
    out += '\t';
    out += join_tokens(ex.sentence.tokens);
    out += '\n';
  }
  write_text(path, out);
}

DatasetSplit split_dataset(const LabeledDataset& d, std::uint64_t seed) {
  const std::size_t n = d.size();
  if (n < 10) throw InvalidArgument("split_dataset needs at least 10 examples, got " + std::to_string(n));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_dev = n / 10;
  DatasetSplit s;
  s.train.language = s.dev.language = s.test.language = d.language;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& ex = d.examples[order[k]];
    if (k < n_train) {
      s.train.examples.push_back(ex);
    } else if (k < n_train + n_dev) {
      s.dev.examples.push_back(ex);
    } else {
      s.test.examples.push_back(ex);
    }
  }
  return s;
}

ParallelCorpus load_parallel(const std::vector<std::filesystem::path>& paths,
                             const std::vector<std::string>& languages,
                             const TokenizerConfig& config) {
  if (paths.size() != languages.size()) {
    throw InvalidArgument("load_parallel: one language code per file required");
  }
  if (paths.empty()) throw InvalidArgument("load_parallel: no files");
  std::vector<std::vector<std::string>> files;
  for (const auto& p : paths) files.push_back(read_lines(p));
  for (std::size_t k = 1; k < files.size(); ++k) {
    if (files[k].size() != files[0].size()) {
      throw DataError("line count mismatch: " + paths[0].string() + " has " +
                      std::to_string(files[0].size()) + " lines, " + paths[k].string() + " has " +
                      std::to_string(files[k].size()));
    }
  }
  if (files[0].empty()) throw DataError("parallel corpus is empty: " + paths[0].string());
  ParallelCorpus corpus;
  corpus.languages = languages;
  corpus.rows.resize(files[0].size());
  for (std::size_t r = 0; r < files[0].size(); ++r) {
    for (std::size_t k = 0; k < files.size(); ++k) {
      corpus.rows[r].push_back(Sentence{tokenize(files[k][r], config), languages[k]});
    }
  }
  return corpus;
}

void save_parallel(const std::vector<std::filesystem::path>& paths, const ParallelCorpus& corpus) {
  if (paths.size() != corpus.languages.size()) {
    throw InvalidArgument("save_parallel: one path per language required");
  }
  for (std::size_t k = 0; k < paths.size(); ++k) {
    std::string out;
    for (const auto& row : corpus.rows) {
      out += join_tokens(row[k].tokens);
      out += '\n';
    }
    write_text(paths[k], out);
  }
}

std::vector<Sentence> load_monolingual(const std::filesystem::path& path, const std::string& language,
                                       const TokenizerConfig& config) {
  std::vector<Sentence> out;
  for (const auto& line : read_lines(path)) {
    auto toks = tokenize(line, config);
    if (!toks.empty()) out.push_back(Sentence{std::move(toks), language});
  }
  return out;
}

TaggedCorpus parse_tagged(const std::vector<std::string>& lines) {
  TaggedCorpus corpus;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::istringstream in(lines[i]);
    TaggedSentence s;
    std::string item;
    while (in >> item) {
      auto slash = item.rfind('/');
      if (slash == std::string::npos || slash == 0 || slash + 1 == item.size()) {
        throw DataError("token without word/TAG form at line " + std::to_string(i + 1) + ": '" +
                        item + "'");
      }
      s.tokens.push_back(item.substr(0, slash));
      s.tags.push_back(item.substr(slash + 1));
      corpus.tagset.insert(s.tags.back());
    }
    if (!s.tokens.empty()) corpus.sentences.push_back(std::move(s));
  }
  return corpus;
}

TaggedCorpus load_tagged(const std::filesystem::path& path) {
  try {
    return parse_tagged(read_lines(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_tagged(const std::filesystem::path& path, const TaggedCorpus& corpus) {
  std::string out;
  for (const auto& s : corpus.sentences) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (i) out.push_back(' ');
      out += s.tokens[i] + "/" + s.tags[i];
    }
    out.push_back('\n');
  }
  write_text(path, out);
}

}  // namespace xlsent
