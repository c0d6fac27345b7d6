#include "xlsent/lexicon.hpp"

namespace xlsent::lexicon {

Polarity WordLexicon::lookup(const std::string& word) const {
  auto it = entries.find(word);
  return it == entries.end() ? Polarity{0.0, 0.0} : it->second;
}

WordLexicon sense_average(const SenseLexicon& lexicon) {
  std::map<std::string, std::pair<Polarity, int>> acc;
  for (const auto& [key, score] : lexicon.entries) {
    auto& [sum, n] = acc[key.first];
    sum[0] += score[0];
    sum[1] += score[1];
    ++n;
  }
  WordLexicon out;
  for (const auto& [word, sn] : acc) {
    out.entries[word] = {sn.first[0] / sn.second, sn.first[1] / sn.second};
  }
  return out;
}

WordLexicon translate_lexicon(const WordLexicon& source, const align::Dictionary& dict) {
  std::map<std::string, std::pair<Polarity, int>> acc;
  for (const auto& [word, score] : source.entries) {
    const std::string* t = dict.translate(word);
    if (!t) continue;
    auto& [sum, n] = acc[*t];
    sum[0] += score[0];
    sum[1] += score[1];
    ++n;
  }
  WordLexicon out;
  for (const auto& [word, sn] : acc) {
    out.entries[word] = {sn.first[0] / sn.second, sn.first[1] / sn.second};
  }
  return out;
}

Polarity score_sentence(const WordLexicon& lexicon, const std::vector<std::string>& tokens) {
  Polarity sum{0.0, 0.0};
  int seen = 0;
  for (const auto& tok : tokens) {
    auto it = lexicon.entries.find(tok);
    if (it == lexicon.entries.end()) continue;
    sum[0] += it->second[0];
    sum[1] += it->second[1];
    ++seen;
  }
  if (seen == 0) return {0.0, 0.0};
  return {sum[0] / seen, sum[1] / seen};
}

Polarity score_sentence_via_dictionary(const WordLexicon& source_lexicon,
                                       const align::Dictionary& target_to_source,
                                       const std::vector<std::string>& tokens) {
  std::vector<std::string> mapped;
  for (const auto& tok : tokens) {
    if (const std::string* t = target_to_source.translate(tok)) mapped.push_back(*t);
  }
  return score_sentence(source_lexicon, mapped);
}

SentimentLabel classify_threshold(const Polarity& scores, double delta) {
  if (!(delta >= 0.0)) throw InvalidArgument("classify_threshold: delta must be >= 0");
  if (scores[0] - scores[1] > delta) return SentimentLabel::positive;
  if (scores[1] - scores[0] > delta) return SentimentLabel::negative;
  return SentimentLabel::neutral;
}

WordLexicon parse_lexicon(const std::vector<std::string>& lines) {
  WordLexicon words;
  SenseLexicon senses;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty() || lines[i][0] == '#') continue;
    const std::string where = " at line " + std::to_string(i + 1);
    auto cols = split(lines[i], '\t');
    if (cols.size() != 3 && cols.size() != 4) {
      throw DataError("expected word<TAB>[sense<TAB>]pos<TAB>neg" + where);
    }
    Polarity p{};
    try {
      p = {parse_double(trim(cols[cols.size() - 2])), parse_double(trim(cols[cols.size() - 1]))};
    } catch (const DataError&) {
      throw DataError("bad score" + where);
    }
    if (p[0] < 0.0 || p[0] > 1.0 || p[1] < 0.0 || p[1] > 1.0) {
      throw DataError("score outside [0, 1]" + where);
    }
    if (cols.size() == 4) {
      senses.entries[{cols[0], cols[1]}] = p;
    } else {
      words.entries[cols[0]] = p;
    }
  }
  for (const auto& [w, p] : sense_average(senses).entries) words.entries.emplace(w, p);
  return words;
}

WordLexicon load_lexicon(const std::filesystem::path& path) {
  try {
    return parse_lexicon(read_lines(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_lexicon(const std::filesystem::path& path, const WordLexicon& lexicon) {
  std::string out;
  for (const auto& [w, p] : lexicon.entries) {
    out += w + '\t' + format_double(p[0]) + '\t' + format_double(p[1]) + '\n';
  }
  write_text(path, out);
}

}  // namespace xlsent::lexicon
