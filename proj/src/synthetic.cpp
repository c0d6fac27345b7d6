#include "xlsent/synthetic.hpp"

#include <set>

namespace xlsent::harness {

namespace {

constexpr const char* kFillerTags[] = {"NOUN", "VERB", "DET", "ADV", "PRON", "ADP"};

struct LatentSentence {
  std::vector<int> words;
  SentimentLabel label;
};

class LatentSampler {
 public:
  explicit LatentSampler(const SyntheticSpec& spec) : spec_(spec) {}

  LatentSentence sample(Rng& rng) const {
    LatentSentence s;
    s.label = kAllLabels[rng.below(kNumLabels)];
    const int span = spec_.max_length - spec_.min_length + 1;
    const int len = spec_.min_length + static_cast<int>(rng.below(static_cast<std::uint64_t>(span)));
    const int fillers = spec_.vocab_size - spec_.positive_keywords - spec_.negative_keywords;
    s.words.resize(static_cast<std::size_t>(len));
    for (int& w : s.words) {
      w = spec_.positive_keywords + spec_.negative_keywords + static_cast<int>(rng.below(fillers));
    }
    if (s.label != SentimentLabel::neutral) {
      const bool pos = s.label == SentimentLabel::positive;
      const int base = pos ? 0 : spec_.positive_keywords;
      const int count = pos ? spec_.positive_keywords : spec_.negative_keywords;
      const int n_kw = 1 + static_cast<int>(rng.below(2));
      for (int k = 0; k < n_kw; ++k) {
        s.words[rng.below(s.words.size())] = base + static_cast<int>(rng.below(static_cast<std::uint64_t>(count)));
      }
    }
    return s;
  }

 private:
  const SyntheticSpec& spec_;
};

std::vector<std::string> make_cipher(Rng& rng, int vocab_size, std::set<std::string>& used) {
  static const char* kLetters = "abcdefghijklmnopqrstuvwxyz";
  std::vector<std::string> cipher;
  cipher.reserve(static_cast<std::size_t>(vocab_size));
  while (static_cast<int>(cipher.size()) < vocab_size) {
    const int len = 3 + static_cast<int>(rng.below(5));
    std::string w;
    for (int k = 0; k < len; ++k) w.push_back(kLetters[rng.below(26)]);
    if (used.insert(w).second) cipher.push_back(std::move(w));
  }
  return cipher;
}

Sentence render(const std::vector<int>& latent, const std::vector<std::string>& cipher, const std::string& lang) {
  Sentence s;
  s.language = lang;
  for (int w : latent) s.tokens.push_back(cipher[static_cast<std::size_t>(w)]);
  return s;
}

}  // namespace

void validate_ciphers(const std::vector<std::vector<std::string>>& ciphers, int vocab_size) {
  for (std::size_t k = 0; k < ciphers.size(); ++k) {
    if (static_cast<int>(ciphers[k].size()) != vocab_size) {
      throw InvalidArgument("cipher " + std::to_string(k) + " has " + std::to_string(ciphers[k].size()) +
                            " entries, expected " + std::to_string(vocab_size));
    }
    std::set<std::string> seen;
    for (const auto& w : ciphers[k]) {
      if (w.empty() || w.find_first_of(" \t\r\n") != std::string::npos) {
        throw InvalidArgument("cipher " + std::to_string(k) + " holds an empty or whitespace word");
      }
      if (!seen.insert(w).second) {
        throw InvalidArgument("cipher " + std::to_string(k) + " is not bijective: '" + w + "' repeats");
      }
    }
  }
}

SyntheticWorld gen_synthetic(const SyntheticSpec& spec) {
  if (spec.languages.empty()) throw InvalidArgument("gen_synthetic: no languages");
  if (spec.positive_keywords < 1 || spec.negative_keywords < 1 ||
      spec.vocab_size <= spec.positive_keywords + spec.negative_keywords) {
    throw InvalidArgument("gen_synthetic: vocabulary must exceed the keyword count");
  }
  if (spec.min_length < 2 || spec.max_length < spec.min_length) {
    throw InvalidArgument("gen_synthetic: need 2 <= min_length <= max_length");
  }
  const std::size_t L = spec.languages.size();
  SyntheticWorld world;
  world.languages = spec.languages;

  if (!spec.ciphers.empty()) {
    if (spec.ciphers.size() != L) throw InvalidArgument("gen_synthetic: one cipher per language required");
    validate_ciphers(spec.ciphers, spec.vocab_size);
    world.ciphers = spec.ciphers;
  } else {
    Rng rng = Rng::substream(spec.seed, "cipher");
    std::set<std::string> used;
    for (std::size_t k = 0; k < L; ++k) world.ciphers.push_back(make_cipher(rng, spec.vocab_size, used));
  }

  const int n_kw = spec.positive_keywords + spec.negative_keywords;
  for (int w = 0; w < spec.vocab_size; ++w) {
    world.latent_tags.push_back(w < n_kw ? "ADJ" : kFillerTags[static_cast<std::size_t>(w - n_kw) % 6]);
  }

  LatentSampler sampler(spec);
  for (std::size_t k = 0; k < L; ++k) {
    const std::string& lang = spec.languages[k];
    Rng rng = Rng::substream(spec.seed, "labeled/" + lang);
    LabeledDataset d;
    d.language = lang;
    for (int i = 0; i < spec.labeled_per_language; ++i) {
      LatentSentence s = sampler.sample(rng);
      d.examples.push_back({render(s.words, world.ciphers[k], lang), s.label});
    }
    world.labeled[lang] = std::move(d);

    Rng mono_rng = Rng::substream(spec.seed, "mono/" + lang);
    auto& mono = world.monolingual[lang];
    for (int i = 0; i < spec.monolingual_size; ++i) {
      mono.push_back(render(sampler.sample(mono_rng).words, world.ciphers[k], lang));
    }

    Rng tag_rng = Rng::substream(spec.seed, "tagged/" + lang);
    TaggedCorpus& tc = world.tagged[lang];
    for (int i = 0; i < spec.tagged_size; ++i) {
      LatentSentence s = sampler.sample(tag_rng);
      TaggedSentence ts;
      for (int w : s.words) {
        ts.tokens.push_back(world.ciphers[k][static_cast<std::size_t>(w)]);
        ts.tags.push_back(world.latent_tags[static_cast<std::size_t>(w)]);
        tc.tagset.insert(ts.tags.back());
      }
      tc.sentences.push_back(std::move(ts));
    }
  }

  Rng par_rng = Rng::substream(spec.seed, "parallel");
  world.parallel.languages = spec.languages;
  for (int i = 0; i < spec.parallel_size; ++i) {
    LatentSentence s = sampler.sample(par_rng);
    std::vector<Sentence> row;
    for (std::size_t k = 0; k < L; ++k) row.push_back(render(s.words, world.ciphers[k], spec.languages[k]));
    world.parallel.rows.push_back(std::move(row));
    world.parallel_gold.push_back(s.label);
  }

  for (std::size_t a = 0; a < L; ++a) {
    for (std::size_t b = 0; b < L; ++b) {
      if (a == b) continue;
      align::Dictionary d(spec.languages[a], spec.languages[b]);
      for (int w = 0; w < spec.vocab_size; ++w) {
        d.offer(world.ciphers[a][static_cast<std::size_t>(w)], world.ciphers[b][static_cast<std::size_t>(w)], 1);
      }
      world.gold_dictionaries.emplace(std::make_pair(spec.languages[a], spec.languages[b]), std::move(d));
    }
  }

  for (int w = 0; w < n_kw; ++w) {
    const bool pos = w < spec.positive_keywords;
    world.lexicon.entries[world.ciphers[0][static_cast<std::size_t>(w)]] =
        pos ? lexicon::Polarity{0.75, 0.0} : lexicon::Polarity{0.0, 0.75};
  }
  return world;
}

std::vector<std::filesystem::path> write_synthetic(const SyntheticWorld& world, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  std::vector<std::filesystem::path> par_paths;
  for (const auto& lang : world.languages) {
    const auto& d = world.labeled.at(lang);
    auto p = dir / (lang + ".labeled.tsv");
    save_labeled(p, d);
    written.push_back(p);
    if (d.size() >= 10) {
      DatasetSplit s = split_dataset(d, 0);
      for (auto [name, part] : {std::pair{"train", &s.train}, {"dev", &s.dev}, {"test", &s.test}}) {
        auto sp = dir / (lang + "." + name + ".tsv");
        save_labeled(sp, *part);
        written.push_back(sp);
      }
    }
    std::string mono;
    for (const auto& s : world.monolingual.at(lang)) mono += join_tokens(s.tokens) + "\n";
    auto mp = dir / ("mono." + lang + ".txt");
    write_text(mp, mono);
    written.push_back(mp);
    auto tp = dir / ("tagged." + lang + ".txt");
    save_tagged(tp, world.tagged.at(lang));
    written.push_back(tp);
    par_paths.push_back(dir / ("parallel." + lang + ".txt"));
  }
  save_parallel(par_paths, world.parallel);
  written.insert(written.end(), par_paths.begin(), par_paths.end());

  std::string gold;
  for (std::size_t i = 0; i < world.parallel_gold.size(); ++i) {
    gold += std::to_string(i) + "\t" + std::string(label_name(world.parallel_gold[i])) + "\n";
  }
  auto gp = dir / "parallel.gold.tsv";
  write_text(gp, gold);
  written.push_back(gp);

  for (const auto& [pair, dict] : world.gold_dictionaries) {
    auto p = dir / ("dict.gold." + pair.first + "-" + pair.second + ".tsv");
    dict.save(p);
    written.push_back(p);
  }
  auto lp = dir / ("lexicon." + world.languages.front() + ".tsv");
  lexicon::save_lexicon(lp, world.lexicon);
  written.push_back(lp);
  return written;
}

}  // namespace xlsent::harness
