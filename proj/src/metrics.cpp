#include "xlsent/metrics.hpp"

#include <cstdio>

namespace xlsent::harness {

Metrics evaluate(const std::vector<SentimentLabel>& predicted, const std::vector<SentimentLabel>& gold) {
  if (predicted.empty() || predicted.size() != gold.size()) {
    throw InvalidArgument("metrics need equal, non-zero numbers of predictions and gold labels (got " +
                          std::to_string(predicted.size()) + " and " + std::to_string(gold.size()) + ")");
  }
  Metrics m;
  m.total = gold.size();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++m.confusion[label_code(gold[i])][label_code(predicted[i])];
    if (gold[i] == predicted[i]) ++hits;
  }
  m.accuracy = static_cast<double>(hits) / static_cast<double>(m.total);
  double f1_sum = 0.0;
  for (std::size_t l = 0; l < kNumLabels; ++l) {
    std::size_t tp = m.confusion[l][l], pred_l = 0, gold_l = 0;
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      pred_l += m.confusion[k][l];
      gold_l += m.confusion[l][k];
    }
    m.precision[l] = pred_l ? static_cast<double>(tp) / static_cast<double>(pred_l) : 0.0;
    m.recall[l] = gold_l ? static_cast<double>(tp) / static_cast<double>(gold_l) : 0.0;
    const double pr = m.precision[l] + m.recall[l];
    m.f1[l] = pr > 0.0 ? 2.0 * m.precision[l] * m.recall[l] / pr : 0.0;
    f1_sum += m.f1[l];
  }
  m.macro_f1 = f1_sum / static_cast<double>(kNumLabels);
  return m;
}

double accuracy(const std::vector<SentimentLabel>& predicted, const std::vector<SentimentLabel>& gold) {
  return evaluate(predicted, gold).accuracy;
}

double macro_f1(const std::vector<SentimentLabel>& predicted, const std::vector<SentimentLabel>& gold) {
  return evaluate(predicted, gold).macro_f1;
}

std::string format_report(const Metrics& m, const std::string& title) {
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };
  std::string out = "metric\tlabel\tvalue\n";
  out += "accuracy\tall\t" + fmt(m.accuracy) + "\n";
  out += "macro_f1\tall\t" + fmt(m.macro_f1) + "\n";
  for (std::size_t l = 0; l < kNumLabels; ++l) {
    const std::string name(label_name(label_from_code(static_cast<int>(l))));
    out += "precision\t" + name + "\t" + fmt(m.precision[l]) + "\n";
    out += "recall\t" + name + "\t" + fmt(m.recall[l]) + "\n";
    out += "f1\t" + name + "\t" + fmt(m.f1[l]) + "\n";
  }
  for (std::size_t g = 0; g < kNumLabels; ++g) {
    for (std::size_t p = 0; p < kNumLabels; ++p) {
      out += "confusion\t" + std::string(label_name(label_from_code(static_cast<int>(g)))) + "->" +
             std::string(label_name(label_from_code(static_cast<int>(p)))) + "\t" +
             std::to_string(m.confusion[g][p]) + "\n";
    }
  }
  out += "\n== " + title + " ==\n";
  out += "examples:  " + std::to_string(m.total) + "\n";
  out += "accuracy:  " + fmt(m.accuracy) + "\n";
  out += "macro-F1:  " + fmt(m.macro_f1) + "\n";
  return out;
}

}  // namespace xlsent::harness
