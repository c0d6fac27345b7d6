#pragma once

#include <array>
#include <string>
#include <vector>

#include "xlsent/corpus.hpp"

namespace xlsent::harness {

struct Metrics {
  std::size_t total = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::array<double, kNumLabels> precision{};
  std::array<double, kNumLabels> recall{};
  std::array<double, kNumLabels> f1{};
  /// confusion[gold][predicted]
  std::array<std::array<std::size_t, kNumLabels>, kNumLabels> confusion{};
};

/// Throws InvalidArgument on empty or length-mismatched input.
Metrics evaluate(const std::vector<SentimentLabel>& predicted, const std::vector<SentimentLabel>& gold);

double accuracy(const std::vector<SentimentLabel>& predicted, const std::vector<SentimentLabel>& gold);
/// Unweighted mean of per-label F1; a label absent from both sides scores 0.
double macro_f1(const std::vector<SentimentLabel>& predicted, const std::vector<SentimentLabel>& gold);

/// TSV rows followed by a short human-readable summary block.
std::string format_report(const Metrics& m, const std::string& title);

}  // namespace xlsent::harness
