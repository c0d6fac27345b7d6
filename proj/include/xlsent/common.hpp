#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xlsent {

/// Raised for malformed or missing input data. The CLI maps it to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an argument violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Deterministic random source.
///
/// The engine's output sequence is fixed by the standard; the distribution
/// helpers below are hand-written so that results do not depend on the
/// standard library's (implementation-defined) distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Derives an independent stream for a named stage ("corpus", "init", ...).
  static Rng substream(std::uint64_t seed, std::string_view name);

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

/// Reads all lines of a UTF-8 text file; strips a trailing '\r'.
std::vector<std::string> read_lines(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace xlsent
