#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace teql {

/// Malformed input data: bad JSON, invariant violations, unresolvable names.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure talking to a model or scorer process.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 64-bit FNV-1a. Stable across platforms and runs, used for every
// fingerprint written to disk.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);
std::string fingerprint(std::string_view data);

std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic PRNG with platform-independent bounded draws
/// (std::uniform_int_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// k distinct indices from [0, n), in ascending order.
  std::vector<std::size_t> choose(std::size_t n, std::size_t k);

 private:
  std::uint64_t state_;
};

std::uint64_t derive_seed(std::uint64_t base, std::string_view salt, std::uint64_t index = 0);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
std::string trim(std::string_view s);
/// Lowercase and collapse whitespace runs to single spaces.
std::string normalize_phrase(std::string_view s);
bool is_word_char(char c);

}  // namespace teql
