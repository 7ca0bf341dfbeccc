#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace revguard {

/// Unicode NFC normalization for the Latin repertoire this toolkit emits and
/// parses: ASCII passes through untouched and the common combining marks
/// (U+0300..U+0327) are composed with their Latin-1 base letters. Anything
/// else is preserved as-is.
std::string normalize_nfc(const std::string& utf8);

/// Collapses every whitespace run to a single space and trims the ends.
std::string collapse_whitespace(const std::string& s);

/// ASCII lowercase fold.
std::string ascii_lower(const std::string& s);

/// Splits on whitespace; no empty tokens.
std::vector<std::string> split_words(const std::string& s);

/// Word multiset keyed by exact token.
using WordMultiset = std::map<std::string, int>;

WordMultiset word_multiset(const std::string& s);

/// Size of the multiset intersection.
long multiset_intersection_size(const WordMultiset& a, const WordMultiset& b);

long multiset_size(const WordMultiset& m);

/// Lowercased alphanumeric word set ([a-z0-9]+ runs), used for Jaccard
/// similarity over free text.
std::vector<std::string> alnum_word_set(const std::string& s);

/// Jaccard similarity of two word sets; both empty -> 1.
double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Character-level Levenshtein distance.
std::size_t levenshtein(const std::string& a, const std::string& b);

/// Deterministic 64-bit RNG helpers. std::shuffle and the standard
/// distributions are not bit-portable across implementations, so seeded
/// draws go through these.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform draw in [0, n). n must be > 0.
  std::size_t bounded(std::size_t n) { return static_cast<std::size_t>(next() % n); }

 private:
  std::uint64_t state_;
};

/// In-place Fisher-Yates with a SplitMix64 stream.
template <typename T>
void seeded_shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = rng.bounded(i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace revguard
