#include "revguard/text_util.hpp"

#include "doctest.h"

using namespace revguard;

TEST_CASE("collapse_whitespace squeezes runs and trims") {
  CHECK(collapse_whitespace("  a \t b\n\nc ") == "a b c");
  CHECK(collapse_whitespace("") == "");
  CHECK(collapse_whitespace("   ") == "");
  CHECK(collapse_whitespace("one") == "one");
}

TEST_CASE("normalize_nfc composes latin combining marks") {
  // "e" + U+0301 -> U+00E9
  std::string decomposed = "caf\x65\xCC\x81";
  std::string composed = "caf\xC3\xA9";
  CHECK(normalize_nfc(decomposed) == composed);
  CHECK(normalize_nfc(composed) == composed);
  CHECK(normalize_nfc("plain ascii") == "plain ascii");
}

TEST_CASE("word multiset intersection") {
  auto a = word_multiset("a b c d");
  auto b = word_multiset("a b");
  CHECK(multiset_size(a) == 4);
  CHECK(multiset_size(b) == 2);
  CHECK(multiset_intersection_size(a, b) == 2);
  // Multiset semantics: repeated words count separately.
  auto c = word_multiset("x x y");
  auto d = word_multiset("x y y");
  CHECK(multiset_intersection_size(c, d) == 2);
}

TEST_CASE("jaccard set similarity") {
  CHECK(jaccard(alnum_word_set("a b"), alnum_word_set("a b")) == doctest::Approx(1.0));
  CHECK(jaccard(alnum_word_set(""), alnum_word_set("")) == doctest::Approx(1.0));
  CHECK(jaccard(alnum_word_set("a"), alnum_word_set("b")) == doctest::Approx(0.0));
  CHECK(jaccard(alnum_word_set("a b"), alnum_word_set("b c")) == doctest::Approx(1.0 / 3.0));
  // Case-folded and punctuation-stripped.
  CHECK(jaccard(alnum_word_set("Hello, World!"), alnum_word_set("hello world")) ==
        doctest::Approx(1.0));
}

TEST_CASE("levenshtein") {
  CHECK(levenshtein("", "") == 0);
  CHECK(levenshtein("abc", "abc") == 0);
  CHECK(levenshtein("kitten", "sitting") == 3);
  CHECK(levenshtein("", "abc") == 3);
}

TEST_CASE("seeded shuffle is deterministic") {
  std::vector<int> v1{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> v2 = v1;
  SplitMix64 r1(42), r2(42);
  seeded_shuffle(v1, r1);
  seeded_shuffle(v2, r2);
  CHECK(v1 == v2);
  std::vector<int> v3{1, 2, 3, 4, 5, 6, 7, 8};
  SplitMix64 r3(43);
  seeded_shuffle(v3, r3);
  CHECK(v1 != v3);  // different seed, different order (true for these seeds)
}
