#include <algorithm>
#include <set>

#include "doctest.h"
#include "teql/util.hpp"

using namespace teql;

TEST_CASE("fnv1a64 matches published test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("rng is reproducible and bounded") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.below(7);
    CHECK(x == b.below(7));
    CHECK(x < 7);
  }
  Rng c(43);
  Rng d(42);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += c.next() == d.next();
  CHECK(same < 5);
}

TEST_CASE("rng below is roughly uniform") {
  Rng rng(7);
  int counts[5] = {};
  for (int i = 0; i < 50000; ++i) ++counts[rng.below(5)];
  for (int c : counts) {
    CHECK(c > 9500);
    CHECK(c < 10500);
  }
}

TEST_CASE("choose returns sorted distinct indices") {
  Rng rng(3);
  for (std::size_t n = 0; n < 30; ++n) {
    for (std::size_t k = 0; k <= n; ++k) {
      const auto picked = rng.choose(n, k);
      REQUIRE(picked.size() == k);
      CHECK(std::is_sorted(picked.begin(), picked.end()));
      CHECK(std::set<std::size_t>(picked.begin(), picked.end()).size() == k);
      for (auto p : picked) CHECK(p < n);
    }
  }
}

TEST_CASE("shuffle is a permutation") {
  Rng rng(11);
  std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
  auto w = v;
  rng.shuffle(w);
  std::sort(w.begin(), w.end());
  CHECK(w == v);
}

TEST_CASE("derive_seed separates salts and indices") {
  CHECK(derive_seed(1, "a", 0) == derive_seed(1, "a", 0));
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "b", 0));
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
  CHECK(derive_seed(1, "a", 0) != derive_seed(2, "a", 0));
}

TEST_CASE("string helpers") {
  CHECK(trim("  a b \n") == "a b");
  CHECK(normalize_phrase("  What   IS\tthe ") == "what is the");
  CHECK(to_upper("abc") == "ABC");
  CHECK(is_word_char('_'));
  CHECK_FALSE(is_word_char('-'));
}
