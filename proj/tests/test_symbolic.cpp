#include <doctest.h>

#include "moranfrac/errors.hpp"
#include "moranfrac/symbolic.hpp"

using namespace moranfrac;

TEST_CASE("words print and parse") {
  CHECK(to_string(Word{1, 2, 1}) == "1.2.1");
  CHECK(to_string(Word{}) == "-");
  CHECK(parse_word("1.2.1") == Word{1, 2, 1});
  CHECK(parse_word("-").empty());
  CHECK(parse_word(to_string(Word{3, 1, 12})) == Word{3, 1, 12});
  CHECK_THROWS_AS(parse_word("1..2"), DomainError);
  CHECK_THROWS_AS(parse_word("0.1"), DomainError);
}

TEST_CASE("lexicographic index round trip") {
  const int m = 3;
  for (std::uint64_t i = 0; i < 243; ++i) {
    const Word w = word_at(i, m, 5);
    CHECK(w.length() == 5);
    CHECK(lex_index(w, m) == i);
  }
  CHECK(lex_index(Word{1, 1, 1}, 2) == 0);
  CHECK(lex_index(Word{2, 1, 2}, 2) == 5);
}

TEST_CASE("level enumeration is lexicographic") {
  const auto words = enumerate_level(2, 3);
  REQUIRE(words.size() == 8);
  CHECK(words.front() == Word{1, 1, 1});
  CHECK(words[1] == Word{1, 1, 2});
  CHECK(words.back() == Word{2, 2, 2});
  CHECK(enumerate_level(4, 0).size() == 1);
}

TEST_CASE("level size respects the budget") {
  CHECK(level_size(3, 4, 1000) == 81);
  CHECK_THROWS_AS(level_size(2, 40, std::uint64_t{1} << 22), ResourceError);
}

TEST_CASE("word helpers") {
  const Word w{2, 1, 3};
  CHECK(parent(w) == Word{2, 1});
  CHECK_THROWS_AS(parent(Word{}), DomainError);
  CHECK(w.prefix(1) == Word{2});
  CHECK(w.append(1) == Word{2, 1, 3, 1});
  CHECK(Word{1}.concat(Word{2, 2}) == Word{1, 2, 2});
  CHECK_THROWS_AS(w.validate(2), DomainError);
  CHECK_NOTHROW(w.validate(3));
  CHECK(Word{2} < Word{1, 1});
  CHECK(Word{1, 2} < Word{2, 1});
}
