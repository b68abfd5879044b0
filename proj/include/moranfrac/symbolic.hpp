#pragma once

// Finite words over the alphabet {1, ..., m} indexing cylinders of a Moran tree.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace moranfrac {

using Symbol = std::uint16_t;

class Word {
 public:
  Word() = default;
  Word(std::initializer_list<Symbol> symbols) : symbols_(symbols) {}
  explicit Word(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {}

  std::size_t length() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  Symbol operator[](std::size_t i) const { return symbols_[i]; }
  const std::vector<Symbol>& symbols() const { return symbols_; }

  // Throws DomainError when a symbol lies outside 1..m.
  void validate(int m) const;

  Word prefix(std::size_t n) const;
  Word concat(const Word& tail) const;
  Word append(Symbol s) const;

  // Length first, then lexicographic; deterministic map keys.
  std::strong_ordering operator<=>(const Word& other) const;
  bool operator==(const Word& other) const = default;

 private:
  std::vector<Symbol> symbols_;
};

// Drops the last symbol. Throws DomainError on the empty word.
Word parent(const Word& w);

// Index of w among the m^|w| words of its level in lexicographic order.
std::uint64_t lex_index(const Word& w, int m);

// Inverse of lex_index for words of the given length.
Word word_at(std::uint64_t index, int m, std::size_t length);

// m^n, or throws ResourceError when it exceeds budget.
std::uint64_t level_size(int m, int n, std::uint64_t budget);

// All m^n words of length n in lexicographic order.
std::vector<Word> enumerate_level(int m, int n, std::uint64_t budget = std::uint64_t{1} << 22);

// "1.2.1"; the empty word is "-".
std::string to_string(const Word& w);
Word parse_word(std::string_view text);

}  // namespace moranfrac
