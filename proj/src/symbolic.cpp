#include "moranfrac/symbolic.hpp"

#include <algorithm>
#include <charconv>

#include "moranfrac/errors.hpp"

namespace moranfrac {

void Word::validate(int m) const {
  for (Symbol s : symbols_) {
    if (s < 1 || s > m) {
      throw DomainError("word " + to_string(*this) + " has symbol outside 1.." + std::to_string(m));
    }
  }
}

Word Word::prefix(std::size_t n) const {
  if (n > symbols_.size()) throw DomainError("prefix longer than word");
  return Word(std::vector<Symbol>(symbols_.begin(), symbols_.begin() + static_cast<std::ptrdiff_t>(n)));
}

Word Word::concat(const Word& tail) const {
  std::vector<Symbol> out = symbols_;
  out.insert(out.end(), tail.symbols_.begin(), tail.symbols_.end());
  return Word(std::move(out));
}

Word Word::append(Symbol s) const {
  std::vector<Symbol> out = symbols_;
  out.push_back(s);
  return Word(std::move(out));
}

std::strong_ordering Word::operator<=>(const Word& other) const {
  if (auto c = symbols_.size() <=> other.symbols_.size(); c != 0) return c;
  return std::lexicographical_compare_three_way(symbols_.begin(), symbols_.end(), other.symbols_.begin(),
                                                other.symbols_.end());
}

Word parent(const Word& w) {
  if (w.empty()) throw DomainError("parent of the empty word");
  return w.prefix(w.length() - 1);
}

std::uint64_t lex_index(const Word& w, int m) {
  std::uint64_t k = 0;
  for (Symbol s : w.symbols()) k = k * static_cast<std::uint64_t>(m) + (s - 1u);
  return k;
}

Word word_at(std::uint64_t index, int m, std::size_t length) {
  std::vector<Symbol> symbols(length);
  for (std::size_t i = length; i-- > 0;) {
    symbols[i] = static_cast<Symbol>(index % static_cast<std::uint64_t>(m) + 1);
    index /= static_cast<std::uint64_t>(m);
  }
  return Word(std::move(symbols));
}

std::uint64_t level_size(int m, int n, std::uint64_t budget) {
  if (m < 2) throw DomainError("alphabet size must be at least 2");
  if (n < 0) throw DomainError("negative depth");
  std::uint64_t count = 1;
  for (int i = 0; i < n; ++i) {
    if (count > budget / static_cast<std::uint64_t>(m)) {
      throw ResourceError(std::to_string(m) + "^" + std::to_string(n) + " cells exceed the cell budget of " +
                          std::to_string(budget));
    }
    count *= static_cast<std::uint64_t>(m);
  }
  if (count > budget) throw ResourceError("cell budget exceeded");
  return count;
}

std::vector<Word> enumerate_level(int m, int n, std::uint64_t budget) {
  const std::uint64_t count = level_size(m, n, budget);
  std::vector<Word> out;
  out.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) out.push_back(word_at(k, m, static_cast<std::size_t>(n)));
  return out;
}

std::string to_string(const Word& w) {
  if (w.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < w.length(); ++i) {
    if (i) out += '.';
    out += std::to_string(w[i]);
  }
  return out;
}

Word parse_word(std::string_view text) {
  if (text == "-") return {};
  if (text.empty()) throw DomainError("empty word text (use \"-\" for the empty word)");
  std::vector<Symbol> symbols;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t dot = std::min(text.find('.', pos), text.size());
    unsigned value = 0;
    const auto* first = text.data() + pos;
    const auto* last = text.data() + dot;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || value == 0 || value > 0xffff) {
      throw DomainError("malformed word \"" + std::string(text) + "\"");
    }
    symbols.push_back(static_cast<Symbol>(value));
    pos = dot + 1;
  }
  return Word(std::move(symbols));
}

}  // namespace moranfrac
