#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace moranfrac {

// Precondition violated by an argument (empty word, r = 1 radius, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid or infeasible construction configuration. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested work exceeds the configured cell budget. CLI exit code 3.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A section at scale n needs cells deeper than the built tree.
class SectionIncomplete : public std::runtime_error {
 public:
  SectionIncomplete(int scale, std::string deepest_word)
      : std::runtime_error("section incomplete at scale " + std::to_string(scale) +
                           " (deepest incomplete branch " + deepest_word + ")"),
        scale_(scale),
        word_(std::move(deepest_word)) {}

  int scale() const { return scale_; }
  const std::string& word() const { return word_; }

 private:
  int scale_;
  std::string word_;
};

// A window or ball selects no support cells.
class NoSupport : public std::runtime_error {
 public:
  NoSupport() : std::runtime_error("no support in window") {}
  explicit NoSupport(const std::string& what) : std::runtime_error("no support in window: " + what) {}
};

}  // namespace moranfrac
