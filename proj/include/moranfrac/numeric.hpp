#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace moranfrac {

// log(sum(exp(v))), -inf for an empty input.
double log_sum_exp(std::span<const double> values);

// Streaming log-sum-exp accumulator.
class LogSumExp {
 public:
  void add(double log_value);
  double value() const;
  bool empty() const { return count_ == 0; }

 private:
  double max_ = -1.0 / 0.0;
  double scaled_sum_ = 0.0;
  std::size_t count_ = 0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::size_t points = 0;
};

// Ordinary least squares of y on x. Requires at least two distinct x values.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// Shortest round-trip decimal representation used by every CSV writer.
std::string format_double(double v);

// 64-bit FNV-1a, used for config hashes in run manifests.
std::uint64_t fnv1a64(std::string_view bytes);

// Counter-based seed derivation; stream k of seed s is independent of how many
// streams are drawn before it.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

// Deterministic uniform double in [0, 1) from a 64-bit draw.
inline double unit_interval(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace moranfrac
