#include "moranfrac/pathologies.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

#include "moranfrac/errors.hpp"

namespace moranfrac {

std::vector<Rational> stern_brocot(std::size_t k) {
  struct Node {
    Rational left, right;
  };
  std::vector<Rational> out;
  out.reserve(k);
  std::deque<Node> queue{{{0, 1}, {1, 1}}};
  while (out.size() < k) {
    const Node node = queue.front();
    queue.pop_front();
    const Rational mid{node.left.num + node.right.num, node.left.den + node.right.den};
    out.push_back(mid);
    queue.push_back({node.left, mid});
    queue.push_back({mid, node.right});
  }
  return out;
}

double AtomicMixture::atomic_mass() const {
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum;
}

AtomicMixture make_mixture(std::size_t k) {
  AtomicMixture mix;
  mix.atoms = stern_brocot(k);
  for (std::size_t i = 1; i <= k; ++i) mix.weights.push_back(std::ldexp(1.0, -static_cast<int>(i)));
  return mix;
}

EntropyRatio partition_entropy_ratio(const AtomicMixture& mix, int n, AtomConvention convention) {
  if (n < 1 || n > 62) throw DomainError("dyadic level must lie in 1..62");
  const std::uint64_t cells = std::uint64_t{1} << n;
  const double width = std::ldexp(1.0, -n);
  const double log_width = -n * std::log(2.0);

  // Atom mass per occupied cell; the cell of p/q is floor(p 2^n / q), exact in
  // integers for the sizes used here.
  std::map<std::uint64_t, double> occupied;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    const Rational& a = mix.atoms[i];
    const auto index = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a.num) << n) / static_cast<unsigned __int128>(a.den));
    occupied[std::min(index, cells - 1)] += mix.weights[i];
  }

  EntropyRatio out;
  out.n = n;
  double mass = 0.0;
  for (const auto& [index, atom_mass] : occupied) {
    const double mu = width + atom_mass;
    out.numerator += mu * std::log(mu);
    mass += mu;
  }
  if (convention == AtomConvention::full) {
    const auto empty = static_cast<double>(cells - occupied.size());
    out.numerator += empty * width * log_width;
    mass += empty * width;
  }
  out.denominator = mass * log_width;
  out.ratio = out.numerator / out.denominator;
  return out;
}

double direct_entropy_integral(const AtomicMixture& mix, double delta) {
  if (!(delta > 0.0 && delta < 0.25)) throw DomainError("delta must lie in (0, 1/4)");
  if (mix.size() == 0) throw DomainError("direct entropy integral needs at least one atom");
  double integral = 0.0;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    const double q = mix.atoms[i].value();
    double ball = std::min(1.0, q + delta) - std::max(0.0, q - delta);
    for (std::size_t j = 0; j < mix.size(); ++j) {
      if (std::abs(mix.atoms[j].value() - q) <= delta) ball += mix.weights[j];
    }
    integral += mix.weights[i] * std::log(ball);
  }
  return integral / mix.atomic_mass() / std::log(delta);
}

}  // namespace moranfrac
