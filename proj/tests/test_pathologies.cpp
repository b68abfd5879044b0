#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "moranfrac/errors.hpp"
#include "moranfrac/pathologies.hpp"

using namespace moranfrac;

TEST_CASE("Stern-Brocot order") {
  const auto q = stern_brocot(7);
  const std::uint64_t num[] = {1, 1, 2, 1, 2, 3, 3};
  const std::uint64_t den[] = {2, 3, 3, 4, 5, 5, 4};
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(q[i].num == num[i]);
    CHECK(q[i].den == den[i]);
  }
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  for (const Rational& r : stern_brocot(500)) {
    CHECK(std::gcd(r.num, r.den) == 1);
    CHECK(r.value() > 0.0);
    CHECK(r.value() < 1.0);
    seen.insert({r.num, r.den});
  }
  CHECK(seen.size() == 500);
}

TEST_CASE("atomic mixture weights") {
  const AtomicMixture mix = make_mixture(10);
  CHECK(mix.weights[0] == 0.5);
  CHECK(mix.weights[9] == std::ldexp(1.0, -10));
  CHECK(mix.atomic_mass() == doctest::Approx(1.0 - std::ldexp(1.0, -10)));
}

TEST_CASE("partition entropy ratio against explicit cells") {
  const AtomicMixture mix = make_mixture(12);
  const int n = 7;
  const double width = std::ldexp(1.0, -n);
  std::vector<double> cells(1u << n, width);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    auto j = static_cast<std::size_t>(std::floor(mix.atoms[i].value() / width));
    cells[std::min(j, cells.size() - 1)] += mix.weights[i];
  }
  double num = 0.0, mass = 0.0;
  for (double mu : cells) {
    num += mu * std::log(mu);
    mass += mu;
  }
  const EntropyRatio r = partition_entropy_ratio(mix, n);
  CHECK(r.numerator == doctest::Approx(num).epsilon(1e-12));
  CHECK(r.ratio == doctest::Approx(num / (mass * std::log(width))).epsilon(1e-12));
  CHECK(partition_entropy_ratio(make_mixture(64), 20).ratio >= 0.45);
}

TEST_CASE("direct entropy integral tends to zero") {
  const AtomicMixture mix = make_mixture(8);
  const double delta = 1e-3;
  double integral = 0.0;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    const double q = mix.atoms[i].value();
    double ball = 2 * delta;
    for (std::size_t j = 0; j < mix.size(); ++j) {
      if (std::abs(mix.atoms[j].value() - q) <= delta) ball += mix.weights[j];
    }
    integral += mix.weights[i] * std::log(ball);
  }
  CHECK(direct_entropy_integral(mix, delta) ==
        doctest::Approx(integral / mix.atomic_mass() / std::log(delta)).epsilon(1e-12));
  CHECK(direct_entropy_integral(make_mixture(64), std::ldexp(1.0, -20)) <= 0.1);
  CHECK_THROWS_AS(direct_entropy_integral(mix, 0.5), DomainError);
}
