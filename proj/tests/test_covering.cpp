#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "moranfrac/covering.hpp"
#include "moranfrac/errors.hpp"
#include "moranfrac/numeric.hpp"

using namespace moranfrac;

namespace {

double gap_to(const PartitionCell& c, Point x) {
  if (x < c.owner_lo) return c.owner_lo - x;
  if (x > c.owner_hi) return x - c.owner_hi;
  return 0.0;
}

MoranTree tree_of(std::vector<double> r, double gap, int depth) {
  MoranConfig config;
  config.model = CoefficientModel::constant({0.4, 0.6}, std::move(r));
  config.gap = gap;
  config.depth = depth;
  return MoranTree::build(config);
}

}  // namespace

TEST_CASE("maximal packing of a grid") {
  std::vector<Point> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  const Packing p = maximal_packing(grid, 0.15);
  REQUIRE(p.balls.size() == 3);
  CHECK(p.balls[0].center == doctest::Approx(0.0));
  CHECK(p.balls[1].center == doctest::Approx(0.4));
  CHECK(p.balls[2].center == doctest::Approx(0.8));
  CHECK(p.is_packing());
}

TEST_CASE("maximal packings separate and cover") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Point> pts(300);
    for (auto& x : pts) x = unit_interval(rng());
    const double delta = 0.002 + 0.05 * unit_interval(rng());
    const Packing p = maximal_packing(pts, delta);
    CHECK(p.is_packing());
    for (Point x : pts) {
      const bool covered = std::any_of(p.balls.begin(), p.balls.end(),
                                       [&](const Ball& b) { return distance(x, b.center) <= 2 * delta; });
      CHECK(covered);
    }
  }
}

TEST_CASE("packing count bound") {
  CHECK(packing_count_bound(0.25) == 7);
  CHECK(packing_count_bound(0.5) == 3);
  CHECK(packing_count_bound(0.3) == 7);
}

TEST_CASE("three closed unit balls in a row need three packings") {
  const std::vector<Ball> balls{{0.0, 1.0}, {1.0, 1.0}, {2.0, 1.0}};
  const auto packings = decompose_into_packings(balls, 0.25);
  CHECK(packings.size() == 3);
}

TEST_CASE("decompositions are valid and bounded") {
  std::mt19937_64 rng(5);
  const double lambda = 0.3;
  std::vector<Ball> balls;
  double x = 0.0;
  for (int i = 0; i < 300; ++i) {
    x += 2 * lambda * 0.01 + 0.01 * unit_interval(rng());
    balls.push_back({x, 0.01});
  }
  std::shuffle(balls.begin(), balls.end(), rng);
  const auto packings = decompose_into_packings(balls, lambda);
  CHECK(static_cast<int>(packings.size()) <= packing_count_bound(lambda));
  std::size_t total = 0;
  for (const Packing& p : packings) {
    CHECK(p.is_packing());
    total += p.balls.size();
  }
  CHECK(total == balls.size());
}

TEST_CASE("decomposition input checks") {
  const std::vector<Ball> unequal{{0.0, 1.0}, {5.0, 2.0}};
  CHECK_THROWS_AS(decompose_into_packings(unequal, 0.25), DomainError);
  const std::vector<Ball> close{{0.0, 1.0}, {0.4, 1.0}};
  CHECK_THROWS_AS(decompose_into_packings(close, 0.25), DomainError);
  const std::vector<Ball> fine{{0.0, 1.0}, {0.6, 1.0}};
  CHECK_THROWS_AS(decompose_into_packings(fine, 1.0), DomainError);
  CHECK_NOTHROW(decompose_into_packings(fine, 0.25));
}

TEST_CASE("cardinality bound for packings inside a ball") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 30; ++i) {
    const double big = 0.01 + unit_interval(rng());
    const double small = big * (0.01 + 0.99 * unit_interval(rng()));
    const CardinalityReport r = check_cardinality_bound(big, small, unit_interval(rng()), rng() | 1);
    CHECK(r.pass);
    CHECK(static_cast<double>(r.count) <= 3.0 * big / small);
  }
}

TEST_CASE("nearest-owner partition") {
  const MoranTree trees[] = {tree_of({1.0 / 3, 1.0 / 3}, 1.0 / 9, 10), tree_of({0.25, 0.5}, 1.0 / 16, 12)};
  std::mt19937_64 rng(21);
  for (const MoranTree& tree : trees) {
    for (int n = 1; n <= tree.max_scale(); ++n) {
      const MoranPartition part = moran_partition(tree, n);
      CHECK(part.lambda == doctest::Approx(tree.c0() * tree.c1() + 1.0));
      CHECK(part.cells.front().lo == 0.0);
      CHECK(part.cells.back().hi == 1.0);
      std::vector<double> masses;
      Packing witnesses;
      for (std::size_t i = 0; i < part.cells.size(); ++i) {
        const PartitionCell& c = part.cells[i];
        CHECK(part.inside_witness(c));
        witnesses.balls.push_back(c.witness);
        if (c.owner_kind == OwnerKind::section) masses.push_back(c.log_mass);
        if (i + 1 < part.cells.size()) {
          CHECK(c.hi == part.cells[i + 1].lo);
          CHECK(c.hi_closed != part.cells[i + 1].lo_closed);
        }
      }
      CHECK(witnesses.is_packing());
      CHECK(std::abs(log_sum_exp(masses)) < 1e-12);
      for (int k = 0; k < 200; ++k) {
        const Point x = unit_interval(rng());
        const PartitionCell& home = part.locate(x);
        CHECK(home.contains(x));
        const double own = gap_to(home, x);
        for (const PartitionCell& other : part.cells) CHECK(own <= gap_to(other, x) + 1e-15);
      }
    }
  }
}
