#include "moranfrac/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "moranfrac/errors.hpp"

namespace moranfrac {

bool Packing::is_packing() const {
  std::vector<Ball> sorted = balls;
  std::sort(sorted.begin(), sorted.end(), [](const Ball& x, const Ball& y) { return x.center < y.center; });
  // On the line it is enough to compare neighbours once radii are equal; for
  // mixed radii fall back to all pairs.
  const bool equal_radii = std::all_of(sorted.begin(), sorted.end(),
                                       [&](const Ball& b) { return b.radius == sorted.front().radius; });
  if (equal_radii) {
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i - 1].intersects(sorted[i])) return false;
    }
    return true;
  }
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      if (sorted[i].intersects(sorted[j])) return false;
    }
  }
  return true;
}

Packing maximal_packing(std::span<const Point> points, double delta) {
  if (!(delta > 0.0)) throw DomainError("packing radius must be positive");
  if (points.empty()) throw DomainError("maximal packing of an empty point set");
  Packing out;
  std::set<Point> accepted;
  for (Point x : points) {
    auto it = accepted.lower_bound(x);
    bool clear = true;
    if (it != accepted.end() && distance(*it, x) <= 2.0 * delta) clear = false;
    if (clear && it != accepted.begin() && distance(*std::prev(it), x) <= 2.0 * delta) clear = false;
    if (!clear) continue;
    accepted.insert(x);
    out.balls.push_back({x, delta});
  }
  return out;
}

int packing_count_bound(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0,1)");
  return 2 * static_cast<int>(std::ceil(1.0 / lambda)) - 1;
}

std::vector<Packing> decompose_into_packings(std::span<const Ball> balls, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0,1)");
  if (balls.empty()) return {};
  const double delta = balls.front().radius;
  if (!(delta > 0.0)) throw DomainError("ball radius must be positive");
  for (const Ball& b : balls) {
    if (b.radius != delta) throw DomainError("decomposition needs balls of one common radius");
  }

  std::vector<std::size_t> order(balls.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return balls[i].center < balls[j].center; });
  std::vector<double> centers(balls.size());
  for (std::size_t k = 0; k < order.size(); ++k) centers[k] = balls[order[k]].center;
  for (std::size_t k = 1; k < centers.size(); ++k) {
    if (centers[k] - centers[k - 1] <= 2.0 * lambda * delta) {
      throw DomainError("invalid input: lambda-shrunk balls overlap near " + std::to_string(centers[k]));
    }
  }
  std::vector<std::size_t> rank(balls.size());
  for (std::size_t k = 0; k < order.size(); ++k) rank[order[k]] = k;

  constexpr int kUncoloured = -1;
  std::vector<int> colour(balls.size(), kUncoloured);
  std::vector<Packing> out;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const double c = balls[i].center;
    const auto first = static_cast<std::size_t>(std::lower_bound(centers.begin(), centers.end(), c - 2.0 * delta) -
                                                centers.begin());
    std::vector<bool> used(out.size() + 1, false);
    for (std::size_t k = first; k < centers.size() && centers[k] <= c + 2.0 * delta; ++k) {
      const std::size_t j = order[k];
      if (k == rank[i] || colour[j] == kUncoloured) continue;
      if (balls[i].intersects(balls[j])) used[static_cast<std::size_t>(colour[j])] = true;
    }
    const auto pick = static_cast<std::size_t>(std::find(used.begin(), used.end(), false) - used.begin());
    if (pick == out.size()) out.emplace_back();
    colour[i] = static_cast<int>(pick);
    out[pick].balls.push_back(balls[i]);
  }
  return out;
}

bool PartitionCell::contains(Point x) const {
  const bool above = x > lo || (lo_closed && x == lo);
  const bool below = x < hi || (hi_closed && x == hi);
  return above && below;
}

const PartitionCell& MoranPartition::locate(Point x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("point outside [0,1]");
  auto it = std::upper_bound(cells.begin(), cells.end(), x, [](Point v, const PartitionCell& c) { return v < c.lo; });
  if (it != cells.begin()) --it;
  if (it->contains(x)) return *it;
  if (it != cells.begin() && std::prev(it)->contains(x)) return *std::prev(it);
  if (std::next(it) != cells.end() && std::next(it)->contains(x)) return *std::next(it);
  throw DomainError("point not covered by the partition");
}

bool MoranPartition::inside_witness(const PartitionCell& cell) const {
  const double reach = lambda * cell.witness.radius;
  return cell.lo >= cell.witness.center - reach && cell.hi <= cell.witness.center + reach;
}

MoranPartition moran_partition(const MoranTree& tree, int n) {
  const Section section = tree.section(n);
  MoranPartition out;
  out.n = n;
  out.delta = std::ldexp(1.0, -n);
  out.lambda = tree.c0() * tree.c1() + 1.0;
  double min_diam = std::numeric_limits<double>::infinity();
  for (const SectionCell& s : section) min_diam = std::min(min_diam, s.cell.diam);
  const double rho = tree.c0() * min_diam;
  out.witness_radius = rho;

  struct Owner {
    std::size_t id;
    OwnerKind kind;
    std::size_t section_slot;
    double lo, hi;
    Ball witness;
  };
  std::vector<Owner> owners;
  const std::size_t s_count = section.size();
  std::size_t next_ball_id = s_count;

  // Evenly spread, maximal family of disjoint radius-rho balls inside the open
  // segment (lo, hi). Segments touching 0 or 1 are passed in already extended
  // by rho because balls are clipped to [0,1].
  auto fill_gap = [&](double lo, double hi) {
    const double length = hi - lo;
    if (length <= 2.0 * rho) return;
    auto k = static_cast<long>(std::ceil(length / (2.0 * rho))) - 1;
    while (k > 0 && length / static_cast<double>(k) <= 2.0 * rho * (1.0 + 1e-12)) --k;
    for (long j = 1; j <= k; ++j) {
      const double c = lo + length * static_cast<double>(2 * j - 1) / static_cast<double>(2 * k);
      owners.push_back({next_ball_id++, OwnerKind::gap, 0, std::max(0.0, c - rho), std::min(1.0, c + rho), {c, rho}});
    }
  };

  fill_gap(-rho, section.front().cell.a);
  for (std::size_t i = 0; i < s_count; ++i) {
    const MoranCell& c = section[i].cell;
    owners.push_back({i, OwnerKind::section, i, c.a, c.b(), {c.midpoint(), rho}});
    if (i + 1 < s_count) fill_gap(c.b(), section[i + 1].cell.a);
  }
  fill_gap(section.back().cell.b(), 1.0 + rho);

  out.cells.reserve(owners.size());
  for (std::size_t k = 0; k < owners.size(); ++k) {
    const Owner& o = owners[k];
    PartitionCell cell;
    cell.id = o.id;
    cell.owner_kind = o.kind;
    cell.owner_lo = o.lo;
    cell.owner_hi = o.hi;
    cell.witness = o.witness;
    if (o.kind == OwnerKind::section) {
      const SectionCell& s = section[o.section_slot];
      cell.owner_word = tree.word(s.level, s.index);
      cell.log_mass = s.cell.log_mass;
    } else {
      cell.log_mass = -std::numeric_limits<double>::infinity();
    }
    if (k == 0) {
      cell.lo = 0.0;
    } else {
      cell.lo = 0.5 * (owners[k - 1].hi + o.lo);
      cell.lo_closed = o.id < owners[k - 1].id;
    }
    if (k + 1 == owners.size()) {
      cell.hi = 1.0;
    } else {
      cell.hi = 0.5 * (o.hi + owners[k + 1].lo);
      cell.hi_closed = o.id < owners[k + 1].id;
    }
    out.cells.push_back(std::move(cell));
  }
  return out;
}

CardinalityReport check_cardinality_bound(double big_radius, double small_radius, Point center, std::uint64_t seed) {
  if (!(big_radius >= small_radius && small_radius > 0.0)) throw DomainError("cardinality check needs R >= r > 0");
  CardinalityReport report;
  report.big_radius = big_radius;
  report.small_radius = small_radius;
  report.center = center;
  const double lo = std::max(0.0, center - big_radius);
  const double hi = std::min(1.0, center + big_radius);
  std::vector<Point> points;
  const double step = small_radius / 4.0;
  for (double x = lo; x < hi; x += step) points.push_back(x);
  points.push_back(hi);
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    std::shuffle(points.begin(), points.end(), rng);
  }
  report.count = maximal_packing(points, small_radius).balls.size();
  report.bound = 3.0 * big_radius / small_radius;
  report.pass = static_cast<double>(report.count) <= report.bound;
  return report;
}

}  // namespace moranfrac
