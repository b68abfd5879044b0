#pragma once

// Packings, maximal packings, decompositions of ball families into packings and
// the nearest-owner partition driven by a Moran section.

#include <cstdint>
#include <span>
#include <vector>

#include "moranfrac/moran.hpp"

namespace moranfrac {

// Closed ball: membership is distance <= radius.
struct Ball {
  Point center = 0.0;
  double radius = 0.0;

  bool contains(Point x) const { return distance(x, center) <= radius; }
  bool intersects(const Ball& other) const { return distance(center, other.center) <= radius + other.radius; }
};

struct Packing {
  std::vector<Ball> balls;

  // Pairwise center distance strictly larger than the sum of radii.
  bool is_packing() const;
};

// Greedy over the input order: a point becomes a center iff it lies farther
// than 2 delta from every accepted center.
Packing maximal_packing(std::span<const Point> points, double delta);

// Upper bound on the number of packings needed for lambda-separated families of
// equal balls on the line: 2 ceil(1/lambda) - 1.
int packing_count_bound(double lambda);

// Greedy colouring of the conflict graph (balls conflict iff they intersect) in
// input order. Throws DomainError unless all radii agree, lambda lies in (0,1)
// and the lambda-shrunk balls are pairwise disjoint.
std::vector<Packing> decompose_into_packings(std::span<const Ball> balls, double lambda);

enum class OwnerKind { section, gap };

struct PartitionCell {
  std::size_t id = 0;  // section owners first (left to right), then gap balls
  OwnerKind owner_kind = OwnerKind::section;
  Word owner_word;     // empty for gap owners
  double owner_lo = 0.0, owner_hi = 0.0;
  double lo = 0.0, hi = 0.0;  // cell extent
  bool lo_closed = true, hi_closed = true;
  double log_mass = 0.0;      // -inf for gap owners
  Ball witness;

  bool contains(Point x) const;
};

struct MoranPartition {
  int n = 0;
  double delta = 0.0;           // 2^-n
  double witness_radius = 0.0;  // common radius of the witness packing
  double lambda = 0.0;          // C_0 C_1 + 1
  std::vector<PartitionCell> cells;  // left to right

  // Cell containing x in [0,1].
  const PartitionCell& locate(Point x) const;
  // Q inside lambda * B_Q, checked on the interval end points.
  bool inside_witness(const PartitionCell& cell) const;
};

// Owners are the section cells at scale n plus a maximal family of disjoint
// witness-radius balls inside the complement of the section. Every point goes
// to its nearest owner; ties go to the smaller owner index. The witness radius
// is C_0 times the smallest section diameter, so the witness balls (inner balls
// of section cells and the gap balls themselves) are pairwise disjoint.
MoranPartition moran_partition(const MoranTree& tree, int n);

struct CardinalityReport {
  double big_radius = 0.0;
  double small_radius = 0.0;
  Point center = 0.0;
  std::size_t count = 0;
  double bound = 0.0;  // c (r/R)^-s with s = 1, c = 3
  bool pass = false;
};

// Maximal r-packing of B(center, R) within [0,1], built greedily from a grid of
// spacing r/4. A nonzero seed shuffles the greedy order.
CardinalityReport check_cardinality_bound(double big_radius, double small_radius, Point center,
                                          std::uint64_t seed = 0);

}  // namespace moranfrac
