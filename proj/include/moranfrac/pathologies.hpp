#pragma once

// Lebesgue measure on [0,1] plus finitely many atoms at rationals: the
// dyadic-partition entropy ratio stays near 1/2 while the direct entropy
// integral over the atoms tends to 0.

#include <cstdint>
#include <vector>

namespace moranfrac {

struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// First k rationals of (0,1) in breadth-first Stern-Brocot order:
// 1/2, 1/3, 2/3, 1/4, 2/5, 3/5, 3/4, ...
std::vector<Rational> stern_brocot(std::size_t k);

struct AtomicMixture {
  std::vector<Rational> atoms;   // q_1, ..., q_K
  std::vector<double> weights;   // 2^-i

  std::size_t size() const { return atoms.size(); }
  double atomic_mass() const;    // sum of weights
  double total_mass() const { return 1.0 + atomic_mass(); }
};

AtomicMixture make_mixture(std::size_t k);

// Which dyadic cells enter the entropy sums.
//   full:       every dyadic cell (the untruncated atom set is dense)
//   atoms_only: cells holding a retained atom
enum class AtomConvention { full, atoms_only };

struct EntropyRatio {
  int n = 0;
  double numerator = 0.0;    // sum mu(Q) log mu(Q)
  double denominator = 0.0;  // sum mu(Q) log 2^-n
  double ratio = 0.0;
};

// Cells are the half-open dyadic intervals [j 2^-n, (j+1) 2^-n), the last one
// closed. O(K log K) regardless of n.
EntropyRatio partition_entropy_ratio(const AtomicMixture& mix, int n, AtomConvention convention = AtomConvention::full);

// (1 / nu(A)) sum_i 2^-i log mu(B(q_i, delta)) / log delta, with A the atom set.
double direct_entropy_integral(const AtomicMixture& mix, double delta);

}  // namespace moranfrac
