#pragma once

// Coarse (box-counting) multifractal spectra, their comparison with the
// Legendre transform of the closed-form local spectrum, and sampling from the
// auxiliary measure nu that concentrates on a level set.
//
// The coarse spectrum is a finite-scale proxy for the Hausdorff and packing
// dimensions of level sets; it is not either of those dimensions.

#include <cstdint>
#include <span>
#include <vector>

#include "moranfrac/estimators.hpp"
#include "moranfrac/moran.hpp"
#include "moranfrac/theory.hpp"

namespace moranfrac {

// How the exponent of a section cell and the count scale are normalised.
//   cell:   exponent log mu(Q) / log diam(Q), scale -mean log diam(Q)
//   dyadic: exponent log mu(Q) / log 2^-n,    scale n log 2
enum class CoarseNormalization { cell, dyadic };

struct CoarseSpectrum {
  int n = 0;
  double epsilon = 0.0;
  CoarseNormalization normalization = CoarseNormalization::cell;
  double log_scale = 0.0;  // denominator of f_emp
  std::size_t cells = 0;   // section cells meeting the region
  std::vector<double> alpha;
  std::vector<std::size_t> count;
  std::vector<double> f;   // log max(N, 1) / log_scale
};

// max(epsilon, 2 / n); absorbs the quantization of section depths.
double effective_epsilon(double epsilon, int n);

// Regular grid from lo to hi inclusive.
std::vector<double> alpha_grid(double lo, double hi, double step);

// Counts section cells at scale n meeting the region whose exponent lies in
// [alpha - epsilon, alpha + epsilon]. Throws NoSupport for an empty region.
CoarseSpectrum coarse_spectrum(const MoranTree& tree, const Region& region, int n, double epsilon,
                               std::span<const double> alphas,
                               CoarseNormalization normalization = CoarseNormalization::cell);

inline CoarseSpectrum local_coarse_spectrum(const MoranTree& tree, Point x, double r, int n, double epsilon,
                                            std::span<const double> alphas,
                                            CoarseNormalization normalization = CoarseNormalization::cell) {
  return coarse_spectrum(tree, Region::in_ball(x, r), n, epsilon, alphas, normalization);
}

struct LegendreComparison {
  std::vector<double> alpha;
  std::vector<std::size_t> count;
  std::vector<double> f_emp;
  std::vector<double> f_theory;
  std::vector<double> deviation;  // |f_emp - f_theory|
  double sup_norm = 0.0;          // over alpha in [alpha_min + band, alpha_max - band]
  double max_f_emp = 0.0;         // over the whole grid
};

// Grid points outside the closed spectrum interval have f_theory = 0. Only the
// interior band enters the sup norm.
LegendreComparison compare_legendre(const CoarseSpectrum& spectrum, const LocalCoefficients& coefficients, double band);

struct NuSample {
  std::size_t id = 0;
  Point point = 0.0;
  int scale = 0;        // last dyadic scale reached by the descent
  double dim_mu = 0.0;  // log mu(Q) / log delta at the last available scale
  double dim_nu = 0.0;
  bool outside = false;  // point left one of the cells it descended through
};

struct NuSampleReport {
  double alpha = 0.0;
  std::uint64_t seed = 0;
  int depth = 0;
  int last_scale = 0;  // smallest last scale over the samples
  std::vector<NuSample> samples;
  double mean_mu = 0.0, mean_nu = 0.0;
  double sd_mu = 0.0, sd_nu = 0.0;
  std::size_t outside = 0;
};

// k independent descents of the given depth. Each step draws a child with
// probabilities nu_weights(p(anchor), r(anchor), alpha). Sample i uses stream i
// of the seed, so results do not depend on the thread count.
NuSampleReport nu_sample(const MoranConfig& config, double alpha, std::size_t k, int depth, std::uint64_t seed,
                         unsigned threads = 0);

}  // namespace moranfrac
