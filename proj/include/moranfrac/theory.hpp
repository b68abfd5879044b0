#pragma once

// Closed-form local spectrum of a Moran measure at a point: the implicit
// equation sum_i p_i^q r_i^(-tau) = 1, its q-derivative, the entropy dimension,
// the Legendre transform f(alpha) and the auxiliary (nu) weights.

#include <span>
#include <vector>

namespace moranfrac {

struct LocalCoefficients {
  std::vector<double> p;  // probability vector
  std::vector<double> r;  // contraction ratios in (0, 1)

  // Throws DomainError unless p sums to one and every entry lies in (0, 1).
  void validate() const;
  std::size_t size() const { return p.size(); }
};

// Unique tau with sum_i p_i^q r_i^(-tau) = 1; residual below 1e-10.
double solve_tau(const LocalCoefficients& c, double q);

// alpha(q) = tau'(q) given tau = solve_tau(c, q).
double tau_derivative(const LocalCoefficients& c, double q, double tau);

// d alpha / dq = tau''(q) (non-positive).
double alpha_slope(const LocalCoefficients& c, double q, double tau);

// sum p log p / sum p log r.
double entropy_dim_formula(const LocalCoefficients& c);

struct AlphaBounds {
  double min = 0.0;
  double max = 0.0;
  bool degenerate() const;
};

AlphaBounds alpha_bounds(const LocalCoefficients& c);

struct LegendrePoint {
  double alpha = 0.0;
  double q_star = 0.0;  // +inf at alpha_min, -inf at alpha_max (non-degenerate case)
  double tau = 0.0;     // tau(q_star); nan at the endpoints
  double f = 0.0;
};

// Bracket used for the Newton search on q.
inline constexpr double kLegendreQBound = 50.0;

// f(alpha) = inf_q { alpha q - tau(q) }. Throws DomainError for alpha outside
// [alpha_min, alpha_max] or interior alpha whose q* leaves [-50, 50].
LegendrePoint legendre(const LocalCoefficients& c, double alpha);

// (p_i^q* r_i^(-tau*))_i; a probability vector by the implicit equation.
std::vector<double> nu_weights(const LocalCoefficients& c, double alpha);

// Per-word data for the decay sums: log mu_w, log r_w (product of the ratios
// evaluated at x_w) and the local coefficients at x_w.
struct WordTerm {
  double log_mass = 0.0;
  double log_ratio = 0.0;
  LocalCoefficients coefficients;
};

struct DecayReport {
  double alpha = 0.0;
  double eta = 0.0;
  double delta = 0.0;
  std::vector<int> levels;
  std::vector<double> log_sum_lower;  // log sum mu^(q-delta) r^(delta(alpha+eta)-tau)
  std::vector<double> log_sum_upper;  // log sum mu^(q+delta) r^(delta(eta-alpha)-tau)
  double gamma_lower = 0.0;           // exp of the fitted slope of log sum vs n
  double gamma_upper = 0.0;
  double max_ratio_lower = 0.0;       // max over n of consecutive sum ratios
  double max_ratio_upper = 0.0;
};

// levels[k] holds the word terms of Sigma_{n_k}; level_numbers[k] = n_k.
DecayReport decay_rate_bound(std::span<const std::vector<WordTerm>> levels, std::span<const int> level_numbers,
                             double alpha, double eta, double delta);

}  // namespace moranfrac
