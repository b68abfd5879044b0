#include "moranfrac/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "moranfrac/errors.hpp"
#include "moranfrac/numeric.hpp"

namespace moranfrac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log sum_i p_i^q r_i^(-tau)
double log_partition(const LocalCoefficients& c, double q, double tau) {
  LogSumExp acc;
  for (std::size_t i = 0; i < c.size(); ++i) acc.add(q * std::log(c.p[i]) - tau * std::log(c.r[i]));
  return acc.value();
}

// Normalized weights w_i proportional to p_i^q r_i^(-tau).
std::vector<double> gibbs_weights(const LocalCoefficients& c, double q, double tau) {
  const double z = log_partition(c, q, tau);
  std::vector<double> w(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) w[i] = std::exp(q * std::log(c.p[i]) - tau * std::log(c.r[i]) - z);
  return w;
}

}  // namespace

void LocalCoefficients::validate() const {
  if (p.size() != r.size() || p.size() < 2) throw DomainError("coefficients need matching p, r of length >= 2");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0 && p[i] < 1.0)) throw DomainError("p_i must lie in (0,1)");
    if (!(r[i] > 0.0 && r[i] < 1.0)) throw DomainError("r_i must lie in (0,1)");
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DomainError("p must sum to 1");
}

double solve_tau(const LocalCoefficients& c, double q) {
  // g(tau) = log sum p^q r^-tau is strictly increasing and convex in tau.
  double s0 = 0.0;
  {
    double max_logp = 0.0, min_logr = kInf;
    for (std::size_t i = 0; i < c.size(); ++i) {
      max_logp = std::max(max_logp, std::abs(std::log(c.p[i])));
      min_logr = std::min(min_logr, std::abs(std::log(c.r[i])));
    }
    s0 = std::max(1.0, max_logp / min_logr);
  }
  double lo = -2.0 * s0, hi = 2.0 * s0;
  while (log_partition(c, q, lo) > 0.0) lo *= 2.0;
  while (log_partition(c, q, hi) < 0.0) hi *= 2.0;

  double tau = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    const double g = log_partition(c, q, tau);
    if (std::abs(g) < 1e-15) return tau;
    if (g < 0.0) lo = tau;
    else hi = tau;
    // g'(tau) = -sum w_i log r_i > 0
    double slope = 0.0;
    const auto w = gibbs_weights(c, q, tau);
    for (std::size_t i = 0; i < c.size(); ++i) slope -= w[i] * std::log(c.r[i]);
    const double newton = tau - g / slope;
    tau = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
  }
  return tau;
}

double tau_derivative(const LocalCoefficients& c, double q, double tau) {
  const auto w = gibbs_weights(c, q, tau);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    num += w[i] * std::log(c.p[i]);
    den += w[i] * std::log(c.r[i]);
  }
  return num / den;
}

double alpha_slope(const LocalCoefficients& c, double q, double tau) {
  const auto w = gibbs_weights(c, q, tau);
  const double alpha = tau_derivative(c, q, tau);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double u = std::log(c.p[i]) - alpha * std::log(c.r[i]);
    num += w[i] * u * u;
    den += w[i] * std::log(c.r[i]);
  }
  return num / den;
}

double entropy_dim_formula(const LocalCoefficients& c) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    num += c.p[i] * std::log(c.p[i]);
    den += c.p[i] * std::log(c.r[i]);
  }
  return num / den;
}

bool AlphaBounds::degenerate() const { return max - min <= 1e-12 * std::max(1.0, std::abs(max)); }

AlphaBounds alpha_bounds(const LocalCoefficients& c) {
  AlphaBounds b{kInf, -kInf};
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double a = std::log(c.p[i]) / std::log(c.r[i]);
    b.min = std::min(b.min, a);
    b.max = std::max(b.max, a);
  }
  return b;
}

LegendrePoint legendre(const LocalCoefficients& c, double alpha) {
  const AlphaBounds bounds = alpha_bounds(c);
  const double tol = 1e-12 * std::max(1.0, std::abs(alpha));
  if (alpha < bounds.min - tol || alpha > bounds.max + tol) {
    throw DomainError("alpha " + format_double(alpha) + " outside [" + format_double(bounds.min) + ", " +
                      format_double(bounds.max) + "]");
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (bounds.degenerate()) return {alpha, 1.0, 0.0, alpha};
  if (std::abs(alpha - bounds.min) <= tol) return {alpha, kInf, nan, 0.0};
  if (std::abs(alpha - bounds.max) <= tol) return {alpha, -kInf, nan, 0.0};

  // alpha(q) is strictly decreasing; find q with alpha(q) = alpha.
  auto residual = [&](double q) { return tau_derivative(c, q, solve_tau(c, q)) - alpha; };
  double lo = -kLegendreQBound, hi = kLegendreQBound;
  if (residual(lo) < 0.0 || residual(hi) > 0.0) {
    throw DomainError("alpha " + format_double(alpha) + " too close to an endpoint of the spectrum");
  }
  double q = 1.0;  // the entropy dimension sits at q = 1
  for (int iter = 0; iter < 200; ++iter) {
    const double tau = solve_tau(c, q);
    const double h = tau_derivative(c, q, tau) - alpha;
    if (std::abs(h) < 1e-14) break;
    if (h > 0.0) lo = q;
    else hi = q;
    const double slope = alpha_slope(c, q, tau);
    const double newton = slope < 0.0 ? q - h / slope : 0.5 * (lo + hi);
    q = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
    if (hi - lo < 1e-14) break;
  }
  const double tau = solve_tau(c, q);
  return {alpha, q, tau, alpha * q - tau};
}

std::vector<double> nu_weights(const LocalCoefficients& c, double alpha) {
  const LegendrePoint lp = legendre(c, alpha);
  if (alpha_bounds(c).degenerate()) return c.p;
  if (!std::isfinite(lp.q_star)) throw DomainError("nu weights need alpha strictly inside the spectrum");
  std::vector<double> w(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) w[i] = std::pow(c.p[i], lp.q_star) * std::pow(c.r[i], -lp.tau);
  return w;
}

DecayReport decay_rate_bound(std::span<const std::vector<WordTerm>> levels, std::span<const int> level_numbers,
                             double alpha, double eta, double delta) {
  if (levels.size() != level_numbers.size()) throw DomainError("decay_rate_bound: level count mismatch");
  DecayReport report;
  report.alpha = alpha;
  report.eta = eta;
  report.delta = delta;

  // q_w and tau_w only depend on the coefficients; constant models hit the cache.
  std::map<std::pair<std::vector<double>, std::vector<double>>, std::pair<double, double>> cache;
  auto legendre_at = [&](const LocalCoefficients& c) {
    auto key = std::make_pair(c.p, c.r);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const LegendrePoint lp = legendre(c, alpha);
    if (!std::isfinite(lp.q_star)) throw DomainError("decay sums need alpha strictly inside every local spectrum");
    return cache.emplace(std::move(key), std::make_pair(lp.q_star, lp.tau)).first->second;
  };

  for (std::size_t k = 0; k < levels.size(); ++k) {
    LogSumExp lower, upper;
    for (const WordTerm& t : levels[k]) {
      const auto [q, tau] = legendre_at(t.coefficients);
      lower.add((q - delta) * t.log_mass + (delta * (alpha + eta) - tau) * t.log_ratio);
      upper.add((q + delta) * t.log_mass + (delta * (eta - alpha) - tau) * t.log_ratio);
    }
    report.levels.push_back(level_numbers[k]);
    report.log_sum_lower.push_back(lower.value());
    report.log_sum_upper.push_back(upper.value());
  }

  if (report.levels.size() >= 2) {
    std::vector<double> n(report.levels.begin(), report.levels.end());
    report.gamma_lower = std::exp(fit_line(n, report.log_sum_lower).slope);
    report.gamma_upper = std::exp(fit_line(n, report.log_sum_upper).slope);
    report.max_ratio_lower = report.max_ratio_upper = -kInf;
    for (std::size_t k = 1; k < n.size(); ++k) {
      const double dn = n[k] - n[k - 1];
      report.max_ratio_lower =
          std::max(report.max_ratio_lower, std::exp((report.log_sum_lower[k] - report.log_sum_lower[k - 1]) / dn));
      report.max_ratio_upper =
          std::max(report.max_ratio_upper, std::exp((report.log_sum_upper[k] - report.log_sum_upper[k - 1]) / dn));
    }
  }
  return report;
}

}  // namespace moranfrac
