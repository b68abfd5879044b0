#include "moranfrac/multifractal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "moranfrac/errors.hpp"
#include "moranfrac/numeric.hpp"

namespace moranfrac {

double effective_epsilon(double epsilon, int n) {
  if (n < 1) throw DomainError("scale index must be positive");
  return std::max(epsilon, 2.0 / static_cast<double>(n));
}

std::vector<double> alpha_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw DomainError("alpha grid needs lo <= hi and a positive step");
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

CoarseSpectrum coarse_spectrum(const MoranTree& tree, const Region& region, int n, double epsilon,
                               std::span<const double> alphas, CoarseNormalization normalization) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (n < 1) throw DomainError("scale index must be positive");
  const Section section = tree.section(n);
  std::vector<double> exponents;
  double sum_log_diam = 0.0;
  for (const SectionCell& s : section) {
    if (!region.meets(s.cell.a, s.cell.b())) continue;
    const double log_diam = std::log(s.cell.diam);
    sum_log_diam += log_diam;
    const double denom = normalization == CoarseNormalization::cell ? log_diam : -n * std::log(2.0);
    exponents.push_back(s.cell.log_mass / denom);
  }
  if (exponents.empty()) throw NoSupport("coarse spectrum at scale " + std::to_string(n));
  std::sort(exponents.begin(), exponents.end());

  CoarseSpectrum out;
  out.n = n;
  out.epsilon = epsilon;
  out.normalization = normalization;
  out.cells = exponents.size();
  out.log_scale = normalization == CoarseNormalization::cell ? -sum_log_diam / static_cast<double>(exponents.size())
                                                              : n * std::log(2.0);
  for (double a : alphas) {
    const auto lo = std::lower_bound(exponents.begin(), exponents.end(), a - epsilon);
    const auto hi = std::upper_bound(exponents.begin(), exponents.end(), a + epsilon);
    const auto count = static_cast<std::size_t>(hi - lo);
    out.alpha.push_back(a);
    out.count.push_back(count);
    out.f.push_back(std::log(static_cast<double>(std::max<std::size_t>(count, 1))) / out.log_scale);
  }
  return out;
}

LegendreComparison compare_legendre(const CoarseSpectrum& spectrum, const LocalCoefficients& coefficients,
                                    double band) {
  coefficients.validate();
  const AlphaBounds bounds = alpha_bounds(coefficients);
  LegendreComparison out;
  out.alpha = spectrum.alpha;
  out.count = spectrum.count;
  out.f_emp = spectrum.f;
  for (std::size_t i = 0; i < spectrum.alpha.size(); ++i) {
    const double a = spectrum.alpha[i];
    double f = 0.0;
    if (a >= bounds.min && a <= bounds.max) {
      try {
        f = legendre(coefficients, a).f;
      } catch (const DomainError&) {
        // q* beyond the clamp: the infimum over the clamped bracket sits at an end.
        const double q = kLegendreQBound;
        f = std::min(a * q - solve_tau(coefficients, q), -a * q - solve_tau(coefficients, -q));
      }
    }
    out.f_theory.push_back(f);
    const double dev = std::abs(spectrum.f[i] - f);
    out.deviation.push_back(dev);
    if (a >= bounds.min + band && a <= bounds.max - band) out.sup_norm = std::max(out.sup_norm, dev);
    out.max_f_emp = std::max(out.max_f_emp, spectrum.f[i]);
  }
  return out;
}

namespace {

NuSample draw_sample(const MoranConstruction& construction, double alpha, int depth, std::uint64_t stream_seed,
                     std::map<std::pair<std::vector<double>, std::vector<double>>, std::vector<double>>& cache) {
  std::mt19937_64 rng(stream_seed);
  std::vector<MoranCell> path{construction.root()};
  std::vector<double> log_nu{0.0};
  for (int level = 0; level < depth; ++level) {
    const MoranCell& cell = path.back();
    const LocalCoefficients c = construction.model().at(cell.anchor());
    auto key = std::make_pair(c.p, c.r);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(std::move(key), nu_weights(c, alpha)).first;
    const std::vector<double>& w = it->second;
    const double u = unit_interval(rng());
    double acc = 0.0;
    std::size_t pick = w.size() - 1;
    for (std::size_t i = 0; i < w.size(); ++i) {
      acc += w[i];
      if (u < acc) {
        pick = i;
        break;
      }
    }
    path.push_back(construction.child(cell, static_cast<Symbol>(pick + 1)));
    log_nu.push_back(log_nu.back() + std::log(w[pick]));
  }

  NuSample s;
  s.point = path.back().a;
  for (const MoranCell& c : path) {
    if (s.point < c.a || s.point > c.b()) s.outside = true;
  }
  const MoranCell& deepest = path.back();
  int n = static_cast<int>(std::floor(std::log2(construction.config().kappa / deepest.diam)));
  while (construction.threshold(n + 1) >= deepest.diam) ++n;
  while (construction.threshold(n) < deepest.diam) --n;
  std::size_t k = 0;
  while (path[k].diam > construction.threshold(n)) ++k;
  s.scale = n;
  const double log_delta = -n * std::log(2.0);
  s.dim_mu = path[k].log_mass / log_delta;
  s.dim_nu = log_nu[k] / log_delta;
  return s;
}

}  // namespace

NuSampleReport nu_sample(const MoranConfig& config, double alpha, std::size_t k, int depth, std::uint64_t seed,
                         unsigned threads) {
  config.model.validate(config.gap);
  if (!(config.kappa > 0.0)) throw ConfigError("kappa must be positive");
  if (depth < 1) throw DomainError("sampling depth must be positive");
  if (k == 0) throw DomainError("need at least one sample");
  const MoranConstruction construction(config);
  // Rejects endpoint alpha before any thread starts.
  nu_weights(config.model.at(0.0), alpha);

  NuSampleReport report;
  report.alpha = alpha;
  report.seed = seed;
  report.depth = depth;
  report.samples.resize(k);

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, k));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  auto worker = [&] {
    std::map<std::pair<std::vector<double>, std::vector<double>>, std::vector<double>> cache;
    try {
      for (std::size_t i = next++; i < k; i = next++) {
        NuSample s = draw_sample(construction, alpha, depth, split_seed(seed, i), cache);
        s.id = i;
        report.samples[i] = s;
      }
    } catch (...) {
      const std::lock_guard<std::mutex> guard(failure_lock);
      if (!failure) failure = std::current_exception();
      next = k;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  double sum_mu = 0.0, sum_nu = 0.0;
  report.last_scale = report.samples.front().scale;
  for (const NuSample& s : report.samples) {
    report.last_scale = std::min(report.last_scale, s.scale);
    sum_mu += s.dim_mu;
    sum_nu += s.dim_nu;
    if (s.outside) ++report.outside;
  }
  const auto count = static_cast<double>(k);
  report.mean_mu = sum_mu / count;
  report.mean_nu = sum_nu / count;
  double var_mu = 0.0, var_nu = 0.0;
  for (const NuSample& s : report.samples) {
    var_mu += (s.dim_mu - report.mean_mu) * (s.dim_mu - report.mean_mu);
    var_nu += (s.dim_nu - report.mean_nu) * (s.dim_nu - report.mean_nu);
  }
  if (k > 1) {
    report.sd_mu = std::sqrt(var_mu / (count - 1.0));
    report.sd_nu = std::sqrt(var_nu / (count - 1.0));
  }
  return report;
}

}  // namespace moranfrac
