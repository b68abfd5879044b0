#include "moranfrac/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "moranfrac/errors.hpp"
#include "moranfrac/numeric.hpp"

namespace moranfrac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_delta(int n) { return -static_cast<double>(n) * std::log(2.0); }

void check_window(const Window& window) {
  if (window.first < 1 || window.last < window.first) {
    throw DomainError("scale window must satisfy 1 <= first <= last");
  }
}

struct Selection {
  std::vector<double> log_mass;
  double mean_log_diam = 0.0;

  bool empty() const { return log_mass.empty(); }
};

Selection select(const Section& section, const Region& region, MomentMode mode) {
  Selection out;
  out.log_mass.reserve(section.size());
  for (const SectionCell& s : section) {
    const bool keep = mode == MomentMode::meets ? region.meets(s.cell.a, s.cell.b()) : region.covers(s.cell.a, s.cell.b());
    if (!keep) continue;
    out.log_mass.push_back(s.cell.log_mass);
    out.mean_log_diam += std::log(s.cell.diam);
  }
  if (!out.empty()) out.mean_log_diam /= static_cast<double>(out.log_mass.size());
  return out;
}

double log_moment(std::span<const double> log_masses, double q) {
  LogSumExp acc;
  for (double lm : log_masses) acc.add(q * lm);
  return acc.value();
}

// Deepest-level cells as a sorted index for interval mass queries.
class DeepIndex {
 public:
  explicit DeepIndex(const MoranTree& tree) : cells_(tree.level(tree.depth())) {
    a_.reserve(cells_.size());
    b_.reserve(cells_.size());
    for (const MoranCell& c : cells_) {
      a_.push_back(c.a);
      b_.push_back(c.b());
    }
  }

  double max_diam() const {
    double out = 0.0;
    for (const MoranCell& c : cells_) out = std::max(out, c.diam);
    return out;
  }

  // log mass of the cells inside [lo, hi]
  double log_mass_inside(double lo, double hi) const {
    const auto first = static_cast<std::size_t>(std::lower_bound(a_.begin(), a_.end(), lo) - a_.begin());
    const auto end = static_cast<std::size_t>(std::upper_bound(b_.begin(), b_.end(), hi) - b_.begin());
    return range(first, end);
  }

  // log mass of the cells meeting [lo, hi]
  double log_mass_meeting(double lo, double hi) const {
    const auto first = static_cast<std::size_t>(std::lower_bound(b_.begin(), b_.end(), lo) - b_.begin());
    const auto end = static_cast<std::size_t>(std::upper_bound(a_.begin(), a_.end(), hi) - a_.begin());
    return range(first, end);
  }

 private:
  double range(std::size_t first, std::size_t end) const {
    LogSumExp acc;
    for (std::size_t i = first; i < end; ++i) acc.add(cells_[i].log_mass);
    return acc.value();
  }

  const std::vector<MoranCell>& cells_;
  std::vector<double> a_, b_;
};

}  // namespace

Window default_window(const MoranTree& tree) {
  const int last = tree.max_scale();
  return {std::max(1, (last + 1) / 2), std::max(1, last)};
}

double moment_sum(const MoranTree& tree, const Region& region, int n, double q, MomentMode mode) {
  if (q < 0.0 && mode == MomentMode::meets) throw DomainError("negative q needs the inside selection");
  const Selection selection = select(tree.section(n), region, mode);
  if (selection.empty()) throw NoSupport("scale " + std::to_string(n));
  if (q == 1.0 && region.whole) return 0.0;
  return log_moment(selection.log_mass, q);
}

std::vector<SpectrumEstimate> tau_spectrum(const MoranTree& tree, const Region& region, std::span<const double> qs,
                                           Window window, ScaleAxis axis) {
  check_window(window);
  std::vector<SpectrumEstimate> out(qs.size());
  for (std::size_t j = 0; j < qs.size(); ++j) out[j].q = qs[j];
  for (int n = window.first; n <= window.last; ++n) {
    const Section section = tree.section(n);
    const Selection meeting = select(section, region, MomentMode::meets);
    const Selection inside = select(section, region, MomentMode::inside);
    for (SpectrumEstimate& est : out) {
      const Selection& sel = est.q < 0.0 ? inside : meeting;
      if (sel.empty()) throw NoSupport("scale " + std::to_string(n));
      const double log_s = (est.q == 1.0 && region.whole) ? 0.0 : log_moment(sel.log_mass, est.q);
      est.n.push_back(n);
      est.delta.push_back(std::ldexp(1.0, -n));
      est.log_s.push_back(log_s);
      est.tau_scale.push_back(log_s / log_delta(n));
      est.abscissa.push_back(axis == ScaleAxis::dyadic ? log_delta(n) : sel.mean_log_diam);
    }
  }
  for (SpectrumEstimate& est : out) {
    est.tau_min = *std::min_element(est.tau_scale.begin(), est.tau_scale.end());
    if (est.n.size() >= 2) {
      const LinearFit fit = fit_line(est.abscissa, est.log_s);
      est.tau_slope = fit.slope;
      est.tau_stderr = fit.slope_stderr;
    } else {
      est.tau_slope = est.tau_scale.front();
    }
  }
  return out;
}

SpectrumEstimate tau_global(const MoranTree& tree, const Region& region, double q, Window window, ScaleAxis axis) {
  const double qs[] = {q};
  return tau_spectrum(tree, region, qs, window, axis).front();
}

std::vector<SpectrumEstimate> tau_local(const MoranTree& tree, Point x, double q, std::span<const double> radii,
                                        Window window, ScaleAxis axis) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("point outside [0,1]");
  std::vector<SpectrumEstimate> out;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw DomainError("radii must be positive");
    if (i > 0 && radii[i] >= radii[i - 1]) throw DomainError("radii must be decreasing");
    out.push_back(tau_global(tree, Region::in_ball(x, radii[i]), q, window, axis));
  }
  return out;
}

EntropyEstimate entropy_dim(const MoranTree& tree, const Region& region, Window window, ScaleAxis axis) {
  check_window(window);
  EntropyEstimate out;
  std::vector<double> x, y;
  for (int n = window.first; n <= window.last; ++n) {
    double mass = 0.0, numerator = 0.0, weighted_log_diam = 0.0;
    for (const SectionCell& s : tree.section(n)) {
      if (!region.meets(s.cell.a, s.cell.b())) continue;
      const double mu = std::exp(s.cell.log_mass);
      mass += mu;
      numerator += mu * s.cell.log_mass;
      weighted_log_diam += mu * std::log(s.cell.diam);
    }
    if (!(mass > 0.0)) throw DomainError("entropy dimension of a zero-mass region");
    out.n.push_back(n);
    out.delta.push_back(std::ldexp(1.0, -n));
    out.numerator.push_back(numerator);
    out.denominator.push_back(mass * log_delta(n));
    out.ratio.push_back(numerator / (mass * log_delta(n)));
    x.push_back(axis == ScaleAxis::dyadic ? log_delta(n) : weighted_log_diam / mass);
    y.push_back(numerator / mass);
  }
  out.lower = *std::min_element(out.ratio.begin(), out.ratio.end());
  out.upper = *std::max_element(out.ratio.begin(), out.ratio.end());
  out.slope = x.size() >= 2 ? fit_line(x, y).slope : out.ratio.front();
  return out;
}

double ScaleSeries::last_finite() const {
  for (auto it = value.rbegin(); it != value.rend(); ++it) {
    if (std::isfinite(*it)) return *it;
  }
  return kInf;
}

namespace {

void finish_series(ScaleSeries& s) {
  s.lower = kInf;
  s.upper = -kInf;
  for (double v : s.value) {
    if (!std::isfinite(v)) {
      ++s.flagged;
      continue;
    }
    s.lower = std::min(s.lower, v);
    s.upper = std::max(s.upper, v);
  }
}

}  // namespace

ScaleSeries local_dim_partition(const MoranConstruction& construction, const Word& w, Window window) {
  check_window(window);
  const auto path = construction.path(w);
  ScaleSeries out;
  std::size_t k = 0;
  for (int n = window.first; n <= window.last; ++n) {
    const double t = construction.threshold(n);
    while (k < path.size() && path[k].diam > t) ++k;
    if (k == path.size()) throw SectionIncomplete(n, to_string(w));
    out.n.push_back(n);
    out.delta.push_back(std::ldexp(1.0, -n));
    out.value.push_back(path[k].log_mass / log_delta(n));
  }
  finish_series(out);
  return out;
}

ScaleSeries local_dim_partition(const MoranTree& tree, Point x, Window window) {
  check_window(window);
  ScaleSeries out;
  for (int n = window.first; n <= window.last; ++n) {
    const MoranPartition partition = moran_partition(tree, n);
    const PartitionCell& cell = partition.locate(x);
    out.n.push_back(n);
    out.delta.push_back(partition.delta);
    out.value.push_back(cell.owner_kind == OwnerKind::gap ? kInf : cell.log_mass / log_delta(n));
  }
  finish_series(out);
  return out;
}

BallDimSeries local_dim_ball(const MoranTree& tree, Point x, std::span<const double> radii) {
  const DeepIndex index(tree);
  BallDimSeries out;
  for (double r : radii) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("ball radius must lie in (0,1)");
    const double lower = index.log_mass_inside(x - r, x + r);
    const double upper = index.log_mass_meeting(x - r, x + r);
    out.radii.push_back(r);
    out.log_mass_lower.push_back(lower);
    out.log_mass_upper.push_back(upper);
    out.dim_lower.push_back(upper / std::log(r));
    out.dim_upper.push_back(lower / std::log(r));
    out.insufficient.push_back(!(upper - lower <= std::log(10.0)));
  }
  return out;
}

JensenReport jensen_lower_bound_check(const MoranTree& tree, const Ball& region, double delta) {
  const double lo = std::max(0.0, region.center - region.radius);
  const double hi = std::min(1.0, region.center + region.radius);
  const double diam = hi - lo;
  if (!(delta > 0.0 && delta < diam)) throw DomainError("delta must lie in (0, diam(A))");
  const DeepIndex index(tree);
  if (delta < index.max_diam()) throw DomainError("delta below the deepest cell diameter; build deeper");

  const auto& cells = tree.level(tree.depth());
  JensenReport out;
  out.delta = delta;
  double integral = 0.0, mass_inside = 0.0;
  for (const MoranCell& c : cells) {
    if (c.b() < lo || c.a > hi) continue;
    const double mu = std::exp(c.log_mass);
    // Every y in c has B(y, delta) containing [b - delta, a + delta].
    integral += mu * index.log_mass_inside(c.b() - delta, c.a + delta);
    if (c.a >= lo && c.b() <= hi) mass_inside += mu;
  }
  out.integral_lower = integral;
  out.mass_lower = mass_inside;
  out.bound = -1.0 / std::exp(1.0) - mass_inside * (std::log(3.0) + std::log(4.0 * diam / delta));
  out.slack = integral - out.bound;
  out.pass = out.slack >= 0.0;
  return out;
}

double packing_moment_sum(const MoranTree& tree, int n, double q) {
  if (q < 0.0) throw DomainError("packing moment sums are only used for q >= 0");
  const Section section = tree.section(n);
  const double delta = std::ldexp(1.0, -n);
  std::vector<Point> mids;
  mids.reserve(section.size());
  for (const SectionCell& s : section) mids.push_back(s.cell.midpoint());
  const Packing packing = maximal_packing(mids, delta);
  const DeepIndex index(tree);
  LogSumExp acc;
  for (const Ball& b : packing.balls) acc.add(q * index.log_mass_meeting(b.center - b.radius, b.center + b.radius));
  return acc.value();
}

ChainReport discrete_chain(const MoranTree& tree, int n, std::span<const double> below, std::span<const double> above,
                           double tol) {
  const Section section = tree.section(n);
  std::vector<double> log_masses;
  log_masses.reserve(section.size());
  for (const SectionCell& s : section) log_masses.push_back(s.cell.log_mass);
  auto h = [&](double q) { return log_moment(log_masses, q); };

  ChainReport out;
  out.n = n;
  const double h1 = h(1.0);
  double mass = 0.0, entropy = 0.0;
  for (double lm : log_masses) {
    mass += std::exp(lm);
    entropy += std::exp(lm) * lm;
  }
  out.entropy = entropy / mass;
  out.worst_below = -kInf;
  out.worst_above = -kInf;
  for (double q : below) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("chain needs 0 < q < 1 below");
    out.worst_below = std::max(out.worst_below, (h(q) - h1) / (q - 1.0) - out.entropy);
  }
  for (double p : above) {
    if (!(p > 1.0)) throw DomainError("chain needs p > 1 above");
    out.worst_above = std::max(out.worst_above, out.entropy - (h(p) - h1) / (p - 1.0));
  }
  std::vector<double> grid(below.begin(), below.end());
  grid.push_back(1.0);
  grid.insert(grid.end(), above.begin(), above.end());
  out.worst_convexity = -kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      const double defect = h(0.5 * (grid[i] + grid[j])) - 0.5 * (h(grid[i]) + h(grid[j]));
      out.worst_convexity = std::max(out.worst_convexity, defect);
    }
  }
  out.pass = out.worst_below <= tol && out.worst_above <= tol && out.worst_convexity <= tol;
  return out;
}

}  // namespace moranfrac
