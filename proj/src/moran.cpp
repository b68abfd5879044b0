#include "moranfrac/moran.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "moranfrac/errors.hpp"
#include "moranfrac/numeric.hpp"

namespace moranfrac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_probability_vector(const std::vector<double>& p, const char* name) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v > 0.0 && v < 1.0)) throw ConfigError(std::string(name) + " entries must lie in (0,1)");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError(std::string(name) + " must sum to 1");
}

void check_ratios(const std::vector<double>& r, const char* name) {
  for (double v : r) {
    if (!(v > 0.0 && v < 1.0)) throw ConfigError(std::string(name) + " entries must lie in (0,1)");
  }
}

std::vector<double> lerp(const std::vector<double>& left, const std::vector<double>& right, double x) {
  std::vector<double> out(left.size());
  for (std::size_t i = 0; i < left.size(); ++i) out[i] = left[i] + x * (right[i] - left[i]);
  return out;
}

MoranCell descend_leftmost(const MoranConstruction& construction, MoranCell cell, int max_steps) {
  for (int step = 0; step < max_steps && cell.diam >= 1e-14; ++step) cell = construction.child(cell, 1);
  return cell;
}

}  // namespace

CoefficientModel CoefficientModel::constant(std::vector<double> p, std::vector<double> r) {
  CoefficientModel model;
  model.kind_ = ModelKind::constant;
  model.p_left_ = p;
  model.p_right_ = std::move(p);
  model.r_left_ = r;
  model.r_right_ = std::move(r);
  return model;
}

CoefficientModel CoefficientModel::affine(std::vector<double> p_left, std::vector<double> p_right,
                                          std::vector<double> r_left, std::vector<double> r_right) {
  CoefficientModel model;
  model.kind_ = ModelKind::affine;
  model.p_left_ = std::move(p_left);
  model.p_right_ = std::move(p_right);
  model.r_left_ = std::move(r_left);
  model.r_right_ = std::move(r_right);
  return model;
}

LocalCoefficients CoefficientModel::at(Point x) const {
  if (kind_ == ModelKind::constant) return {p_left_, r_left_};
  LocalCoefficients c{lerp(p_left_, p_right_, x), lerp(r_left_, r_right_, x)};
  double sum = 0.0;
  for (double v : c.p) sum += v;
  for (double& v : c.p) v /= sum;
  return c;
}

double CoefficientModel::min_ratio() const {
  // r_i is affine in x, so extremes sit at the endpoints.
  double lo = kInf;
  for (std::size_t i = 0; i < r_left_.size(); ++i) lo = std::min({lo, r_left_[i], r_right_[i]});
  return lo;
}

double CoefficientModel::max_ratio_sum() const {
  double left = 0.0, right = 0.0;
  for (std::size_t i = 0; i < r_left_.size(); ++i) {
    left += r_left_[i];
    right += r_right_[i];
  }
  return std::max(left, right);
}

void CoefficientModel::validate(double gap) const {
  const std::size_t m = p_left_.size();
  if (m < 2) throw ConfigError("alphabet size m must be at least 2");
  if (p_right_.size() != m || r_left_.size() != m || r_right_.size() != m) {
    throw ConfigError("p and r vectors must all have length m");
  }
  check_probability_vector(p_left_, kind_ == ModelKind::constant ? "p" : "p_left");
  check_probability_vector(p_right_, "p_right");
  check_ratios(r_left_, kind_ == ModelKind::constant ? "r" : "r_left");
  check_ratios(r_right_, "r_right");
  if (!(gap > 0.0 && gap < 1.0 / static_cast<double>(m + 1))) {
    throw ConfigError("gap fraction must lie in (0, 1/(m+1))");
  }
  const double room = 1.0 - static_cast<double>(m + 1) * gap;
  for (int k = 0; k <= 64; ++k) {
    const double x = k / 64.0;
    const LocalCoefficients c = at(x);
    double sum = 0.0;
    for (double v : c.r) sum += v;
    if (sum > room + 1e-12) {
      throw ConfigError("infeasible ratios at x=" + format_double(x) + ": sum r_i(x) = " + format_double(sum) +
                        " exceeds 1-(m+1)g = " + format_double(room));
    }
  }
}

void MoranConfig::validate() const {
  model.validate(gap);
  if (depth < 1) throw ConfigError("depth must be at least 1");
  if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
  level_size(model.m(), depth, cell_budget);
}

MoranConstruction::MoranConstruction(MoranConfig config) : config_(std::move(config)) {}

MoranCell MoranConstruction::child(const MoranCell& parent, Symbol s) const {
  const int m = this->m();
  if (s < 1 || s > m) throw DomainError("child symbol outside 1..m");
  const LocalCoefficients c = config_.model.at(parent.anchor());
  double ratio_sum = 0.0;
  for (double v : c.r) ratio_sum += v;
  const double leftover = 1.0 - ratio_sum;
  double offset = 0.0;
  for (int j = 0; j + 1 < s; ++j) offset += c.r[static_cast<std::size_t>(j)];
  if (config_.layout == GapLayout::equal) {
    offset += leftover / (m + 1) * s;
  } else {
    offset += leftover / m * (s - 1);
  }
  MoranCell out;
  out.a = parent.a + parent.diam * offset;
  out.diam = c.r[s - 1u] * parent.diam;
  out.log_mass = parent.log_mass + std::log(c.p[s - 1u]);
  return out;
}

std::vector<MoranCell> MoranConstruction::children(const MoranCell& parent) const {
  std::vector<MoranCell> out;
  out.reserve(static_cast<std::size_t>(m()));
  for (int s = 1; s <= m(); ++s) out.push_back(child(parent, static_cast<Symbol>(s)));
  return out;
}

std::vector<MoranCell> MoranConstruction::path(const Word& w) const {
  w.validate(m());
  std::vector<MoranCell> out{root()};
  out.reserve(w.length() + 1);
  for (std::size_t i = 0; i < w.length(); ++i) out.push_back(child(out.back(), w[i]));
  return out;
}

MoranCell MoranConstruction::cell(const Word& w) const { return path(w).back(); }

double MoranConstruction::inner_ball_constant() const { return 0.5 * (1.0 - config_.gap); }

double MoranConstruction::ratio_constant() const { return 1.0 / config_.model.min_ratio(); }

double MoranConstruction::threshold(int n) const { return std::ldexp(config_.kappa, -n); }

LimitPoint limit_point(const MoranConstruction& construction, const Word& w, int max_steps) {
  const MoranCell end = descend_leftmost(construction, construction.cell(w), max_steps);
  return {end.a, end.diam};
}

MoranTree MoranTree::build(const MoranConfig& config) {
  config.validate();
  MoranTree tree{MoranConstruction(config)};
  const auto& construction = tree.construction_;
  tree.levels_.push_back({construction.root()});
  for (int k = 1; k <= config.depth; ++k) {
    const auto& parents = tree.levels_.back();
    std::vector<MoranCell> next;
    next.reserve(parents.size() * static_cast<std::size_t>(config.model.m()));
    for (const MoranCell& parent : parents) {
      for (int s = 1; s <= config.model.m(); ++s) next.push_back(construction.child(parent, static_cast<Symbol>(s)));
    }
    tree.levels_.push_back(std::move(next));
  }
  return tree;
}

const MoranCell& MoranTree::cell(const Word& w) const {
  w.validate(m());
  if (static_cast<int>(w.length()) > depth()) throw DomainError("word " + to_string(w) + " deeper than the tree");
  return cell(static_cast<int>(w.length()), lex_index(w, m()));
}

std::pair<std::uint64_t, std::uint64_t> MoranTree::descendant_range(int k, std::uint64_t index, int deep) const {
  std::uint64_t span = 1;
  for (int j = k; j < deep; ++j) span *= static_cast<std::uint64_t>(m());
  return {index * span, (index + 1) * span - 1};
}

Section MoranTree::section(int n) const {
  const double t = construction_.threshold(n);
  Section out;
  std::vector<std::pair<int, std::uint64_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [k, i] = stack.back();
    stack.pop_back();
    const MoranCell& c = cell(k, i);
    if (c.diam <= t) {
      out.push_back({k, i, c});
      continue;
    }
    if (k == depth()) throw SectionIncomplete(n, to_string(word(k, i)));
    for (int s = m(); s >= 1; --s) {
      stack.emplace_back(k + 1, i * static_cast<std::uint64_t>(m()) + static_cast<std::uint64_t>(s - 1));
    }
  }
  return out;
}

int MoranTree::max_scale() const {
  double widest = 0.0;
  for (const MoranCell& c : levels_.back()) widest = std::max(widest, c.diam);
  int n = static_cast<int>(std::floor(std::log2(kappa() / widest)));
  while (construction_.threshold(n + 1) >= widest) ++n;
  while (construction_.threshold(n) < widest) --n;
  return n;
}

ConditionReport verify_conditions(const MoranTree& tree, const ConditionOptions& options) {
  ConditionReport report;
  report.seed = options.seed;
  report.c0 = tree.c0();
  report.c1 = tree.c1();
  report.lambda = report.c0 * report.c1 + 1.0;
  const auto& construction = tree.construction();
  const int m = tree.m();
  const int depth = tree.depth();
  const double gap = tree.config().gap;

  // M1, M2, M3, M5 and mass conservation over every built cell.
  report.min_gap_fraction = kInf;
  for (int k = 0; k <= depth; ++k) {
    const auto& cells = tree.level(k);
    LogSumExp mass;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const MoranCell& c = cells[i];
      mass.add(c.log_mass);
      const double mid = c.midpoint();
      const double radius = report.c0 * c.diam;
      if (mid - radius < c.a || mid + radius > c.b()) report.inner_ball_contained = false;
      if (k == depth) continue;
      const auto first = static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(m);
      for (int s = 0; s < m; ++s) {
        const MoranCell& child = tree.cell(k + 1, first + static_cast<std::uint64_t>(s));
        // Positions carry absolute rounding error of a few ulps of 1.
        const double slack = 4.0 * kEps * (std::abs(c.a) + c.diam);
        if (child.a < c.a - slack || child.b() > c.b() + slack) report.disjoint_children = false;
        report.max_diam_ratio = std::max(report.max_diam_ratio, c.diam / child.diam);
        if (s > 0) {
          const MoranCell& left = tree.cell(k + 1, first + static_cast<std::uint64_t>(s - 1));
          const double fraction = (child.a - left.b()) / c.diam;
          report.min_gap_fraction = std::min(report.min_gap_fraction, fraction);
          report.gap_roundoff = std::max(report.gap_roundoff, slack / c.diam);
          if (fraction < gap * (1.0 - 1e-12) - slack / c.diam) report.disjoint_children = false;
        }
      }
    }
    report.max_mass_error = std::max(report.max_mass_error, std::abs(mass.value()));
  }

  // Sampled words at the deepest level for M6 and M8.
  std::mt19937_64 rng(split_seed(options.seed, 0));
  std::vector<Word> samples;
  for (int s = 0; s < options.samples; ++s) {
    std::vector<Symbol> symbols(static_cast<std::size_t>(depth));
    for (auto& sym : symbols) sym = static_cast<Symbol>(rng() % static_cast<std::uint64_t>(m) + 1);
    samples.emplace_back(std::move(symbols));
  }

  std::vector<double> m6_values;
  for (const Word& w : samples) {
    const Point x = limit_point(construction, w).point;
    const LocalCoefficients c = construction.model().at(x);
    double product = 1.0;
    for (std::size_t i = 0; i < w.length(); ++i) product *= c.r[w[i] - 1u];
    m6_values.push_back(std::log(tree.cell(w).diam) / std::log(product));
  }

  // M7: E-centered balls inside each section cell, located through descendants.
  std::vector<double> m7_values;
  for (int n = 0;; ++n) {
    Section sec;
    try {
      sec = tree.section(n);
    } catch (const SectionIncomplete&) {
      break;
    }
    const bool deep_enough = std::all_of(sec.begin(), sec.end(), [&](const SectionCell& s) {
      return s.level + options.m7_lookahead <= depth;
    });
    if (!deep_enough) break;
    double c_n = kInf;
    for (const SectionCell& s : sec) {
      const int deep = s.level + options.m7_lookahead;
      const auto [first, last] = tree.descendant_range(s.level, s.index, deep);
      double best = 0.0;
      for (std::uint64_t j = first; j <= last; ++j) {
        const MoranCell& d = tree.cell(deep, j);
        best = std::max(best, std::min(d.a - s.cell.a, s.cell.b() - d.b()));
      }
      c_n = std::min(c_n, best / std::ldexp(1.0, -n));
    }
    m7_values.push_back(c_n);
  }

  // M8: n(w, r) = max{n : B(x_w, r) meets E only inside E_{w|n}}.
  std::vector<double> radii = options.radii;
  if (radii.empty()) {
    for (int k = 6; k <= 14; ++k) radii.push_back(std::ldexp(1.0, -k));
  }
  const auto& deepest = tree.level(depth);
  std::vector<double> m8_values;
  for (const Word& w : samples) {
    M8Sample sample;
    sample.word = w;
    sample.point = limit_point(construction, w).point;
    sample.radii = radii;
    std::vector<double> dist(static_cast<std::size_t>(depth) + 1, kInf);
    for (int n = 1; n <= depth; ++n) {
      const auto idx = lex_index(w.prefix(static_cast<std::size_t>(n)), m);
      const auto [first, last] = tree.descendant_range(n, idx, depth);
      double d = kInf;
      if (first > 0) d = std::min(d, sample.point - deepest[first - 1].b());
      if (last + 1 < deepest.size()) d = std::min(d, deepest[last + 1].a - sample.point);
      dist[static_cast<std::size_t>(n)] = d;
    }
    std::vector<double> log_r, log_diam;
    for (double r : radii) {
      int level = 0;
      while (level < depth && dist[static_cast<std::size_t>(level) + 1] > r) ++level;
      const double ld = std::log(tree.cell(w.prefix(static_cast<std::size_t>(level))).diam);
      sample.levels.push_back(level);
      const double ratio = level == 0 ? kInf : std::log(r) / ld;
      sample.ratios.push_back(ratio);
      m8_values.push_back(ratio);
      log_r.push_back(std::log(r));
      log_diam.push_back(ld);
    }
    if (radii.size() >= 2) sample.slope_ratio = 1.0 / fit_line(log_r, log_diam).slope;
    report.m8_samples.push_back(std::move(sample));
  }

  auto stats = [](const std::vector<double>& v) {
    RangeStats s;
    if (v.empty()) return s;
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    s.count = v.size();
    return s;
  };
  report.m6 = stats(m6_values);
  report.m7 = stats(m7_values);
  report.m8 = stats(m8_values);
  return report;
}

std::vector<WordTerm> word_terms(const MoranTree& tree, int n, CoefficientSite site) {
  const auto& construction = tree.construction();
  const auto& cells = tree.level(n);
  std::vector<WordTerm> out;
  out.reserve(cells.size());
  for (std::uint64_t i = 0; i < cells.size(); ++i) {
    const MoranCell& cell = cells[i];
    const Point x = site == CoefficientSite::anchor ? cell.a : descend_leftmost(construction, cell, 4096).a;
    WordTerm term;
    term.coefficients = construction.model().at(x);
    term.log_mass = cell.log_mass;
    const Word w = tree.word(n, i);
    for (std::size_t k = 0; k < w.length(); ++k) term.log_ratio += std::log(term.coefficients.r[w[k] - 1u]);
    out.push_back(std::move(term));
  }
  return out;
}

}  // namespace moranfrac
