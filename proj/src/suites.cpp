#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "moranfrac/cli.hpp"
#include "moranfrac/covering.hpp"
#include "moranfrac/errors.hpp"
#include "moranfrac/estimators.hpp"
#include "moranfrac/multifractal.hpp"
#include "moranfrac/numeric.hpp"
#include "moranfrac/pathologies.hpp"
#include "moranfrac/theory.hpp"

namespace moranfrac::cli {

namespace {

Check at_most(std::string name, double measured, double threshold) {
  return {std::move(name), measured <= threshold, measured, threshold, "<=", threshold - measured};
}

Check at_least(std::string name, double measured, double threshold) {
  return {std::move(name), measured >= threshold, measured, threshold, ">=", measured - threshold};
}

Check equals(std::string name, double measured, double expected) {
  return {std::move(name), measured == expected, measured, expected, "==", -std::abs(measured - expected)};
}

MoranConfig constant(std::vector<double> p, std::vector<double> r, int depth) {
  MoranConfig config;
  config.model = CoefficientModel::constant(std::move(p), std::move(r));
  config.depth = depth;
  return config;
}

SuiteResult covering_suite(std::uint64_t seed) {
  SuiteResult out{"covering", {}};
  std::mt19937_64 rng(split_seed(seed, 1));

  {
    std::vector<Point> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
    const Packing p = maximal_packing(grid, 0.15);
    out.checks.push_back(equals("grid_packing_count", static_cast<double>(p.balls.size()), 3.0));
  }

  double worst_cover = 0.0;
  bool separated = true;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point> pts(200);
    for (auto& x : pts) x = unit_interval(rng());
    const double delta = 0.001 + 0.1 * unit_interval(rng());
    const Packing p = maximal_packing(pts, delta);
    separated = separated && p.is_packing();
    for (Point x : pts) {
      double best = 1e300;
      for (const Ball& b : p.balls) best = std::min(best, distance(x, b.center));
      worst_cover = std::max(worst_cover, best / (2.0 * delta));
    }
  }
  out.checks.push_back(equals("maximal_packing_separated", separated ? 1.0 : 0.0, 1.0));
  out.checks.push_back(at_most("maximal_packing_cover_ratio", worst_cover, 1.0));

  double worst_fill = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double big = 0.01 + 0.99 * unit_interval(rng());
    const double small = big * (0.005 + 0.995 * unit_interval(rng()));
    const CardinalityReport rep = check_cardinality_bound(big, small, unit_interval(rng()), rng() | 1);
    worst_fill = std::max(worst_fill, static_cast<double>(rep.count) / rep.bound);
  }
  out.checks.push_back(at_most("cardinality_count_over_3R_per_r", worst_fill, 1.0));

  const double lambda = 0.25;
  std::vector<double> unit;
  double x = 0.0;
  for (int i = 0; i < 200; ++i) {
    x += 2.0 * lambda + 0.125 * static_cast<double>(rng() % 24 + 1);
    unit.push_back(x);
  }
  std::shuffle(unit.begin(), unit.end(), rng);
  std::set<std::size_t> counts;
  for (int k = 1; k <= 10; ++k) {
    const double delta = std::ldexp(1.0, -k);
    std::vector<Ball> balls;
    for (double c : unit) balls.push_back({c * delta, delta});
    counts.insert(decompose_into_packings(balls, lambda).size());
  }
  out.checks.push_back(equals("decomposition_distinct_counts_over_scales", static_cast<double>(counts.size()), 1.0));
  out.checks.push_back(at_most("decomposition_count", static_cast<double>(*counts.rbegin()),
                               static_cast<double>(packing_count_bound(lambda))));

  const MoranTree tree = MoranTree::build(constant({0.2, 0.8}, {1.0 / 3, 1.0 / 3}, 12));
  std::size_t outside = 0, gaps = 0;
  double worst_mass = 0.0;
  for (int n = 1; n <= tree.max_scale(); ++n) {
    const MoranPartition part = moran_partition(tree, n);
    Packing witnesses;
    LogSumExp mass;
    for (std::size_t i = 0; i < part.cells.size(); ++i) {
      const PartitionCell& cell = part.cells[i];
      if (!part.inside_witness(cell)) ++outside;
      witnesses.balls.push_back(cell.witness);
      mass.add(cell.log_mass);
      if (i + 1 < part.cells.size()) {
        const PartitionCell& next = part.cells[i + 1];
        if (cell.hi != next.lo || cell.hi_closed == next.lo_closed) ++gaps;
      }
    }
    if (part.cells.front().lo != 0.0 || part.cells.back().hi != 1.0) ++gaps;
    if (!witnesses.is_packing()) ++outside;
    worst_mass = std::max(worst_mass, std::abs(mass.value()));
  }
  out.checks.push_back(equals("partition_cells_outside_lambda_ball", static_cast<double>(outside), 0.0));
  out.checks.push_back(equals("partition_tiling_defects", static_cast<double>(gaps), 0.0));
  out.checks.push_back(at_most("partition_log_mass_error", worst_mass, 1e-9));
  return out;
}

SuiteResult moran_suite(std::uint64_t seed) {
  SuiteResult out{"moran", {}};
  ConditionOptions options;
  options.seed = seed;
  const MoranTree hom = MoranTree::build(constant({0.5, 0.5}, {1.0 / 3, 1.0 / 3}, 20));
  const ConditionReport h = verify_conditions(hom, options);
  MoranConfig affine;
  affine.model = CoefficientModel::affine({0.5, 0.5}, {0.5, 0.5}, {0.3, 0.35}, {0.35, 0.3});
  affine.depth = 20;
  const ConditionReport a = verify_conditions(MoranTree::build(affine), options);

  out.checks.push_back(equals("m1_m2_disjoint_children", h.disjoint_children && a.disjoint_children ? 1.0 : 0.0, 1.0));
  out.checks.push_back(at_least("m2_min_gap_fraction", std::min(h.min_gap_fraction, a.min_gap_fraction),
                                hom.config().gap * (1.0 - 1e-12) - std::max(h.gap_roundoff, a.gap_roundoff)));
  out.checks.push_back(equals("m3_inner_ball", h.inner_ball_contained && a.inner_ball_contained ? 1.0 : 0.0, 1.0));
  out.checks.push_back(at_most("m5_diam_ratio_homogeneous", h.max_diam_ratio, h.c1 + 1e-12));
  out.checks.push_back(at_most("m5_diam_ratio_affine", a.max_diam_ratio, a.c1 + 1e-12));
  out.checks.push_back(at_most("mass_conservation", std::max(h.max_mass_error, a.max_mass_error), 1e-9));
  out.checks.push_back(equals("m6_constant_min", h.m6.min, 1.0));
  out.checks.push_back(equals("m6_constant_max", h.m6.max, 1.0));
  out.checks.push_back(at_least("m6_affine_min", a.m6.min, 0.95));
  out.checks.push_back(at_most("m6_affine_max", a.m6.max, 1.05));
  out.checks.push_back(at_least("m7_constant", h.m7.min, hom.config().gap * hom.kappa() / 4.0));
  out.checks.push_back(at_least("m8_ratio_min", h.m8.min, 0.9));
  out.checks.push_back(at_most("m8_ratio_max", h.m8.max, 1.1));
  return out;
}

SuiteResult sandwich_suite(std::uint64_t seed) {
  SuiteResult out{"sandwich", {}};
  const MoranTree tree = MoranTree::build(constant({0.5, 0.5}, {1.0 / 3, 1.0 / 3}, 20));
  const Window window = default_window(tree);
  const double qs[] = {0.8, 1.2};
  const auto est = tau_spectrum(tree, Region::whole_space(), qs, window);
  const double dim_08 = est[0].tau_slope / (0.8 - 1.0);
  const double dim_12 = est[1].tau_slope / (1.2 - 1.0);
  std::mt19937_64 rng(split_seed(seed, 4));
  double lo = 1e300, hi = -1e300;
  for (int s = 0; s < 10; ++s) {
    std::vector<Symbol> symbols(20);
    for (auto& sym : symbols) sym = static_cast<Symbol>(rng() % 2 + 1);
    const double v = local_dim_partition(tree.construction(), Word(symbols), window).last_finite();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  out.checks.push_back(at_least("local_dim_min_vs_dim_1.2", lo, dim_12 - 0.05));
  out.checks.push_back(at_most("local_dim_max_vs_dim_0.8", hi, dim_08 + 0.05));
  const double below[] = {0.2, 0.5, 0.8};
  const double above[] = {1.2, 2.0, 3.0};
  double worst = -1e300;
  for (int n = 1; n <= tree.max_scale(); ++n) {
    const ChainReport r = discrete_chain(tree, n, below, above);
    worst = std::max({worst, r.worst_below, r.worst_above, r.worst_convexity});
  }
  out.checks.push_back(at_most("per_scale_chain_defect", worst, 1e-9));
  return out;
}

SuiteResult decay_suite(std::uint64_t) {
  SuiteResult out{"decay", {}};
  const std::vector<double> p{0.2, 0.8};
  const MoranTree tree = MoranTree::build(constant(p, {1.0 / 3, 1.0 / 3}, 18));
  const LocalCoefficients c{p, {1.0 / 3, 1.0 / 3}};
  const double alpha = tau_derivative(c, 2.0, solve_tau(c, 2.0));
  std::vector<std::vector<WordTerm>> levels;
  std::vector<int> numbers;
  for (int n = 1; n <= 18; ++n) {
    levels.push_back(word_terms(tree, n));
    numbers.push_back(n);
  }
  const DecayReport d = decay_rate_bound(levels, numbers, alpha, 0.1, 0.05);
  out.checks.push_back(at_most("gamma_lower_sum", d.gamma_lower, 0.999));
  out.checks.push_back(at_most("gamma_upper_sum", d.gamma_upper, 0.999));
  const DecayReport wide = decay_rate_bound(levels, numbers, alpha, 0.2, 0.05);
  out.checks.push_back(at_most("gamma_lower_sum_double_eta", wide.gamma_lower, 0.999));
  out.checks.push_back(at_most("gamma_upper_sum_double_eta", wide.gamma_upper, 0.999));
  const DecayReport flat = decay_rate_bound(levels, numbers, alpha, 0.1, 0.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < flat.levels.size(); ++k) {
    worst = std::max({worst, std::abs(std::exp(flat.log_sum_lower[k]) - 1.0),
                      std::abs(std::exp(flat.log_sum_upper[k]) - 1.0)});
  }
  out.checks.push_back(at_most("delta_zero_sum_minus_one", worst, 1e-9));
  return out;
}

SuiteResult counterexample_suite(std::uint64_t) {
  SuiteResult out{"counterexample", {}};
  const AtomicMixture mix = make_mixture(64);
  out.checks.push_back(at_least("partition_ratio_n20_K64", partition_entropy_ratio(mix, 20).ratio, 0.45));
  out.checks.push_back(at_most("direct_quotient_delta_2^-20", direct_entropy_integral(mix, std::ldexp(1.0, -20)), 0.1));
  const double small = partition_entropy_ratio(make_mixture(16), 20).ratio;
  const double large = partition_entropy_ratio(make_mixture(256), 20).ratio;
  out.checks.push_back(at_most("truncation_sensitivity_K16_vs_K256", std::abs(small - large), 0.05));
  return out;
}

SuiteResult formalism_suite(std::uint64_t) {
  SuiteResult out{"formalism", {}};
  const std::vector<double> p{0.2, 0.8};
  const double r = 1.0 / 3;
  const LocalCoefficients c{p, {r, r}};
  const MoranTree tree = MoranTree::build(constant(p, {r, r}, 12));
  const int n = 16;
  const AlphaBounds b = alpha_bounds(c);
  const auto grid = alpha_grid(b.min - 0.2, b.max + 0.2, 0.005);
  const double eps = effective_epsilon(0.05, n);
  const CoarseSpectrum spectrum = coarse_spectrum(tree, Region::whole_space(), n, eps, grid);
  const LegendreComparison cmp = compare_legendre(spectrum, c, 0.1);
  out.checks.push_back(at_most("sup_deviation_interior", cmp.sup_norm, 0.1));
  out.checks.push_back(at_most("max_f_vs_minus_tau0", std::abs(cmp.max_f_emp + solve_tau(c, 0.0)), 0.05));
  std::size_t stray = 0;
  for (std::size_t i = 0; i < spectrum.alpha.size(); ++i) {
    const double a = spectrum.alpha[i];
    if ((a < b.min - eps - 0.05 || a > b.max + eps + 0.05) && spectrum.count[i] > 0) ++stray;
  }
  out.checks.push_back(equals("counts_outside_inflated_band", static_cast<double>(stray), 0.0));
  return out;
}

}  // namespace

bool SuiteResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::vector<std::string> suite_names() { return {"covering", "moran", "sandwich", "decay", "counterexample", "formalism"}; }

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "covering") return covering_suite(seed);
  if (name == "moran") return moran_suite(seed);
  if (name == "sandwich") return sandwich_suite(seed);
  if (name == "decay") return decay_suite(seed);
  if (name == "counterexample") return counterexample_suite(seed);
  if (name == "formalism") return formalism_suite(seed);
  throw ConfigError("unknown suite \"" + name + "\"");
}

}  // namespace moranfrac::cli
