#pragma once

// Finite-depth Moran constructions on [0,1] with point-dependent weights and
// contraction ratios. Cells are stored level by level in lexicographic order,
// which on the line is also left-to-right order.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "moranfrac/symbolic.hpp"
#include "moranfrac/theory.hpp"

namespace moranfrac {

using Point = double;

inline double distance(Point x, Point y) { return x > y ? x - y : y - x; }

enum class ModelKind { constant, affine };

// p(x), r(x) on [0,1]. A constant model stores identical left/right endpoints.
class CoefficientModel {
 public:
  static CoefficientModel constant(std::vector<double> p, std::vector<double> r);
  static CoefficientModel affine(std::vector<double> p_left, std::vector<double> p_right, std::vector<double> r_left,
                                 std::vector<double> r_right);

  ModelKind kind() const { return kind_; }
  int m() const { return static_cast<int>(p_left_.size()); }
  const std::vector<double>& p_left() const { return p_left_; }
  const std::vector<double>& p_right() const { return p_right_; }
  const std::vector<double>& r_left() const { return r_left_; }
  const std::vector<double>& r_right() const { return r_right_; }

  // Linear interpolation in x followed by renormalization of p.
  LocalCoefficients at(Point x) const;

  double min_ratio() const;      // min over x in [0,1] and i of r_i(x)
  double max_ratio_sum() const;  // max over x of sum_i r_i(x)

  // Throws ConfigError naming the offending x when the model is infeasible for gap g.
  void validate(double gap) const;

 private:
  ModelKind kind_ = ModelKind::constant;
  std::vector<double> p_left_, p_right_, r_left_, r_right_;
};

// Placement of the m children inside a parent. `equal` uses m+1 equal gaps;
// `left_flush` puts the first child on the parent's left end and splits the
// remaining room into m equal gaps.
enum class GapLayout { equal, left_flush };

struct MoranConfig {
  CoefficientModel model = CoefficientModel::constant({0.5, 0.5}, {1.0 / 3.0, 1.0 / 3.0});
  double gap = 1.0 / 9.0;  // minimum gap fraction g in (0, 1/(m+1))
  int depth = 12;
  double kappa = 1.0;      // section threshold t_n = kappa * 2^-n
  GapLayout layout = GapLayout::equal;
  std::uint64_t cell_budget = std::uint64_t{1} << 22;  // max cells per level

  void validate() const;
};

struct MoranCell {
  Point a = 0.0;
  double diam = 1.0;
  double log_mass = 0.0;

  Point b() const { return a + diam; }
  Point anchor() const { return a; }
  Point midpoint() const { return a + 0.5 * diam; }
};

// Child placement rules, usable without materializing a tree.
class MoranConstruction {
 public:
  explicit MoranConstruction(MoranConfig config);

  const MoranConfig& config() const { return config_; }
  const CoefficientModel& model() const { return config_.model; }
  int m() const { return config_.model.m(); }

  MoranCell root() const { return {}; }
  MoranCell child(const MoranCell& parent, Symbol s) const;
  std::vector<MoranCell> children(const MoranCell& parent) const;

  // Cells E_{w|0}, ..., E_{w|n} along a word.
  std::vector<MoranCell> path(const Word& w) const;
  MoranCell cell(const Word& w) const;

  // C_0: B(midpoint, C_0 diam) lies in every cell. Equals (1 - g)/2.
  double inner_ball_constant() const;
  // C_1 = 1 / min r_i(x); bounds diam(parent)/diam(child).
  double ratio_constant() const;
  double threshold(int n) const;  // kappa * 2^-n

 private:
  MoranConfig config_;
};

struct LimitPoint {
  Point point = 0.0;
  double bound = 0.0;  // |point - x_w| <= bound
};

// x_w := x_{w111...}: descend with symbol 1 until diam < 1e-14 (or max_steps).
LimitPoint limit_point(const MoranConstruction& construction, const Word& w, int max_steps = 4096);

struct SectionCell {
  int level = 0;
  std::uint64_t index = 0;
  MoranCell cell;
};

using Section = std::vector<SectionCell>;

class MoranTree {
 public:
  // Throws ConfigError for an invalid config, ResourceError past the cell budget.
  static MoranTree build(const MoranConfig& config);

  const MoranConstruction& construction() const { return construction_; }
  const MoranConfig& config() const { return construction_.config(); }
  int m() const { return construction_.m(); }
  int depth() const { return static_cast<int>(levels_.size()) - 1; }

  const std::vector<MoranCell>& level(int k) const { return levels_.at(static_cast<std::size_t>(k)); }
  const MoranCell& cell(int k, std::uint64_t index) const { return levels_[static_cast<std::size_t>(k)][index]; }
  const MoranCell& cell(const Word& w) const;
  Word word(int k, std::uint64_t index) const { return word_at(index, m(), static_cast<std::size_t>(k)); }

  // Index range [first, last] at level `deep` of the descendants of (k, index).
  std::pair<std::uint64_t, std::uint64_t> descendant_range(int k, std::uint64_t index, int deep) const;

  double c0() const { return construction_.inner_ball_constant(); }
  double c1() const { return construction_.ratio_constant(); }
  double kappa() const { return config().kappa; }

  // Cells with diam <= kappa 2^-n < diam(parent), left to right. The root's
  // parent has infinite diameter. Throws SectionIncomplete past the built depth.
  Section section(int n) const;

  // Largest n whose section is available at the built depth.
  int max_scale() const;

 private:
  explicit MoranTree(MoranConstruction construction) : construction_(std::move(construction)) {}

  MoranConstruction construction_;
  std::vector<std::vector<MoranCell>> levels_;
};

inline LimitPoint limit_point(const MoranTree& tree, const Word& w) { return limit_point(tree.construction(), w); }

struct RangeStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  std::size_t count = 0;
};

struct M8Sample {
  Word word;
  Point point = 0.0;
  std::vector<double> radii;
  std::vector<int> levels;     // n(w, r)
  std::vector<double> ratios;  // log r / log diam(E_{w|n(w,r)})
  double slope_ratio = 0.0;    // 1 / slope of log diam vs log r over the radius grid
};

struct ConditionReport {
  std::uint64_t seed = 0;
  double c0 = 0.0, c1 = 0.0, lambda = 0.0;
  bool disjoint_children = true;       // M1, M2 (gap >= g diam(parent))
  double min_gap_fraction = 0.0;
  double gap_roundoff = 0.0;           // largest position rounding error relative to diam(parent)
  bool inner_ball_contained = true;    // M3
  double max_diam_ratio = 0.0;         // M5: max diam(parent)/diam(child)
  double max_mass_error = 0.0;         // |logsumexp(level log masses)|
  RangeStats m6;                       // log diam(E_{w|N}) / log r_{w|N}(x_w)
  RangeStats m7;                       // inner radius / 2^-n over sections, E-centered balls
  RangeStats m8;                       // over samples and radii
  std::vector<M8Sample> m8_samples;
};

struct ConditionOptions {
  int samples = 10;
  std::uint64_t seed = 1;
  std::vector<double> radii;  // default {2^-6, ..., 2^-14}
  int m7_lookahead = 4;
};

ConditionReport verify_conditions(const MoranTree& tree, const ConditionOptions& options = {});

// Word terms for the decay sums at level n: log mu_w, log r_w(x_w) and the
// coefficients at x_w (limit point) or at the anchor of E_w.
enum class CoefficientSite { limit_point, anchor };
std::vector<WordTerm> word_terms(const MoranTree& tree, int n, CoefficientSite site = CoefficientSite::limit_point);

}  // namespace moranfrac
