#pragma once

// Empirical dimension estimates computed from the exact cylinder masses of a
// Moran tree: L^q moment sums, global and local tau_q, entropy dimensions,
// pointwise local dimensions and the Jensen lower bound for the entropy
// integral.

#include <span>
#include <vector>

#include "moranfrac/covering.hpp"
#include "moranfrac/moran.hpp"

namespace moranfrac {

// The whole space [0,1] or a closed ball in it.
struct Region {
  bool whole = true;
  Ball ball;

  static Region whole_space() { return {}; }
  static Region in_ball(Point center, double radius) { return {false, {center, radius}}; }

  bool meets(double a, double b) const { return whole || (b >= ball.center - ball.radius && a <= ball.center + ball.radius); }
  bool covers(double a, double b) const { return whole || (a >= ball.center - ball.radius && b <= ball.center + ball.radius); }
};

enum class MomentMode { meets, inside };

// Abscissa of the tail regressions. `section` uses the mean log diameter of the
// selected section cells, which removes the staircase left by the integer
// section depths; `dyadic` uses log delta_n.
enum class ScaleAxis { section, dyadic };

// Inclusive range of dyadic scale indices used for regressions.
struct Window {
  int first = 0;
  int last = 0;
};

// Last half of the available scales: [ceil(max_scale / 2), max_scale].
Window default_window(const MoranTree& tree);

// log sum over section cells at scale n of mu(Q)^q. `meets` keeps cells that
// meet the region, `inside` keeps cells contained in it; q < 0 needs `inside`.
// Throws NoSupport when no cell is selected.
double moment_sum(const MoranTree& tree, const Region& region, int n, double q, MomentMode mode);

struct SpectrumEstimate {
  double q = 0.0;
  std::vector<int> n;
  std::vector<double> delta;
  std::vector<double> log_s;
  std::vector<double> tau_scale;  // log S / log delta_n
  std::vector<double> abscissa;   // regression abscissa per scale
  double tau_slope = 0.0;         // slope of log S against the abscissa
  double tau_stderr = 0.0;
  double tau_min = 0.0;           // liminf proxy: min of tau_scale over the window
};

// Moment sums for several q sharing one pass over the sections.
std::vector<SpectrumEstimate> tau_spectrum(const MoranTree& tree, const Region& region, std::span<const double> qs,
                                           Window window, ScaleAxis axis = ScaleAxis::section);
SpectrumEstimate tau_global(const MoranTree& tree, const Region& region, double q, Window window,
                            ScaleAxis axis = ScaleAxis::section);

// One estimate per ball B(x, r). The mode follows the sign of q.
std::vector<SpectrumEstimate> tau_local(const MoranTree& tree, Point x, double q, std::span<const double> radii,
                                        Window window, ScaleAxis axis = ScaleAxis::section);

struct EntropyEstimate {
  std::vector<int> n;
  std::vector<double> delta;
  std::vector<double> numerator;    // sum mu(Q) log mu(Q)
  std::vector<double> denominator;  // sum mu(Q) log delta_n
  std::vector<double> ratio;
  double lower = 0.0;  // min ratio over the window
  double upper = 0.0;  // max ratio over the window
  double slope = 0.0;  // slope of numerator / mass against the abscissa
};

// Throws DomainError when the region carries no mass. The section abscissa is
// the mass-weighted mean log diameter.
EntropyEstimate entropy_dim(const MoranTree& tree, const Region& region, Window window,
                            ScaleAxis axis = ScaleAxis::section);

struct ScaleSeries {
  std::vector<int> n;
  std::vector<double> delta;
  std::vector<double> value;  // +inf where the point sits in a massless cell
  std::size_t flagged = 0;
  double lower = 0.0;  // min over finite values
  double upper = 0.0;  // max over finite values

  double last_finite() const;
};

// log mu(Q_n(x)) / log delta_n along the cells of a word. Only the cells on the
// path are built, so the word may be longer than any materialized tree. Throws
// SectionIncomplete when the word is too short for the window.
ScaleSeries local_dim_partition(const MoranConstruction& construction, const Word& w, Window window);

// Same series for an ambient point, located in the nearest-owner partition.
ScaleSeries local_dim_partition(const MoranTree& tree, Point x, Window window);

struct BallDimSeries {
  std::vector<double> radii;
  std::vector<double> log_mass_lower;  // deepest cells inside the ball
  std::vector<double> log_mass_upper;  // deepest cells meeting the ball
  std::vector<double> dim_lower;       // log upper mass / log r
  std::vector<double> dim_upper;       // log lower mass / log r
  std::vector<bool> insufficient;      // bracket ratio above 10
};

// Radii must lie in (0, 1).
BallDimSeries local_dim_ball(const MoranTree& tree, Point x, std::span<const double> radii);

struct JensenReport {
  double delta = 0.0;
  double integral_lower = 0.0;  // lower bracket of the integral of log mu(B(y, delta)) over A
  double mass_lower = 0.0;      // lower bracket of mu(A)
  double bound = 0.0;           // -1/e - mu(A) (log c + s log(4 diam(A) / delta)), s = 1, c = 3
  double slack = 0.0;
  bool pass = false;
};

// Needs delta at least the largest deepest-level diameter.
JensenReport jensen_lower_bound_check(const MoranTree& tree, const Ball& region, double delta);

// log sum of mu(B)^q over a maximal delta_n packing centred at section
// midpoints; ball masses from the deepest cells meeting each ball. q >= 0.
double packing_moment_sum(const MoranTree& tree, int n, double q);

struct ChainReport {
  int n = 0;
  double entropy = 0.0;        // h_n'(1) = sum mu(Q) log mu(Q)
  double worst_below = 0.0;    // max over q < 1 of (h(q) - h(1))/(q - 1) - h'(1); <= tol
  double worst_above = 0.0;    // max over p > 1 of h'(1) - (h(p) - h(1))/(p - 1); <= tol
  double worst_convexity = 0.0;  // max midpoint convexity defect on the q grid
  bool pass = false;
};

// Per-scale chain for h_n(q) = log sum_Q mu(Q)^q over the whole section.
ChainReport discrete_chain(const MoranTree& tree, int n, std::span<const double> below, std::span<const double> above,
                           double tol = 1e-9);

}  // namespace moranfrac
