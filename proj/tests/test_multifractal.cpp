#include <doctest.h>

#include <cmath>

#include "moranfrac/multifractal.hpp"

using namespace moranfrac;

namespace {

MoranConfig config(std::vector<double> p, int depth) {
  MoranConfig c;
  c.model = CoefficientModel::constant(std::move(p), {1.0 / 3, 1.0 / 3});
  c.depth = depth;
  return c;
}

}  // namespace

TEST_CASE("effective epsilon and alpha grids") {
  CHECK(effective_epsilon(0.05, 16) == doctest::Approx(0.125));
  CHECK(effective_epsilon(0.05, 100) == doctest::Approx(0.05));
  const auto grid = alpha_grid(0.0, 1.0, 0.25);
  REQUIRE(grid.size() == 5);
  CHECK(grid.back() == doctest::Approx(1.0));
}

TEST_CASE("homogeneous measure concentrates on one exponent") {
  const MoranTree tree = MoranTree::build(config({0.5, 0.5}, 12));
  const double dim = std::log(2.0) / std::log(3.0);
  const double alphas[] = {dim, dim + 0.3};
  const CoarseSpectrum s = coarse_spectrum(tree, Region::whole_space(), 12, 0.01, alphas);
  CHECK(s.count[0] == s.cells);
  CHECK(s.count[1] == 0);
  CHECK(s.f[0] == doctest::Approx(std::log(static_cast<double>(s.cells)) / s.log_scale));
}

TEST_CASE("coarse spectrum compared with the Legendre transform") {
  const std::vector<double> p{0.2, 0.8};
  const MoranTree tree = MoranTree::build(config(p, 12));
  const LocalCoefficients c{p, {1.0 / 3, 1.0 / 3}};
  const AlphaBounds b = alpha_bounds(c);
  const auto grid = alpha_grid(b.min - 0.2, b.max + 0.2, 0.01);
  const CoarseSpectrum s = coarse_spectrum(tree, Region::whole_space(), 16, effective_epsilon(0.05, 16), grid);
  const LegendreComparison cmp = compare_legendre(s, c, 0.1);
  for (std::size_t i = 0; i < cmp.alpha.size(); ++i) {
    if (cmp.alpha[i] < b.min || cmp.alpha[i] > b.max) CHECK(cmp.f_theory[i] == 0.0);
    CHECK(cmp.f_emp[i] >= 0.0);
    CHECK(cmp.deviation[i] == doctest::Approx(std::abs(cmp.f_emp[i] - cmp.f_theory[i])));
  }
  CHECK(cmp.sup_norm <= 0.1);
  CHECK(cmp.max_f_emp == doctest::Approx(-solve_tau(c, 0.0)).epsilon(0.05));
  const CoarseSpectrum local = local_coarse_spectrum(tree, 0.8, 0.05, 12, 0.1, grid);
  CHECK(local.cells < s.cells);
}

TEST_CASE("nu sampling is reproducible across thread counts") {
  const std::vector<double> p{0.2, 0.8};
  const LocalCoefficients c{p, {1.0 / 3, 1.0 / 3}};
  const double alpha = tau_derivative(c, 2.0, solve_tau(c, 2.0));
  const NuSampleReport one = nu_sample(config(p, 20), alpha, 40, 20, 9, 1);
  const NuSampleReport four = nu_sample(config(p, 20), alpha, 40, 20, 9, 4);
  REQUIRE(one.samples.size() == 40);
  for (std::size_t i = 0; i < 40; ++i) {
    CHECK(one.samples[i].id == i);
    CHECK(one.samples[i].point == four.samples[i].point);
  }
  CHECK(one.outside == 0);
  const NuSampleReport other = nu_sample(config(p, 20), alpha, 40, 20, 10, 2);
  CHECK(other.samples[0].point != one.samples[0].point);
}

TEST_CASE("nu at the entropy point reproduces mu") {
  const std::vector<double> p{0.3, 0.7};
  const LocalCoefficients c{p, {1.0 / 3, 1.0 / 3}};
  const double alpha = tau_derivative(c, 1.0, 0.0);
  const NuSampleReport rep = nu_sample(config(p, 25), alpha, 200, 25, 4);
  CHECK(rep.mean_mu == doctest::Approx(entropy_dim_formula(c)).epsilon(0.05));
  CHECK(rep.mean_nu == doctest::Approx(rep.mean_mu).epsilon(1e-6));
}
