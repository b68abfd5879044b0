#include <doctest.h>

#include <cmath>
#include <string>

#include "moranfrac/errors.hpp"
#include "moranfrac/moran.hpp"
#include "moranfrac/numeric.hpp"

using namespace moranfrac;

namespace {

MoranConfig cantor(int depth, GapLayout layout, std::vector<double> p = {0.5, 0.5}) {
  MoranConfig c;
  c.model = CoefficientModel::constant(std::move(p), {1.0 / 3, 1.0 / 3});
  c.depth = depth;
  c.layout = layout;
  return c;
}

}  // namespace

TEST_CASE("affine coefficients interpolate and renormalize") {
  const auto model = CoefficientModel::affine({0.2, 0.8}, {0.6, 0.6}, {0.3, 0.3}, {0.2, 0.4});
  const LocalCoefficients mid = model.at(0.5);
  CHECK(mid.p[0] == doctest::Approx(0.4 / 1.1));
  CHECK(mid.p[1] == doctest::Approx(0.7 / 1.1));
  CHECK(mid.r[0] == doctest::Approx(0.25));
  CHECK(mid.r[1] == doctest::Approx(0.35));
  CHECK(model.min_ratio() == doctest::Approx(0.2));
  CHECK(model.max_ratio_sum() == doctest::Approx(0.6));
}

TEST_CASE("infeasible ratios are rejected with the offending point") {
  const auto model = CoefficientModel::affine({0.5, 0.5}, {0.5, 0.5}, {0.3, 0.3}, {0.3, 0.45});
  try {
    model.validate(1.0 / 9);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("x=") != std::string::npos);
  }
  MoranConfig config;
  config.model = CoefficientModel::constant({0.5, 0.5}, {0.6, 0.6});
  CHECK_THROWS_AS(config.validate(), ConfigError);
  MoranConfig deep;
  deep.depth = 40;
  CHECK_THROWS_AS(deep.validate(), ResourceError);
}

TEST_CASE("child placement") {
  const MoranConstruction flush(cantor(3, GapLayout::left_flush));
  const MoranCell a = flush.child(flush.root(), 1), b = flush.child(flush.root(), 2);
  CHECK(a.a == doctest::Approx(0.0));
  CHECK(a.b() == doctest::Approx(1.0 / 3));
  // m gaps: one between the children, one after the last child.
  CHECK(b.a == doctest::Approx(0.5));
  CHECK(b.b() == doctest::Approx(5.0 / 6));

  const MoranConstruction equal(cantor(3, GapLayout::equal));
  const auto kids = equal.children(equal.root());
  CHECK(kids[0].a == doctest::Approx(1.0 / 9));
  CHECK(kids[1].a == doctest::Approx(5.0 / 9));
  CHECK(kids[1].b() == doctest::Approx(8.0 / 9));
  CHECK(equal.inner_ball_constant() == doctest::Approx(4.0 / 9));
  CHECK(equal.ratio_constant() == doctest::Approx(3.0));
  CHECK(equal.threshold(3) == doctest::Approx(0.125));
}

TEST_CASE("tree cells agree with the construction and conserve mass") {
  const MoranTree tree = MoranTree::build(cantor(8, GapLayout::equal, {0.3, 0.7}));
  CHECK(tree.depth() == 8);
  for (int k = 0; k <= 8; ++k) {
    const auto& level = tree.level(k);
    CHECK(level.size() == (std::size_t{1} << k));
    std::vector<double> masses;
    for (std::size_t i = 0; i < level.size(); ++i) {
      masses.push_back(level[i].log_mass);
      if (i > 0) CHECK(level[i - 1].b() < level[i].a);
    }
    CHECK(std::abs(log_sum_exp(masses)) < 1e-12);
  }
  const Word w{2, 1, 2, 2};
  const MoranCell direct = tree.construction().cell(w);
  CHECK(tree.cell(w).a == doctest::Approx(direct.a).epsilon(1e-14));
  CHECK(tree.cell(w).log_mass == doctest::Approx(std::log(0.7 * 0.3 * 0.7 * 0.7)));
  const auto [first, last] = tree.descendant_range(2, 1, 5);
  CHECK(first == 8);
  CHECK(last == 15);
}

TEST_CASE("sections on the triadic tree") {
  const MoranTree tree = MoranTree::build(cantor(10, GapLayout::left_flush));
  const Section s = tree.section(5);
  REQUIRE(s.size() == 16);
  for (const SectionCell& c : s) {
    CHECK(c.level == 4);
    CHECK(c.cell.diam <= 1.0 / 32);
  }
  // log #section / log 2^-5
  CHECK(std::log(16.0) / std::log(1.0 / 32) == doctest::Approx(-0.8));
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i - 1].cell.a < s[i].cell.a);

  const int top = tree.max_scale();
  CHECK_NOTHROW(tree.section(top));
  CHECK_THROWS_AS(tree.section(top + 1), SectionIncomplete);
  CHECK(tree.section(0).size() == 1);
}

TEST_CASE("limit points descend along the first symbol") {
  const MoranConstruction flush(cantor(4, GapLayout::left_flush));
  const LimitPoint x = limit_point(flush, Word{2});
  CHECK(x.point == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(x.bound < 1e-13);
  CHECK(limit_point(flush, Word{}).point == doctest::Approx(0.0));
}

TEST_CASE("structural conditions on a homogeneous tree") {
  const MoranTree tree = MoranTree::build(cantor(12, GapLayout::equal));
  const ConditionReport r = verify_conditions(tree);
  CHECK(r.disjoint_children);
  CHECK(r.inner_ball_contained);
  CHECK(r.min_gap_fraction >= 1.0 / 9 - r.gap_roundoff);
  CHECK(r.max_diam_ratio == doctest::Approx(3.0));
  CHECK(r.max_mass_error < 1e-12);
  CHECK(r.m6.min == 1.0);
  CHECK(r.m6.max == 1.0);
  CHECK(r.m7.min >= tree.config().gap / 4);
  CHECK(r.m8_samples.size() == 10);
}

TEST_CASE("word terms cover a level") {
  const MoranTree tree = MoranTree::build(cantor(6, GapLayout::equal, {0.2, 0.8}));
  const auto terms = word_terms(tree, 5);
  REQUIRE(terms.size() == 32);
  std::vector<double> masses;
  for (const WordTerm& t : terms) {
    masses.push_back(t.log_mass);
    CHECK(t.log_ratio == doctest::Approx(5 * std::log(1.0 / 3)));
  }
  CHECK(std::abs(log_sum_exp(masses)) < 1e-12);
}
