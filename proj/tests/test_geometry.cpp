#include <random>

#include "doctest.h"
#include "gen.hpp"
#include "models.hpp"
#include "oracles.hpp"
#include "rank2geo/geometry.hpp"

using namespace r2g;

namespace {

VectorField random_field(std::mt19937_64& rng, const ChartPtr& c) {
  VectorField f(c);
  for (size_t i = 0; i < c->dim(); ++i) f[i] = gen::poly(rng, c, 3, 2);
  return f;
}

}  // namespace

TEST_CASE("lie_bracket: constant fields commute") {
  auto c = ode_chart(5);
  CHECK(lie_bracket(VectorField::partial(c, 0), VectorField::partial(c, 1)).is_zero());
}

TEST_CASE("flat model brackets") {
  for (int n : {6, 7, 8}) {
    const int m = n - 3;
    auto d = models::flat(n);
    auto c = d.chart;
    auto pm = RationalExpr::coordinate(c, size_t(m + 1));
    VectorField x3 = lie_bracket(d.X1, d.X2);
    VectorField want3 = VectorField::partial(c, size_t(m));  // d/dp_{m-1}
    want3[size_t(n - 1)] = pm;
    CHECK(x3 == want3);
    VectorField x5 = lie_bracket(d.X2, x3);
    CHECK(x5 == -VectorField::partial(c, size_t(m - 1)));
    CHECK(ad_power(d.X2, x5, 0) == x5);
    for (int i = 6; i <= m + 3; ++i) {
      VectorField want = VectorField::partial(c, size_t(m + 3 - i + 1));
      if (i % 2) want = -want;
      CHECK(ad_power(d.X2, x5, i - 5) == want);
    }
  }
}

TEST_CASE("ad_power: two derivatives and the resource limit") {
  auto c = Chart::make({"x", "z"});
  auto x = RationalExpr::coordinate(c, "x");
  VectorField y(c);
  y[1] = x * x;
  VectorField want(c);
  want[1] = 2;
  CHECK(ad_power(VectorField::partial(c, 0), y, 2) == want);
  CHECK_THROWS_AS(ad_power(VectorField::partial(c, 0), y, 65), Error);
}

TEST_CASE("from_ode: generators and Pfaffian forms") {
  auto engel = models::ode(4, "p0");
  CHECK(engel.X1 == VectorField::partial(engel.chart, 2));
  for (auto d : {engel, models::cartan(), models::flat(6), models::perturbed7()}) {
    for (const auto& w : pfaffian_forms(d))
      for (const auto* x : {&d.X1, &d.X2}) {
        RationalExpr s;
        for (size_t i = 0; i < w.size(); ++i) s += w[i] * (*x)[i];
        CHECK(s.is_zero());
      }
  }
  CHECK_THROWS_AS(models::ode(5, "p7"), Error);
  CHECK_THROWS_AS(from_ode(3, RationalExpr(1)), Error);
}

TEST_CASE("antisymmetry and Jacobi on random quadratic fields") {
  std::mt19937_64 rng(11);
  auto c = Chart::make({"x", "y", "z"});
  for (int trial = 0; trial < 6; ++trial) {
    VectorField a = random_field(rng, c), b = random_field(rng, c), e = random_field(rng, c);
    CHECK((lie_bracket(a, b) + lie_bracket(b, a)).is_zero());
    VectorField j = lie_bracket(lie_bracket(a, b), e) + lie_bracket(lie_bracket(b, e), a) +
                    lie_bracket(lie_bracket(e, a), b);
    CHECK(j.is_zero());
  }
}

TEST_CASE("growth vectors of standard models") {
  std::mt19937_64 rng(5);
  auto q5 = gen::point(rng, 5);
  CHECK(small_growth_vector(models::cartan(), q5, 6) == std::vector<int>{2, 3, 5});
  auto q8 = gen::point(rng, 8);
  CHECK(small_growth_vector(models::flat(8), q8, 10) == std::vector<int>{2, 3, 5, 6, 7, 8});
  CHECK(small_growth_vector(models::goursat(6), gen::point(rng, 6), 10) == std::vector<int>{2, 3, 4, 5, 6});

  auto c = Chart::make({"x", "p0", "z"});
  auto inv = from_fields(VectorField::partial(c, 0), VectorField::partial(c, 1));
  auto g = growth_analysis(inv, {1, 2, 3}, 5);
  CHECK(g.dims == std::vector<int>{2, 2});
  CHECK(g.stabilized);
}

TEST_CASE("growth vector agrees with the brute-force oracle") {
  std::mt19937_64 rng(2024);
  auto c = Chart::make({"x1", "x2", "x3", "x4", "x5"});
  for (int trial = 0; trial < 5; ++trial) {
    VectorField a = VectorField::partial(c, 0), b = VectorField::partial(c, 1);
    for (size_t i = 2; i < 5; ++i) {
      a[i] = gen::poly(rng, c, 2, 2);
      b[i] = gen::poly(rng, c, 2, 2);
    }
    auto d = from_fields(a, b);
    auto q = gen::point(rng, 5);
    auto got = small_growth_vector(d, q, 4);
    auto want = oracle::growth_brute_force(d, q, 4);
    want.resize(got.size());
    CHECK(got == want);
    for (size_t i = 1; i < got.size(); ++i) CHECK(got[i] >= got[i - 1]);
    CHECK(got.back() <= 5);
  }
}

TEST_CASE("growth reports poles and dependent generators") {
  auto c = Chart::make({"x", "y", "z"});
  VectorField a = VectorField::partial(c, 0), b(c);
  b[1] = parse_expr("1/x", c);
  CHECK_THROWS_AS(small_growth_vector(from_fields(a, b), {0, 1, 1}, 3), Error);
  CHECK_THROWS_AS(small_growth_vector(from_fields(a, a), {0, 1, 1}, 3), Error);
}
