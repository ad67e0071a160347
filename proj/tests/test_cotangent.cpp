#include <random>

#include "doctest.h"
#include "gen.hpp"
#include "models.hpp"
#include "rank2geo/cotangent.hpp"

using namespace r2g;

namespace {

QVec base_of(const QVec& lambda, int n) { return QVec(lambda.begin(), lambda.begin() + n); }

// Coordinate vector fields of a chart.
std::vector<VectorField> coordinate_fields(const ChartPtr& c) {
  std::vector<VectorField> out;
  for (size_t i = 0; i < c->dim(); ++i) out.push_back(VectorField::partial(c, i));
  return out;
}

}  // namespace

TEST_CASE("frame completion") {
  std::mt19937_64 rng(3);
  auto cc = quasi_impulses(models::flat(8), gen::point(rng, 8));
  REQUIRE(cc.words.size() == 8);
  CHECK(cc.words[5] == "X6=(ad X2)^1 X5");
  CHECK(cc.words[7] == "X8=(ad X2)^3 X5");
  auto cartan = quasi_impulses(models::cartan(), gen::point(rng, 5));
  CHECK(cartan.words.size() == 5);

  auto c = Chart::make({"x", "p0", "p1", "z", "w"});
  auto inv = from_fields(VectorField::partial(c, 0), VectorField::partial(c, 1));
  try {
    quasi_impulses(inv, gen::point(rng, 5));
    FAIL("expected a degenerate error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Degenerate);
  }
  try {
    quasi_impulses(models::goursat(6), gen::point(rng, 6));
    FAIL("expected class 1");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotRegular);
    CHECK(e.reason() == kClassOneReason);
  }
}

TEST_CASE("impulse lifts project to the frame and {u1,u2} = u3") {
  std::mt19937_64 rng(4);
  for (auto d : {models::flat(7), models::perturbed7()}) {
    auto cc = quasi_impulses(d, gen::point(rng, 7));
    for (int a = 1; a <= 7; ++a) CHECK(impulse_lift(cc, a).truncated(cc.base) == cc.X[size_t(a - 1)]);
    CHECK(sigma_full(cc, impulse_lift(cc, 1), impulse_lift(cc, 2)) == cc.u(3).on(cc.full));
    // Hamiltonian field of a quasi-impulse projects to the field itself.
    VectorField y = cc.X[2].scaled(RationalExpr::coordinate(cc.base, 0)) + cc.X[0];
    VectorField g = hamiltonian_field(cc, quasi_impulse(cc, y));
    CHECK(g.truncated(cc.base) == y);
    CHECK(hamiltonian_field(cc, cc.u(3).on(cc.full)) == impulse_lift(cc, 3));
    CHECK_THROWS_AS(hamiltonian_field(cc, cc.u(4) * cc.u(5)), Error);
  }
}

TEST_CASE("Darboux lift for constant fields in canonical coordinates") {
  // X_i = d/dq_i gives u_i = p_i and sigma in Darboux form: the lift of u_i is d/dq_i.
  auto c = Chart::make({"q1", "q2", "q3", "q4", "q5"});
  VectorField x1 = VectorField::partial(c, 0), x2 = VectorField::partial(c, 1);
  x2[2] = RationalExpr::coordinate(c, 0);  // [X1,X2] = d/dq3
  x2[3] = RationalExpr::coordinate(c, 0).pow(2) / RationalExpr(2);
  x2[4] = RationalExpr::coordinate(c, 2);
  auto cc = quasi_impulses(from_fields(x1, x2), {0, 0, 0, 0, 0});
  CHECK(impulse_lift(cc, 1).truncated(cc.base) == x1);
}

TEST_CASE("characteristic field of the flat model") {
  for (int n : {6, 7, 8}) {
    const int m = n - 3;
    std::mt19937_64 rng{static_cast<uint64_t>(n)};
    auto cc = quasi_impulses(models::flat(n), gen::point(rng, size_t(n)));
    VectorField h = characteristic_field(cc);
    VectorField want = cc.dist.X2.on(cc.annihilator) - cc.dist.X1.on(cc.annihilator).scaled(cc.u(5) / cc.u(4));
    for (int i = 5; i <= m + 2; ++i) want[cc.u_index(i)] = cc.u(i + 1);
    CHECK(h == want);
  }
}

TEST_CASE("characteristic field spans the kernel of sigma on the annihilator") {
  std::mt19937_64 rng(8);
  for (auto d : {models::flat(7), models::perturbed7(), models::cartan()}) {
    const int n = int(d.chart->dim());
    auto cc = quasi_impulses(d, gen::point(rng, size_t(n)));
    VectorField h = characteristic_field(cc), raw = characteristic_field(cc, false);
    CHECK(raw == h.scaled(cc.u(4)));
    for (int s = 0; s < 10; ++s) {
      QVec lam = models::lambda(rng, n);
      QMat S = sigma_matrix(cc, lam);
      QVec hv = eval_exact(h, lam);
      for (const auto& row : S) CHECK(dot(row, hv) == 0);
      // kernel is exactly one-dimensional
      CHECK(nullspace(S, S.size()).size() == 1);
    }
  }
}

TEST_CASE("sigma matrix agrees with the symbolic form") {
  std::mt19937_64 rng(9);
  auto cc = quasi_impulses(models::perturbed7(), gen::point(rng, 7));
  auto coords = coordinate_fields(cc.annihilator);
  QVec lam = models::lambda(rng, 7);
  QMat S = sigma_matrix(cc, lam);
  for (size_t i = 0; i < coords.size(); ++i)
    for (size_t j = 0; j < coords.size(); ++j) CHECK(sigma_annihilator(cc, coords[i], coords[j]).eval(lam) == S[i][j]);
}

TEST_CASE("raw characteristic field is tangent to the annihilator") {
  std::mt19937_64 rng(10);
  auto cc = quasi_impulses(models::perturbed7(), gen::point(rng, 7));
  VectorField g = impulse_lift(cc, 2).scaled(cc.u(4).on(cc.full)) - impulse_lift(cc, 1).scaled(cc.u(5).on(cc.full));
  for (int s = 0; s < 5; ++s) {
    QVec pt = models::lambda(rng, 7);
    pt.resize(cc.full->dim(), 0);  // u1 = u2 = u3 = 0
    for (int j = 1; j <= 3; ++j) CHECK(g[cc.u_index(j)].eval(pt) == 0);
  }
}

TEST_CASE("projections of the characteristic field recover D") {
  std::mt19937_64 rng(12);
  for (auto d : {models::flat(6), models::perturbed7()}) {
    const int n = int(d.chart->dim());
    auto cc = quasi_impulses(d, gen::point(rng, size_t(n)));
    VectorField raw = characteristic_field(cc, false);
    QVec q = gen::point(rng, size_t(n));
    std::vector<QVec> proj;
    for (int s = 0; s < 3; ++s) {
      QVec lam = models::lambda(rng, n);
      std::copy(q.begin(), q.end(), lam.begin());
      QVec v = eval_exact(raw, lam);
      v.resize(size_t(n));
      CHECK(span_contains({eval_exact(d.X1, q), eval_exact(d.X2, q)}, v));
      proj.push_back(v);
    }
    CHECK(span_dim(proj) == 2);
  }
}

TEST_CASE("Euler field") {
  std::mt19937_64 rng(13);
  auto cc = quasi_impulses(models::perturbed7(), gen::point(rng, 7));
  VectorField e = euler_field(cc);
  for (size_t i = 0; i < 7; ++i) CHECK(e[i].is_zero());
  for (int a = 1; a <= 7; ++a) CHECK(lie_bracket(e, impulse_lift_on_annihilator(cc, a)).is_zero());
  CHECK(lie_bracket(e, characteristic_field(cc)).is_zero());
}

TEST_CASE("sigma on T*M is closed and nondegenerate") {
  std::mt19937_64 rng(14);
  auto cc = quasi_impulses(models::cartan(), gen::point(rng, 5));
  auto coords = coordinate_fields(cc.full);
  const size_t N = coords.size();
  std::vector<std::vector<RationalExpr>> s(N, std::vector<RationalExpr>(N));
  for (size_t i = 0; i < N; ++i)
    for (size_t j = i + 1; j < N; ++j) {
      s[i][j] = sigma_full(cc, coords[i], coords[j]);
      s[j][i] = -s[i][j];
    }
  for (size_t i = 0; i < N; ++i)
    for (size_t j = i + 1; j < N; ++j)
      for (size_t k = j + 1; k < N; ++k) CHECK((s[j][k].diff(i) - s[i][k].diff(j) + s[i][j].diff(k)).is_zero());
  QVec pt = gen::point(rng, N);
  QMat m(N, QVec(N, 0));
  for (size_t i = 0; i < N; ++i)
    for (size_t j = 0; j < N; ++j) m[i][j] = s[i][j].eval(pt);
  CHECK(rank(m) == N);
}

TEST_CASE("report fragment") {
  std::mt19937_64 rng(15);
  auto cc = quasi_impulses(models::flat(6), gen::point(rng, 6));
  auto j = cotangent_report(cc);
  CHECK(j["component"] == "u4 > 0");
  CHECK(j["completion_words"].size() == 6);
  CHECK(base_of(cc.base_point, 6).size() == 6);
}
