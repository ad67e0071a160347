#include <cmath>
#include <random>

#include "doctest.h"
#include "gen.hpp"
#include "models.hpp"
#include "rank2geo/frame.hpp"

using namespace r2g;

namespace {

struct Pipeline {
  FlagEngine eng;
  CurveSection sec;
  FrameBuilder fb;
  NormalizedFrame frame;
};

Pipeline pipeline(const DistributionSpec& d, uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n = int(d.chart->dim());
  FlagEngine eng(quasi_impulses(d, gen::point(rng, size_t(n))));
  CurveSection sec(eng, eng.top_vertical_section(models::lambda(rng, n)));
  FrameBuilder fb(sec);
  NormalizedFrame f = fb.normalize(fb.epsilon1());
  return {std::move(eng), std::move(sec), std::move(fb), std::move(f)};
}

const Pipeline& flat6() {
  static const Pipeline p = pipeline(models::flat(6), 11);
  return p;
}
const Pipeline& perturbed6() {
  static const Pipeline p = pipeline(models::ode(6, "1/2*p3^2 + 1/10*p0*p3^3"), 12);
  return p;
}

QVec sample(const FrameBuilder& fb, std::mt19937_64& rng, bool b_zero = false) {
  auto lam = models::lambda(rng, fb.n());
  return fb.sigma_point(lam, abs(gen::small_rational(rng)) + 1, b_zero ? mpq_class(0) : gen::small_rational(rng));
}

std::string e(int i) { return "e" + std::to_string(i); }

// Largest |coefficient| of [x, y] outside the named subspace.
double outside(const StructureTable& t, const std::string& x, const std::string& y, const std::vector<std::string>& span) {
  double worst = 0;
  for (size_t z = 0; z < t.size(); ++z)
    if (std::find(span.begin(), span.end(), t.names[z]) == span.end())
      worst = std::max(worst, std::abs(t.c[t.index(x)][t.index(y)][z]));
  return worst;
}

std::vector<std::string> L(int i) {
  std::vector<std::string> s{"h", "g0", "g1", "g2"};
  for (int j = 1; j <= i; ++j) s.push_back(e(j));
  return s;
}
std::vector<std::string> W(int i) {
  auto s = L(i);
  s.erase(s.begin());
  return s;
}

}  // namespace

TEST_CASE("flat model closed forms") {
  for (int n : {6, 7, 8}) {
    const int m = n - 3;
    FlatModel fm = flat_model(n);
    const auto& cc = fm.cc;
    const ChartPtr& A = cc.annihilator;
    auto u = [&](int i) { return RationalExpr::coordinate(A, cc.u_index(i)); };
    auto Xb = [&](int k) { return cc.X[size_t(k - 1)].on(A); };
    auto oc = fm.dist.chart;
    auto p = [&](int i) { return RationalExpr::coordinate(oc, size_t(i + 1)); };

    CHECK(fm.dist.X1 == VectorField::partial(oc, size_t(m + 1)));
    VectorField x2 = VectorField::partial(oc, 0);
    for (int i = 0; i < m; ++i) x2 += VectorField::partial(oc, size_t(i + 1)).scaled(p(i + 1));
    x2 += VectorField::partial(oc, size_t(n - 1)).scaled(RationalExpr(mpq_class(1, 2)) * p(m) * p(m));
    CHECK(fm.dist.X2 == x2);

    CHECK(fm.H == characteristic_field(cc, true));

    const SurdExpr s = SurdExpr::root(fm.sqrt_u4), inv = s.inverse();
    auto sign = [](int k) { return SurdExpr(k % 2 ? -1 : 1); };
    for (int i = 0; i <= m - 2; ++i)
      CHECK(fm.ad_chain[size_t(i)] == to_surd(VectorField::partial(A, cc.u_index(m + 3 - i))).scaled(sign(i) * s));
    CHECK(fm.ad_chain[size_t(m - 1)] == to_surd(Xb(1)).scaled(sign(m - 2) * inv));
    CHECK(fm.ad_chain[size_t(m)] == to_surd(Xb(3)).scaled(sign(m - 1) * inv));
    for (int i = 1; i <= m - 1; ++i)
      CHECK(fm.ad_chain[size_t(m + i)] == to_surd(Xb(4 + i) - Xb(4).scaled(u(4 + i) / u(4))).scaled(sign(m - 1) * inv));
    CHECK(lie_bracket(to_surd(fm.H), fm.ad_chain.back()).is_zero());
  }
  CHECK_THROWS_AS(flat_model(5), Error);
}

TEST_CASE("fundamental fields and h") {
  for (const Pipeline* p : {&flat6(), &perturbed6()}) {
    const auto& fb = p->fb;
    const auto &g0 = fb.g0().field, &g1 = fb.g1().field, &g2 = fb.g2().field, &h = fb.h().field;
    CHECK(lie_bracket(g1, g2) == g2.scaled(RationalExpr(2)));
    CHECK(lie_bracket(g0, g1).is_zero());
    CHECK(lie_bracket(g0, g2).is_zero());
    CHECK(lie_bracket(g1, h) == h.scaled(RationalExpr(-2)));
    CHECK(lie_bracket(g2, h) == g1);
    CHECK(lie_bracket(g0, h).is_zero());
    // h projects to the characteristic direction
    CHECK(h.truncated(p->sec.chart().annihilator) ==
          p->sec.H().scaled(RationalExpr::coordinate(fb.chart(), fb.a_index()).inverse()).truncated(p->sec.chart().annihilator));
  }
  FlatModel fm = flat_model(6);
  const auto& fb = flat6().fb;
  CHECK(fm.g0 == fb.g0().field);
  CHECK(fm.g1 == fb.g1().field);
  CHECK(fm.g2 == fb.g2().field);
  CHECK(fm.h == fb.h().field);
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(FrameBuilder(CurveSection(FlagEngine(quasi_impulses(models::cartan(), gen::point(rng, 5))),
                                            VectorField::partial(quasi_impulses(models::cartan(), gen::point(rng, 5)).annihilator, 6))),
                  Error);
}

TEST_CASE("epsilon_1 on the flat model") {
  const auto& p = flat6();
  const auto& fb = p.fb;
  auto u4 = RationalExpr::coordinate(fb.chart(), p.sec.chart().u_index(4));
  // r = a^(m-1/2) |u4|^(1/2)
  CHECK(fb.pairing() == -u4.inverse());
  CHECK(fb.epsilon1().field == VectorField::partial(fb.chart(), p.sec.chart().u_index(6)));
  CHECK(p.frame.mu0.is_zero());
  CHECK(p.frame.mu1.is_zero());
  CHECK(p.frame.mu2.is_zero());
  std::mt19937_64 rng(2);
  auto lam = models::lambda(rng, 6);
  auto l1 = fb.epsilon1_affine(lam, 1), l4 = fb.epsilon1_affine(lam, 4);
  for (size_t i = 0; i < l1.point.size(); ++i) CHECK(l4.point[i] == doctest::Approx(std::pow(4.0, 2.5) * l1.point[i]));
  // parallel to e, away from the origin
  CHECK(span_dim({eval_exact(euler_field(p.sec.chart()), lam), eval_exact(p.sec.ell(), lam)}) == 2);
  CHECK(std::abs(l1.point.back()) > 0);
}

TEST_CASE("recursion reproduces the flat chain") {
  const auto& p = flat6();
  const int m = 3;
  std::mt19937_64 rng(3);
  auto chain = p.sec.derivative_frame(2 * m - 1);
  for (int k = 0; k < 5; ++k) {
    QVec pt = sample(p.fb, rng, true);
    const mpq_class a = pt[p.fb.a_index()];
    QVec lam(pt.begin(), pt.end() - 2);
    for (int i = 1; i <= 2 * m; ++i) {
      QVec got = eval_exact(p.frame.chain.eps[size_t(i - 1)].field, pt);
      QVec want = eval_exact(chain[size_t(i - 1)], lam);
      mpq_class f = 1;
      for (int j = 1; j < i; ++j) f /= a;
      for (size_t c = 0; c < want.size(); ++c) CHECK(got[c] == f * want[c]);
      CHECK(got[p.fb.a_index()] == 0);
      CHECK(got[p.fb.b_index()] == 0);
    }
  }
}

TEST_CASE("normalization of epsilon_1") {
  std::mt19937_64 rng(4);
  for (const Pipeline* p : {&flat6(), &perturbed6()}) {
    const auto& fb = p->fb;
    for (int k = 0; k < 3; ++k) {
      RationalExpr c0(gen::small_rational(rng)), c1(gen::small_rational(rng)), c2(gen::small_rational(rng));
      if (k == 2) c2 = c2 * RationalExpr::coordinate(fb.chart(), 1) + RationalExpr::coordinate(fb.chart(), fb.b_index());
      auto nf = fb.normalize(fb.candidate(c0, c1, c2));
      CHECK(nf.mu0 == -c0);
      CHECK(nf.mu1 == -c1);
      CHECK(nf.mu2 == -c2);
      Kappas kt = fb.kappas(nf.chain);
      CHECK(kt.k1.is_zero());
      CHECK(kt.k2.is_zero());
      CHECK(kt.k3.is_zero());
      for (double v : kappas_at(fb, nf.chain, sample(fb, rng))) CHECK(std::abs(v) < 1e-8);
      auto neg = fb.normalize(fb.candidate(c0, c1, c2), -1);
      for (size_t i = 0; i < nf.chain.eps.size(); ++i) CHECK(neg.chain.eps[i].field == -nf.chain.eps[i].field);
      CHECK(neg.chain.eta.field == nf.chain.eta.field);
    }
    auto g1 = fb.normalize(fb.candidate(0, 1, 0));
    CHECK(g1.mu1 == RationalExpr(-1));
    // an unnormalized candidate has nonzero kappas
    Kappas kc = fb.kappas(fb.recursion(fb.candidate(0, 1, 0)));
    CHECK(!(kc.k1.is_zero() && kc.k2.is_zero() && kc.k3.is_zero()));
  }
}

TEST_CASE("structure table of the flat model") {
  for (int n : {6, 7}) {
    const auto p = pipeline(models::flat(n), 20 + uint64_t(n));
    const int m = n - 3;
    auto want = expected_flat_table(m);
    std::mt19937_64 rng(5);
    std::vector<StructureTable> ts;
    for (int k = 0; k < 5; ++k) {
      auto t = structure_table(p.fb, p.frame, sample(p.fb, rng));
      CHECK(t.names == want.names);
      CHECK(t.size() == size_t(2 * n - 1));
      for (size_t x = 0; x < t.size(); ++x)
        for (size_t y = 0; y < t.size(); ++y)
          for (size_t z = 0; z < t.size(); ++z) {
            CHECK(t.c[x][y][z] == -t.c[y][x][z]);
            CHECK(std::abs(t.c[x][y][z] - want.c[x][y][z]) < 1e-12);
          }
      ts.push_back(t);
    }
    auto v = detect_max_symmetry(ts);
    CHECK(v.maximal);
    CHECK(v.diffs.empty());
    ts.pop_back();
    CHECK_THROWS_AS(detect_max_symmetry(ts), Error);
  }
}

TEST_CASE("frame relations on a perturbed model") {
  const auto& p = perturbed6();
  const int m = 3;
  std::mt19937_64 rng(6);
  std::vector<StructureTable> ts;
  for (int k = 0; k < 5; ++k) {
    auto t = structure_table(p.fb, p.frame, sample(p.fb, rng));
    double scale = 1;
    for (const auto& a : t.c)
      for (const auto& b : a)
        for (double v : b) scale = std::max(scale, std::abs(v));
    const double tol = 1e-12 * scale;
    // gl(2) part is exact
    CHECK(t.at("g1", "g2", "g2") == 2);
    CHECK(t.at("g1", "h", "h") == -2);
    CHECK(t.at("g2", "h", "g1") == 1);
    // weight relations, modulo L_0 (W_0 for i <= m-1)
    for (int i = 1; i <= 2 * m; ++i) {
      auto span = i <= m - 1 ? W(0) : L(0);
      auto without = [&](std::vector<std::string> s, const std::string& x) {
        s.push_back(x);
        return s;
      };
      CHECK(t.at("g1", e(i), e(i)) == doctest::Approx(2 * m - 2 * i + 1));
      CHECK(outside(t, "g1", e(i), without(span, e(i))) <= tol);
      CHECK(t.at("g0", e(i), e(i)) == doctest::Approx(-1));
      CHECK(outside(t, "g0", e(i), without(span, e(i))) <= tol);
      if (i >= 2) {
        CHECK(t.at("g2", e(i), e(i - 1)) == doctest::Approx((i - 1) * (2 * m + 1 - i)));
        CHECK(outside(t, "g2", e(i), without(span, e(i - 1))) <= tol);
      }
    }
    // filtration brackets
    CHECK(outside(t, e(1), e(3), L(2)) <= tol);
    for (int i = 5; i <= 2 * m - 1; ++i) CHECK(outside(t, e(1), e(i), L(i)) <= tol);
    CHECK(t.at(e(1), e(2 * m), "eta") == 1);  // eta = [eps~_1, eps~_2m] itself
    for (int i1 = 2; i1 <= m; ++i1)
      for (int i2 = i1; i2 <= 2 * m - i1; ++i2) CHECK(outside(t, e(i1), e(i2), L(i2 + 1)) <= tol);
    CHECK(outside(t, "h", e(2 * m), L(2 * m - 3)) <= tol);
    // Heisenberg sign pattern mod L_2m
    for (int i = 1; i <= 2 * m; ++i) CHECK(t.at(e(i), e(2 * m + 1 - i), "eta") == doctest::Approx(i % 2 ? 1 : -1));
    ts.push_back(t);
  }
  auto v = detect_max_symmetry(ts);
  CHECK_FALSE(v.maximal);
  CHECK(v.max_variation > 1e-4);
  CHECK(!v.diffs.empty());
}

TEST_CASE("the frame is a frame") {
  for (const Pipeline* p : {&flat6(), &perturbed6()}) {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 10; ++k) {
      QVec pt = sample(p->fb, rng);
      std::vector<QVec> vals;
      for (const auto& f : p->frame.fields) vals.push_back(eval_exact(f.field, pt));
      CHECK(span_dim(vals) == p->frame.fields.size());
    }
  }
}

TEST_CASE("bracket stability of the vertical flag") {
  for (const Pipeline* p : {&flat6(), &perturbed6()}) {
    const auto& cc = p->sec.chart();
    const int m = cc.n - 3;
    auto chain = p->sec.derivative_frame(m - 2);
    VectorField e = euler_field(cc);
    std::mt19937_64 rng(8);
    for (int k = 0; k < 3; ++k) {
      auto lam = models::lambda(rng, cc.n);
      auto f = p->eng.flag_at(lam);
      // V_0 = V_1 = span{e, l, ..., (ad H)^(m-2) l}, V_i = span{e, (ad H)^j l : j <= m-1-i}
      for (int i = 0; i <= m - 1; ++i) {
        std::vector<VectorField> v{e};
        for (int j = 0; j <= m - 1 - std::max(i, 1); ++j) v.push_back(chain[size_t(j)]);
        for (const auto& x : v) REQUIRE(span_contains(f.vertical[size_t(i)], eval_exact(x, lam)));
        REQUIRE(span_dim([&] {
                  std::vector<QVec> vals;
                  for (const auto& x : v) vals.push_back(eval_exact(x, lam));
                  return vals;
                }()) == f.vertical[size_t(i)].size());
        for (const auto& x : v) {
          for (const auto& y : v) CHECK(span_contains(f.vertical[size_t(i)], eval_exact(lie_bracket(x, y), lam)));
          for (int j = 0; j <= i; ++j)
            for (const auto& y : p->eng.families(true)[size_t(j)])
              CHECK(span_contains(f.upper[size_t(i)], eval_exact(lie_bracket(x, y), lam)));
        }
      }
    }
  }
}
