#include "rank2geo/wilczynski.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace r2g {

Series series_mul(const Series& a, const Series& b) {
  const size_t n = std::min(a.size(), b.size());
  Series c(n, 0.0);
  for (size_t i = 0; i < n; ++i)
    if (a[i] != 0)
      for (size_t j = 0; i + j < n; ++j) c[i + j] += a[i] * b[j];
  return c;
}

Series series_div(const Series& a, const Series& b) {
  const size_t n = std::min(a.size(), b.size());
  if (b[0] == 0) throw Error(ErrorKind::Pole, "wilczynski", "series division by a function vanishing at the point");
  Series c(n, 0.0);
  for (size_t k = 0; k < n; ++k) {
    double s = a[k];
    for (size_t j = 1; j <= k; ++j) s -= b[j] * c[k - j];
    c[k] = s / b[0];
  }
  return c;
}

Series series_pow(const Series& a, double alpha) {
  if (a[0] <= 0) throw Error(ErrorKind::Degenerate, "wilczynski", "real power of a series with nonpositive value");
  Series g(a.size(), 0.0);
  g[0] = std::pow(a[0], alpha);
  for (size_t k = 1; k < a.size(); ++k) {
    double s = 0;
    for (size_t j = 1; j <= k; ++j) s += ((alpha + 1) * double(j) - double(k)) * a[j] * g[k - j];
    g[k] = s / (double(k) * a[0]);
  }
  return g;
}

Series series_derivative(const Series& a) {
  Series d(a.size(), 0.0);
  for (size_t k = 1; k < a.size(); ++k) d[k - 1] = double(k) * a[k];
  return d;
}

Series series_integral(const Series& a, double c0) {
  Series r(a.size(), 0.0);
  r[0] = c0;
  for (size_t k = 1; k < a.size(); ++k) r[k] = a[k - 1] / double(k);
  return r;
}

Series series_compose(const Series& f, const Series& g) {
  const size_t n = g.size();
  Series delta = g;
  delta[0] = 0;
  Series out(n, 0.0), power(n, 0.0);
  power[0] = 1;
  for (size_t j = 0; j < f.size() && j < n; ++j) {
    for (size_t k = 0; k < n; ++k) out[k] += f[j] * power[k];
    power = series_mul(power, delta);
  }
  return out;
}

double series_jet(const Series& a, int k) {
  double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return a[size_t(k)] * f;
}

namespace {

Series poly_series(const Poly& p, const std::vector<Series>& pt, size_t n) {
  Series out(n, 0.0);
  std::vector<std::vector<Series>> powers(pt.size());
  for (const auto& t : p.terms()) {
    Series term(n, 0.0);
    term[0] = t.c.get_d();
    for (size_t v = 0; v < pt.size() && v < kMaxVars; ++v) {
      int e = t.m.e[v];
      if (!e) continue;
      auto& pw = powers[v];
      if (pw.empty()) {
        Series one(n, 0.0);
        one[0] = 1;
        pw.push_back(std::move(one));
      }
      while (int(pw.size()) <= e) pw.push_back(series_mul(pw.back(), pt[v]));
      term = series_mul(term, pw[size_t(e)]);
    }
    for (size_t k = 0; k < n; ++k) out[k] += term[k];
  }
  return out;
}

std::vector<double> to_double(const QVec& v) {
  std::vector<double> d(v.size());
  for (size_t i = 0; i < v.size(); ++i) d[i] = v[i].get_d();
  return d;
}

}  // namespace

Series series_eval(const RationalExpr& e, const std::vector<Series>& point) {
  const size_t n = point.empty() ? 1 : point[0].size();
  Series num = poly_series(e.num(), point, n);
  if (e.den().is_constant()) {
    double d = e.den().constant_value().get_d();
    for (auto& x : num) x /= d;
    return num;
  }
  return series_div(num, poly_series(e.den(), point, n));
}

CurveSection::CurveSection(const FlagEngine& engine, VectorField l) : cc_(engine.chart()), l_(std::move(l)) {
  if (l_.chart() != cc_.annihilator)
    throw Error(ErrorKind::ChartMismatch, "wilczynski", "section must live on the annihilator chart");
  h_ = characteristic_field(cc_, true);
  frame_.push_back(l_);
}

std::vector<VectorField> CurveSection::derivative_frame(int k) const {
  if (k < 0 || k > 2 * m())
    throw Error(ErrorKind::Resource, "wilczynski", "derivative frame order outside 0..2m");
  while (int(frame_.size()) <= k) frame_.push_back(lie_bracket(h_, frame_.back()));
  return std::vector<VectorField>(frame_.begin(), frame_.begin() + k + 1);
}

RationalExpr CurveSection::gram(int j, int k) const {
  if (j > k) return -gram(k, j);
  auto it = gram_.find({j, k});
  if (it != gram_.end()) return it->second;
  auto f = derivative_frame(std::max(j, k));
  RationalExpr g = sigma_annihilator(cc_, f[size_t(j)], f[size_t(k)]);
  gram_.emplace(std::make_pair(j, k), g);
  return g;
}

const RationalExpr& CurveSection::pairing() const {
  if (!p_) {
    RationalExpr p = gram(m(), m() - 1);
    if (p.is_zero())
      throw Error(ErrorKind::Degenerate, "wilczynski",
                  "sigma((ad H)^m l, (ad H)^(m-1) l) vanishes: the curve is not regular here");
    p_ = std::move(p);
  }
  return *p_;
}

const RationalExpr& CurveSection::gamma() const {
  if (!gamma_) gamma_ = -h_.apply(pairing()) / (RationalExpr(2) * pairing());
  return *gamma_;
}

const std::vector<std::vector<RationalExpr>>& CurveSection::r_coefficients() const {
  if (!r_) {
    std::vector<std::vector<RationalExpr>> r{{RationalExpr(1)}};
    const RationalExpr& g = gamma();
    for (int k = 0; k < 2 * m(); ++k) {
      const auto& prev = r.back();
      std::vector<RationalExpr> next(prev.size() + 1);
      for (size_t j = 0; j < prev.size(); ++j) {
        if (prev[j].is_zero()) continue;
        next[j] += h_.apply(prev[j]) + g * prev[j];
        next[j + 1] += prev[j];
      }
      r.push_back(std::move(next));
    }
    r_ = std::move(r);
  }
  return *r_;
}

VectorField CurveSection::section_derivative(int k) const {
  const auto& r = r_coefficients();
  auto f = derivative_frame(k);
  VectorField out(cc_.annihilator);
  for (size_t j = 0; j < r[size_t(k)].size(); ++j)
    if (!r[size_t(k)][j].is_zero()) out += f[j].scaled(r[size_t(k)][j]);
  return out;
}

namespace {

// sigma(R_a, R_b) through the Gram entries of the derivative frame
RationalExpr section_pairing(const CurveSection& s, int a, int b) {
  const auto& r = s.r_coefficients();
  RationalExpr out;
  for (int j = 0; j <= a; ++j) {
    if (r[size_t(a)][size_t(j)].is_zero()) continue;
    RationalExpr inner;
    for (int k = 0; k <= b; ++k) {
      if (r[size_t(b)][size_t(k)].is_zero() || j + k < 2 * s.m() - 1) continue;
      RationalExpr g = s.gram(j, k);
      if (!g.is_zero()) inner += r[size_t(b)][size_t(k)] * g;
    }
    if (!inner.is_zero()) out += r[size_t(a)][size_t(j)] * inner;
  }
  return out;
}

}  // namespace

RationalExpr CurveSection::b_top() const {
  const int m2 = 2 * m();
  return section_pairing(*this, m2, 0) / section_pairing(*this, m2 - 1, 0);
}

const RationalExpr& CurveSection::rho() const {
  if (!rho_) {
    const int m2 = 2 * m();
    rho_ = section_pairing(*this, m2, 1) / section_pairing(*this, m2 - 2, 1);
  }
  return *rho_;
}

std::vector<QVec> CurveSection::section_jets(const QVec& lambda) const {
  const auto& r = r_coefficients();
  auto f = derivative_frame(2 * m());
  std::vector<QVec> lv;
  for (const auto& x : f) lv.push_back(eval_point(x, lambda, "wilczynski"));
  std::vector<QVec> out;
  for (int k = 0; k <= 2 * m(); ++k) {
    QVec v(lambda.size(), 0);
    for (size_t j = 0; j < r[size_t(k)].size(); ++j) {
      if (r[size_t(k)][j].is_zero()) continue;
      mpq_class c = r[size_t(k)][j].eval(lambda);
      for (size_t i = 0; i < v.size(); ++i)
        if (lv[j][i] != 0) v[i] += c * lv[j][i];
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::vector<double>> CurveSection::section_jets(const std::vector<double>& lambda) const {
  const auto& r = r_coefficients();
  auto f = derivative_frame(2 * m());
  std::vector<std::vector<double>> lv;
  for (const auto& x : f) lv.push_back(x.eval(lambda));
  std::vector<std::vector<double>> out;
  for (int k = 0; k <= 2 * m(); ++k) {
    std::vector<double> v(lambda.size(), 0.0);
    for (size_t j = 0; j < r[size_t(k)].size(); ++j) {
      if (r[size_t(k)][j].is_zero()) continue;
      double c = r[size_t(k)][j].eval(lambda);
      for (size_t i = 0; i < v.size(); ++i) v[i] += c * lv[j][i];
    }
    out.push_back(std::move(v));
  }
  return out;
}

QVec CurveSection::b_at(const QVec& lambda) const {
  const size_t m2 = size_t(2 * m());
  auto jets = section_jets(lambda);
  QMat s = sigma_matrix(cc_, lambda);
  QMat g(m2, QVec(m2, 0));
  QVec t(m2, 0);
  for (size_t k = 0; k < m2; ++k) {
    QVec sk = mat_vec(s, jets[k]);
    for (size_t j = 0; j < m2; ++j) g[k][j] = dot(jets[j], sk);
    t[k] = dot(jets[m2], sk);
  }
  // g[k][j] = sigma(R_j, R_k), t[k] = sigma(R_2m, R_k)
  return mat_vec(inverse(g), t);
}

mpq_class CurveSection::normalized_pairing(const QVec& lambda) const {
  auto jets = section_jets(lambda);
  QMat s = sigma_matrix(cc_, lambda);
  mpq_class p = pairing().eval(lambda);
  return bilinear(jets[size_t(m())], s, jets[size_t(m() - 1)]) / abs(p);
}

std::vector<double> CurveSection::flow_rhs(const std::vector<double>& y) const { return h_.eval(y); }

std::vector<Series> CurveSection::flow_series(const std::vector<double>& lambda, int order) const {
  const size_t n = size_t(order + 1);
  std::vector<Series> x(lambda.size(), Series(n, 0.0));
  for (size_t i = 0; i < lambda.size(); ++i) x[i][0] = lambda[i];
  for (int it = 0; it < order; ++it) {
    std::vector<Series> next(lambda.size());
    for (size_t i = 0; i < lambda.size(); ++i) {
      if (h_[i].is_zero()) {
        next[i] = Series(n, 0.0);
        next[i][0] = lambda[i];
        continue;
      }
      next[i] = series_integral(series_eval(h_[i], x), lambda[i]);
    }
    x = std::move(next);
  }
  return x;
}

RationalExpr schwarzian(const RationalExpr& ups, size_t var) {
  RationalExpr d1 = ups.diff(var), d2 = d1.diff(var), d3 = d2.diff(var);
  if (d1.is_zero()) throw Error(ErrorKind::Degenerate, "wilczynski", "ups' = 0: not a reparameterization");
  RationalExpr q = d2 / d1;
  return d3 / (RationalExpr(2) * d1) - RationalExpr(mpq_class(3, 4)) * q * q;
}

double schwarzian_from_jet(double d1, double d2, double d3) {
  if (d1 == 0) throw Error(ErrorKind::Degenerate, "wilczynski", "ups' = 0: not a reparameterization");
  return d3 / (2 * d1) - 0.75 * (d2 / d1) * (d2 / d1);
}

double schwarzian_numeric(const std::function<double(double)>& ups, double t, double h) {
  auto diffs = [&](double s) {
    double fm2 = ups(t - 2 * s), fm1 = ups(t - s), f0 = ups(t), f1 = ups(t + s), f2 = ups(t + 2 * s);
    return std::array<double, 3>{(f1 - fm1) / (2 * s), (f1 - 2 * f0 + fm1) / (s * s),
                                 (f2 - 2 * f1 + 2 * fm1 - fm2) / (2 * s * s * s)};
  };
  auto a = diffs(h), b = diffs(h / 2), c = diffs(h / 4);
  std::array<double, 3> d{};
  for (int i = 0; i < 3; ++i) {
    double r1 = (4 * b[size_t(i)] - a[size_t(i)]) / 3, r2 = (4 * c[size_t(i)] - b[size_t(i)]) / 3;
    d[size_t(i)] = (16 * r2 - r1) / 15;
  }
  return schwarzian_from_jet(d[0], d[1], d[2]);
}

double law_constant(int m) { return m * (4.0 * m * m - 1) / 3.0; }

std::vector<double> decompose_reparameterized(const std::vector<std::vector<double>>& jets,
                                              const std::vector<std::vector<double>>& extra,
                                              const std::vector<double>& ups_jet) {
  const size_t m2 = jets.size() - 1, n = m2 + 1, dim = jets[0].size();
  const double m = double(m2) / 2;
  Series delta(n, 0.0), dups(n, 0.0);
  double fact = 1;
  for (size_t k = 0; k < n; ++k) {
    if (k > 0) fact *= double(k);
    dups[k] = ups_jet[k] / fact;                  // series of ups'
    if (k + 1 < n) delta[k + 1] = ups_jet[k] / (fact * double(k + 1));  // ups - ups(tau0)
  }
  Series scale = series_pow(dups, -(2 * m - 1) / 2);
  // coefficient series of E(ups(tau)) on the basis Y_j / j!
  std::vector<Series> coef;
  Series power(n, 0.0);
  power[0] = 1;
  double jf = 1;
  for (size_t j = 0; j < n; ++j) {
    if (j > 0) jf *= double(j);
    Series c = series_mul(scale, power);
    for (auto& x : c) x /= jf;
    coef.push_back(std::move(c));
    power = series_mul(power, delta);
  }
  // z^(k) = k! sum_j coef[j][k] Y_j
  Eigen::MatrixXd a(dim, m2 + extra.size());
  Eigen::VectorXd target(dim);
  double kf = 1;
  for (size_t k = 0; k <= m2; ++k) {
    if (k > 0) kf *= double(k);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(long(dim));
    for (size_t j = 0; j < n; ++j)
      for (size_t i = 0; i < dim; ++i) z[long(i)] += kf * coef[j][k] * jets[j][i];
    if (k < m2)
      a.col(long(k)) = z;
    else
      target = z;
  }
  for (size_t e = 0; e < extra.size(); ++e)
    for (size_t i = 0; i < dim; ++i) a(long(i), long(m2 + e)) = extra[e][i];
  // The jets of the section can span many orders of magnitude; equilibrate columns.
  Eigen::VectorXd colscale(a.cols());
  for (long j = 0; j < a.cols(); ++j) {
    double nrm = a.col(j).norm();
    colscale[j] = nrm > 0 ? 1 / nrm : 1;
    a.col(j) *= colscale[j];
  }
  Eigen::VectorXd x = a.colPivHouseholderQr().solve(target);
  x = x.cwiseProduct(colscale);
  return std::vector<double>(x.data(), x.data() + m2);
}

namespace {

QVec qseries_mul(const QVec& a, const QVec& b) {
  QVec c(a.size(), 0);
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0)
      for (size_t j = 0; i + j < a.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

std::optional<mpq_class> rational_sqrt(const mpq_class& x) {
  if (x < 0 || !mpz_perfect_square_p(x.get_num_mpz_t()) || !mpz_perfect_square_p(x.get_den_mpz_t())) return std::nullopt;
  mpz_class num = sqrt(mpz_class(x.get_num())), den = sqrt(mpz_class(x.get_den()));
  return mpq_class(num, den);
}

}  // namespace

std::vector<mpq_class> decompose_reparameterized(const std::vector<QVec>& jets, const std::vector<QVec>& extra,
                                                 const QVec& ups_jet) {
  const size_t m2 = jets.size() - 1, n = m2 + 1;
  auto root = rational_sqrt(ups_jet[0]);
  if (ups_jet[0] <= 0 || !root)
    throw Error(ErrorKind::Degenerate, "wilczynski", "exact decomposition needs ups' to be the square of a positive rational");
  QVec delta(n, 0), dups(n, 0);
  mpq_class fact = 1;
  for (size_t k = 0; k < n; ++k) {
    if (k > 0) fact *= int(k);
    dups[k] = ups_jet[k] / fact;
    if (k + 1 < n) delta[k + 1] = ups_jet[k] / (fact * int(k + 1));
  }
  // ups'^(-(2m-1)/2) = root^(-(2m-1)) (ups'/ups'(0))^(-(2m-1)/2), the second factor by the power recurrence
  const mpq_class alpha(-int(m2 - 1), 2);
  QVec scale(n, 0);
  scale[0] = 1;
  for (size_t k = 1; k < n; ++k) {
    mpq_class s = 0;
    for (size_t j = 1; j <= k; ++j) s += ((alpha + 1) * int(j) - int(k)) * (dups[j] / dups[0]) * scale[k - j];
    scale[k] = s / int(k);
  }
  mpq_class lead = 1;
  for (size_t i = 0; i + 1 < m2; ++i) lead /= *root;
  for (auto& x : scale) x *= lead;
  std::vector<QVec> coef;
  QVec power(n, 0);
  power[0] = 1;
  mpq_class jf = 1;
  for (size_t j = 0; j < n; ++j) {
    if (j > 0) jf *= int(j);
    QVec c = qseries_mul(scale, power);
    for (auto& x : c) x /= jf;
    coef.push_back(std::move(c));
    power = qseries_mul(power, delta);
  }
  std::vector<QVec> basis;
  QVec target;
  mpq_class kf = 1;
  for (size_t k = 0; k <= m2; ++k) {
    if (k > 0) kf *= int(k);
    QVec z(jets[0].size(), 0);
    for (size_t j = 0; j < n; ++j)
      if (coef[j][k] != 0)
        for (size_t i = 0; i < z.size(); ++i) z[i] += kf * coef[j][k] * jets[j][i];
    if (k < m2)
      basis.push_back(std::move(z));
    else
      target = std::move(z);
  }
  for (const auto& e : extra) basis.push_back(e);
  auto x = solve_combination(basis, target);
  if (!x) throw Error(ErrorKind::Degenerate, "wilczynski", "derivative frame does not span the reparameterized jet");
  return QVec(x->begin(), x->begin() + long(m2));
}

namespace {

using State = std::vector<double>;

State axpy(const State& y, double h, const State& k) {
  State r = y;
  for (size_t i = 0; i < r.size(); ++i) r[i] += h * k[i];
  return r;
}

}  // namespace

Reparameterization projective_reparameterization(const BSource& src, int m, double half_width, double step) {
  const double c = law_constant(m);
  const size_t na = src.start.size();
  auto f = [&](const State& y) {
    State aux(y.begin(), y.begin() + long(na));
    const double ups = y[na], v = y[na + 1], w = y[na + 2];
    State d(y.size(), 0.0);
    if (na) {
      State a = src.rhs(aux);
      for (size_t i = 0; i < na; ++i) d[i] = v * a[i];
    }
    d[na] = v;
    d[na + 1] = 2 * w * v;
    d[na + 2] = w * w + v * v * src.b(ups, aux) / c;
    return d;
  };
  const int steps = int(std::lround(half_width / step));
  State y0 = src.start;
  y0.insert(y0.end(), {src.t0, 1.0, 0.0});
  auto integrate = [&](double h) {
    std::vector<State> out{y0};
    State y = y0;
    for (int i = 0; i < steps; ++i) {
      State k1 = f(y), k2 = f(axpy(y, h / 2, k1)), k3 = f(axpy(y, h / 2, k2)), k4 = f(axpy(y, h, k3));
      for (size_t j = 0; j < y.size(); ++j) y[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
      if (!std::isfinite(y[na]) || y[na + 1] <= 0)
        throw Error(ErrorKind::Degenerate, "wilczynski", "reparameterization ODE left its domain (ups' <= 0 or blow-up)");
      out.push_back(y);
    }
    return out;
  };
  auto fwd = integrate(step), bwd = integrate(-step);
  Reparameterization rep;
  rep.step = step;
  auto push = [&](const State& y, double tau) {
    rep.tau.push_back(tau);
    rep.state.emplace_back(y.begin(), y.begin() + long(na));
    rep.ups.push_back(y[na]);
    rep.dups.push_back(y[na + 1]);
    rep.w.push_back(y[na + 2]);
  };
  for (int i = steps; i >= 1; --i) push(bwd[size_t(i)], -i * step);
  for (int i = 0; i <= steps; ++i) push(fwd[size_t(i)], i * step);
  return rep;
}

BSource flow_source(const CurveSection& s, const QVec& lambda0) {
  BSource src;
  src.start = to_double(lambda0);
  src.rhs = [&s](const std::vector<double>& y) { return s.flow_rhs(y); };
  const RationalExpr& rho = s.rho();
  src.b = [&rho](double, const std::vector<double>& y) { return rho.eval(y); };
  return src;
}

std::vector<double> reparameterized_b_at(const CurveSection& s, const Reparameterization& rep, size_t i) {
  const int m = s.m(), order = 2 * m + 1;
  const size_t n = size_t(order + 1);
  const double c = law_constant(m);
  const auto& lambda = rep.state[i];
  // B along the flow as a series in t - ups_i
  Series b = series_eval(s.rho(), s.flow_series(lambda, order));
  Series ups(n, 0.0), v(n, 0.0), w(n, 0.0);
  ups[0] = rep.ups[i];
  v[0] = rep.dups[i];
  w[0] = rep.w[i];
  for (int it = 0; it <= order; ++it) {
    Series bu = series_compose(b, ups);
    Series dv = series_mul(w, v);
    for (auto& x : dv) x *= 2;
    Series dw = series_mul(w, w), vv = series_mul(v, v);
    Series t = series_mul(vv, bu);
    for (size_t k = 0; k < n; ++k) dw[k] += t[k] / c;
    Series nu = series_integral(v, rep.ups[i]);
    Series nv = series_integral(dv, rep.dups[i]);
    Series nw = series_integral(dw, rep.w[i]);
    ups = std::move(nu);
    v = std::move(nv);
    w = std::move(nw);
  }
  std::vector<double> jet;
  for (int k = 1; k <= 2 * m + 1; ++k) jet.push_back(series_jet(ups, k));
  std::vector<double> e(lambda.size(), 0.0);
  for (int k = 4; k <= s.chart().n; ++k) e[s.chart().u_index(k)] = lambda[s.chart().u_index(k)];
  return decompose_reparameterized(s.section_jets(lambda), {s.H().eval(lambda), e}, jet);
}

ReparameterizationCheck certify_reparameterization(const BSource& src, int m, const CurveSection* section,
                                                   double half_width, double step, int samples) {
  const double c = law_constant(m);
  Reparameterization a = projective_reparameterization(src, m, half_width, step);
  Reparameterization b = projective_reparameterization(src, m, half_width, step / 2);
  ReparameterizationCheck out;
  for (size_t i = 0; i < a.tau.size(); ++i)
    out.max_step_change = std::max(out.max_step_change, std::abs(a.ups[i] - b.ups[2 * i]));
  const size_t lo = 4, hi = a.tau.size() - 5;
  for (int s = 0; s < samples; ++s) {
    size_t i = lo + size_t(std::lround(double(hi - lo) * s / std::max(1, samples - 1)));
    auto d = [&](size_t k) { return (a.w[i + k] - a.w[i - k]) / (2 * double(k) * step); };
    double r1 = (4 * d(1) - d(2)) / 3, r2 = (4 * d(2) - d(4)) / 3;
    double dw = (16 * r1 - r2) / 15;
    double bt = a.dups[i] * a.dups[i] * src.b(a.ups[i], a.state[i]) - c * (dw - a.w[i] * a.w[i]);
    out.max_forward = std::max(out.max_forward, std::abs(bt));
    if (section) {
      auto bs = reparameterized_b_at(*section, a, i);
      out.max_recomputed = std::max(out.max_recomputed, std::abs(bs[size_t(2 * m - 2)]));
      out.max_top = std::max(out.max_top, std::abs(bs[size_t(2 * m - 1)]));
      for (double x : bs) out.b_scale = std::max(out.b_scale, std::abs(x));
    }
    ++out.samples;
  }
  return out;
}

nlohmann::json wilczynski_report(const CurveSection& s, const QVec& lambda) {
  nlohmann::json j;
  auto b = s.b_at(lambda);
  std::vector<double> bd;
  for (const auto& x : b) bd.push_back(x.get_d());
  j["B"] = bd;
  j["pairing"] = s.pairing().eval(lambda).get_d();
  j["normalized_pairing"] = s.normalized_pairing(lambda).get_d();
  j["all_B_vanish"] = std::all_of(b.begin(), b.end(), [](const mpq_class& x) { return x == 0; });
  return j;
}

}  // namespace r2g
