#include "rank2geo/frame.hpp"

#include <algorithm>
#include <cmath>

namespace r2g {

namespace {

using Comps = std::vector<RationalExpr>;

Comps comps(const VectorField& f) { return f.components(); }

RationalExpr coord(const ChartPtr& c, size_t i) { return RationalExpr::coordinate(c, i); }

mpq_class law_constant_exact(int m) { return mpq_class(m * (4 * m * m - 1), 3); }

// Value and gradient of a rational function at a point, without forming
// symbolic derivatives of the quotient.
struct ScalarJet {
  mpq_class value;
  QVec grad;
};

ScalarJet scalar_jet(const RationalExpr& e, const QVec& pt, size_t dim) {
  ScalarJet j{0, QVec(dim, 0)};
  if (e.is_zero()) return j;
  const mpq_class nv = e.num().eval(pt), dv = e.den().eval(pt);
  if (dv == 0) throw Error(ErrorKind::Pole, "frame", "frame field has a pole at the sample point");
  j.value = nv / dv;
  const uint32_t supp = e.num().support() | e.den().support();
  for (size_t v = 0; v < dim && v < 32; ++v) {
    if (!(supp >> v & 1u)) continue;
    mpq_class dn = e.num().diff(int(v)).eval(pt), dd = e.den().diff(int(v)).eval(pt);
    j.grad[v] = (dn * dv - nv * dd) / (dv * dv);
  }
  return j;
}

QVec add_scaled(QVec a, const mpq_class& s, const QVec& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
  return a;
}

struct PointData {
  QVec grad_log_r;
  double r = 0;
};

PointData point_data(const FrameBuilder& fb, const QVec& pt) {
  const size_t dim = fb.chart()->dim();
  ScalarJet p = scalar_jet(fb.pairing(), pt, dim);
  if (p.value == 0) throw Error(ErrorKind::NotRegular, "frame", "pairing of the derivative frame vanishes (point outside R_D)");
  const mpq_class a = pt[fb.a_index()];
  if (a <= 0) throw Error(ErrorKind::Degenerate, "frame", "fiber coordinate a must be positive");
  PointData d;
  d.grad_log_r.assign(dim, 0);
  for (size_t j = 0; j < dim; ++j) d.grad_log_r[j] = -p.grad[j] / (2 * p.value);
  d.grad_log_r[fb.a_index()] += mpq_class(2 * fb.m() - 1, 2) / a;
  d.r = fb.r_at(pt);
  return d;
}

// Pointwise weighted bracket, field part only (weight kx + ky).
QVec jet_bracket(const FieldJet& x, const FieldJet& y, const QVec& grad_log_r) {
  QVec z = mat_vec(y.jac, x.value);
  QVec t = mat_vec(x.jac, y.value);
  for (size_t i = 0; i < z.size(); ++i) z[i] -= t[i];
  if (y.weight) z = add_scaled(z, y.weight * dot(grad_log_r, x.value), y.value);
  if (x.weight) z = add_scaled(z, -x.weight * dot(grad_log_r, y.value), x.value);
  return z;
}

double weighted(const mpq_class& q, double r, int e) { return q.get_d() * std::pow(r, e); }

}  // namespace

// ------------------------------------------------------------------ builder

FrameBuilder::FrameBuilder(const CurveSection& s) : n_(s.chart().n) {
  if (n_ <= 5)
    throw Error(ErrorKind::Degenerate, "frame",
                "n = " + std::to_string(n_) + ": the canonical frame on Sigma_D needs n > 5 (n = 5 requires a further prolongation)");
  std::vector<std::string> names = s.chart().annihilator->names();
  names.push_back("a");
  names.push_back("b");
  chart_ = Chart::make(names);
  p_ = s.pairing().on(chart_);
  ell_ = s.ell().on(chart_);
  const RationalExpr a = coord(chart_, a_index()), b = coord(chart_, b_index());
  const RationalExpr rho = s.rho().on(chart_);

  VectorField h = s.H().on(chart_).scaled(a.inverse());
  h[a_index()] = RationalExpr(-2) * b;
  h[b_index()] = (rho / RationalExpr(law_constant_exact(m())) - b * b) / a;
  h_ = {0, h};

  VectorField g0(chart_);
  for (int i = 4; i <= n_; ++i) {
    size_t k = s.chart().u_index(i);
    g0[k] = RationalExpr(2) * coord(chart_, k);
  }
  g0_ = {0, g0};
  g1_ = {0, VectorField::partial(chart_, a_index()).scaled(RationalExpr(2) * a)};
  g2_ = {0, VectorField::partial(chart_, b_index()).scaled(-a)};
}

RationalExpr FrameBuilder::log_r_derivative(const VectorField& x) const {
  const RationalExpr a = coord(chart_, a_index());
  RationalExpr out = x.apply(p_) / (RationalExpr(-2) * p_);
  if (!x[a_index()].is_zero()) out += RationalExpr(mpq_class(2 * m() - 1, 2)) * x[a_index()] / a;
  return out;
}

WeightedField FrameBuilder::bracket(const WeightedField& x, const WeightedField& y) const {
  VectorField z = lie_bracket(x.field, y.field);
  if (y.weight) z += y.field.scaled(RationalExpr(y.weight) * log_r_derivative(x.field));
  if (x.weight) z -= x.field.scaled(RationalExpr(x.weight) * log_r_derivative(y.field));
  return {x.weight + y.weight, z};
}

WeightedField FrameBuilder::epsilon1() const { return {1, ell_}; }

WeightedField FrameBuilder::candidate(const RationalExpr& c0, const RationalExpr& c1, const RationalExpr& c2) const {
  VectorField f = ell_;
  if (!c0.is_zero()) f += g0_.field.scaled(c0);
  if (!c1.is_zero()) f += g1_.field.scaled(c1);
  if (!c2.is_zero()) f += g2_.field.scaled(c2);
  return {1, f};
}

FrameChain FrameBuilder::recursion(const WeightedField& e1) const {
  FrameChain c;
  c.eps.push_back(e1);
  for (int i = 2; i <= 2 * m(); ++i) {
    WeightedField y = bracket(h_, c.eps.back());
    if (i <= m() - 1) {
      // projection onto W_i parallel to h
      RationalExpr tau = y.field[0] / h_.field[0];
      if (!tau.is_zero()) y.field -= h_.field.scaled(tau);
      for (int k = 0; k < n_; ++k)
        if (!y.field[size_t(k)].is_zero())
          throw Error(ErrorKind::Internal, "frame", "projection of [h, eps_" + std::to_string(i - 1) + "] has a base component");
    }
    c.eps.push_back(y);
  }
  c.eta = bracket(c.eps.front(), c.eps.back());
  return c;
}

Kappas FrameBuilder::kappas(const FrameChain& c) const {
  const auto& e = c.eps;
  auto solve = [&](const WeightedField& target, const std::vector<const WeightedField*>& basis) {
    std::vector<Comps> b;
    for (const auto* f : basis) b.push_back(comps(f->field));
    auto co = solve_in_basis(b, comps(target.field));
    if (!co) throw Error(ErrorKind::Internal, "frame", "bracket of frame fields leaves the filtration subspace");
    return *co;
  };
  Kappas k;
  auto c12 = solve(bracket(e[0], e[1]), {&g0_, &g1_, &g2_, &e[0], &e[1]});
  k.k1 = c12[4];
  auto c14 = solve(bracket(e[0], e[3]), {&h_, &g0_, &g1_, &g2_, &e[0], &e[1], &e[2], &e[3]});
  k.k2 = c14[6];
  k.k3 = c14[7];
  return k;
}

NormalizedFrame FrameBuilder::normalize(const WeightedField& cand, int branch) const {
  if (branch != 1 && branch != -1) throw Error(ErrorKind::Internal, "frame", "branch must be +1 or -1");
  NormalizedFrame out;
  out.branch = branch;
  Kappas k = kappas(recursion(cand));
  const int m = this->m();
  out.mu1 = (k.k3 - k.k1) / RationalExpr(4);
  out.mu0 = k.k1 + RationalExpr(2 * m - 3) * out.mu1;
  out.mu2 = -k.k2 / RationalExpr(6 * m - 9);
  VectorField e1 = cand.field;
  if (!out.mu0.is_zero()) e1 += g0_.field.scaled(out.mu0);
  if (!out.mu1.is_zero()) e1 += g1_.field.scaled(out.mu1);
  if (!out.mu2.is_zero()) e1 += g2_.field.scaled(out.mu2);
  if (branch < 0) e1 = -e1;
  out.chain = recursion({1, e1});
  out.fields = {h_, g0_, g1_, g2_};
  out.names = {"h", "g0", "g1", "g2"};
  for (size_t i = 0; i < out.chain.eps.size(); ++i) {
    out.fields.push_back(out.chain.eps[i]);
    out.names.push_back("e" + std::to_string(i + 1));
  }
  out.fields.push_back(out.chain.eta);
  out.names.push_back("eta");
  return out;
}

double FrameBuilder::r_at(const QVec& point) const {
  const double a = point[a_index()].get_d();
  const double p = std::abs(p_.eval(point).get_d());
  return std::sqrt(std::pow(a, 2 * m() - 1) / p);
}

QVec FrameBuilder::sigma_point(const QVec& lambda, const mpq_class& a, const mpq_class& b) const {
  QVec p = lambda;
  p.resize(chart_->dim() - 2);
  p.push_back(a);
  p.push_back(b);
  return p;
}

AffineLine FrameBuilder::epsilon1_affine(const QVec& lambda, const mpq_class& a) const {
  QVec pt = sigma_point(lambda, a, 0);
  const double r = r_at(pt);
  AffineLine line;
  const size_t dim = chart_->dim() - 2;
  for (size_t i = 0; i < dim; ++i) {
    line.point.push_back(r * ell_[i].eval(pt).get_d());
    line.direction.push_back(0);
  }
  for (int i = 4; i <= n_; ++i) {
    size_t k = size_t(n_ + i - 4);
    line.direction[k] = lambda[k].get_d();
  }
  return line;
}

// --------------------------------------------------------------- pointwise

FieldJet field_jet(const WeightedField& f, const QVec& point) {
  const size_t dim = f.field.dim();
  FieldJet j;
  j.weight = f.weight;
  j.value.assign(dim, 0);
  j.jac.assign(dim, QVec(dim, 0));
  for (size_t i = 0; i < dim; ++i) {
    ScalarJet s = scalar_jet(f.field[i], point, dim);
    j.value[i] = s.value;
    j.jac[i] = std::move(s.grad);
  }
  return j;
}

size_t StructureTable::index(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error(ErrorKind::Internal, "frame", "no frame field named " + name);
  return size_t(it - names.begin());
}

double StructureTable::at(const std::string& x, const std::string& y, const std::string& z) const {
  return c[index(x)][index(y)][index(z)];
}

StructureTable structure_table(const FrameBuilder& fb, const NormalizedFrame& f, const QVec& point) {
  const size_t N = f.fields.size();
  PointData pd = point_data(fb, point);
  std::vector<FieldJet> jets;
  for (const auto& w : f.fields) jets.push_back(field_jet(w, point));
  QMat cols(N, QVec(N));
  for (size_t i = 0; i < N; ++i)
    for (size_t g = 0; g < N; ++g) cols[i][g] = jets[g].value[i];
  QMat inv;
  try {
    inv = inverse(cols);
  } catch (const Error&) {
    throw Error(ErrorKind::NotRegular, "frame", "the 2n-1 fields are linearly dependent at the sample point");
  }
  StructureTable t;
  t.names = f.names;
  t.point = point;
  t.r = pd.r;
  t.c.assign(N, std::vector<std::vector<double>>(N, std::vector<double>(N, 0.0)));
  for (size_t x = 0; x < N; ++x)
    for (size_t y = x + 1; y < N; ++y) {
      QVec co = mat_vec(inv, jet_bracket(jets[x], jets[y], pd.grad_log_r));
      for (size_t z = 0; z < N; ++z) {
        if (co[z] == 0) continue;
        double v = weighted(co[z], pd.r, jets[x].weight + jets[y].weight - jets[z].weight);
        t.c[x][y][z] = v;
        t.c[y][x][z] = -v;
      }
    }
  return t;
}

std::vector<double> kappas_at(const FrameBuilder& fb, const FrameChain& c, const QVec& point) {
  PointData pd = point_data(fb, point);
  std::vector<FieldJet> e;
  for (size_t i = 0; i < 4; ++i) e.push_back(field_jet(c.eps[i], point));
  FieldJet h = field_jet(fb.h(), point), g0 = field_jet(fb.g0(), point), g1 = field_jet(fb.g1(), point),
           g2 = field_jet(fb.g2(), point);
  auto co12 = solve_combination({g0.value, g1.value, g2.value, e[0].value, e[1].value}, jet_bracket(e[0], e[1], pd.grad_log_r));
  auto co14 = solve_combination({h.value, g0.value, g1.value, g2.value, e[0].value, e[1].value, e[2].value, e[3].value},
                                jet_bracket(e[0], e[3], pd.grad_log_r));
  if (!co12 || !co14) throw Error(ErrorKind::Internal, "frame", "bracket of frame fields leaves the filtration subspace");
  return {weighted((*co12)[4], pd.r, 1), weighted((*co14)[6], pd.r, 1), weighted((*co14)[7], pd.r, 1)};
}

StructureTable expected_flat_table(int m) {
  StructureTable t;
  t.names = {"h", "g0", "g1", "g2"};
  for (int i = 1; i <= 2 * m; ++i) t.names.push_back("e" + std::to_string(i));
  t.names.push_back("eta");
  const size_t N = t.names.size();
  t.c.assign(N, std::vector<std::vector<double>>(N, std::vector<double>(N, 0.0)));
  auto set = [&](const std::string& x, const std::string& y, const std::string& z, double v) {
    t.c[t.index(x)][t.index(y)][t.index(z)] = v;
    t.c[t.index(y)][t.index(x)][t.index(z)] = -v;
  };
  auto e = [](int i) { return "e" + std::to_string(i); };
  set("g1", "g2", "g2", 2);
  set("g1", "h", "h", -2);
  set("g2", "h", "g1", 1);
  for (int i = 1; i <= 2 * m; ++i) {
    if (i < 2 * m) set("h", e(i), e(i + 1), 1);
    if (i <= m) set(e(i), e(2 * m - i + 1), "eta", i % 2 ? 1 : -1);
    set("g1", e(i), e(i), 2 * m - 2 * i + 1);
    if (i >= 2) set("g2", e(i), e(i - 1), (i - 1) * (2 * m + 1 - i));
    set("g0", e(i), e(i), -1);
  }
  set("g0", "eta", "eta", -2);
  return t;
}

SymmetryVerdict detect_max_symmetry(const std::vector<StructureTable>& tables, double tol) {
  if (tables.size() < 5)
    throw Error(ErrorKind::Degenerate, "frame", "maximal-symmetry detection needs structure tables at >= 5 points");
  const size_t N = tables.front().size();
  for (const auto& t : tables)
    if (t.size() != N || t.names != tables.front().names)
      throw Error(ErrorKind::Internal, "frame", "structure tables of different frames");
  StructureTable want = expected_flat_table(int(N - 5) / 2);
  SymmetryVerdict v;
  struct Diff {
    double score;
    nlohmann::json entry;
  };
  std::vector<Diff> diffs;
  for (size_t x = 0; x < N; ++x)
    for (size_t y = x + 1; y < N; ++y)
      for (size_t z = 0; z < N; ++z) {
        double lo = tables[0].c[x][y][z], hi = lo, dev = 0;
        std::vector<double> vals;
        for (const auto& t : tables) {
          double c = t.c[x][y][z];
          lo = std::min(lo, c);
          hi = std::max(hi, c);
          dev = std::max(dev, std::abs(c - want.c[x][y][z]));
          vals.push_back(c);
        }
        v.max_variation = std::max(v.max_variation, hi - lo);
        v.max_deviation = std::max(v.max_deviation, dev);
        if (hi - lo > tol || dev > tol) {
          const auto& nm = tables[0].names;
          diffs.push_back({std::max(hi - lo, dev),
                           {{"bracket", "[" + nm[x] + "," + nm[y] + "]"},
                            {"component", nm[z]},
                            {"expected", want.c[x][y][z]},
                            {"variation", hi - lo},
                            {"values", vals}}});
        }
      }
  std::sort(diffs.begin(), diffs.end(), [](const Diff& a, const Diff& b) { return a.score > b.score; });
  for (size_t i = 0; i < diffs.size() && i < 50; ++i) v.diffs.push_back(diffs[i].entry);
  v.maximal = v.max_variation <= tol && v.max_deviation <= tol;
  return v;
}

// --------------------------------------------------------------- flat model

FlatModel flat_model(int n) {
  if (n <= 5)
    throw Error(ErrorKind::Degenerate, "frame", "flat model oracle needs n > 5 (got n = " + std::to_string(n) + ")");
  const int m = n - 3;
  FlatModel fm;
  ChartPtr oc = ode_chart(n);
  fm.dist = from_ode(n, parse_expr("1/2*p" + std::to_string(m) + "^2", oc));
  QVec q(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) q[size_t(i)] = i;
  fm.cc = quasi_impulses(fm.dist, q);
  const auto& cc = fm.cc;
  const ChartPtr& A = cc.annihilator;
  auto u = [&](int i) { return coord(A, cc.u_index(i)); };
  auto du = [&](int i) { return VectorField::partial(A, cc.u_index(i)); };

  fm.H = cc.X[1].on(A) - cc.X[0].on(A).scaled(u(5) / u(4));
  for (int i = 5; i <= m + 2; ++i) fm.H += du(i).scaled(u(i + 1));

  fm.sqrt_u4 = std::make_shared<const Radical>(u(4), "|u4|^(1/2)");
  fm.eps_H = to_surd(du(m + 3)).scaled(SurdExpr::root(fm.sqrt_u4));
  SurdField hs = to_surd(fm.H);
  fm.ad_chain.push_back(fm.eps_H);
  for (int i = 1; i < 2 * m; ++i) fm.ad_chain.push_back(lie_bracket(hs, fm.ad_chain.back()));

  std::vector<std::string> names = A->names();
  names.push_back("a");
  names.push_back("b");
  ChartPtr S = Chart::make(names);
  const size_t ia = S->dim() - 2, ib = S->dim() - 1;
  RationalExpr a = coord(S, ia), b = coord(S, ib);
  fm.g1 = VectorField::partial(S, ia).scaled(RationalExpr(2) * a);
  fm.g2 = VectorField::partial(S, ib).scaled(-a);
  fm.g0 = VectorField(S);
  for (int i = 4; i <= n; ++i) fm.g0[cc.u_index(i)] = RationalExpr(2) * coord(S, cc.u_index(i));
  fm.h = fm.H.on(S).scaled(a.inverse());
  fm.h[ia] = RationalExpr(-2) * b;
  fm.h[ib] = -(b * b) / a;
  return fm;
}

nlohmann::json frame_report(const StructureTable& t) {
  nlohmann::json j;
  j["fields"] = t.names;
  std::vector<std::string> pt;
  for (const auto& x : t.point) pt.push_back(rational_str(x));
  j["point"] = pt;
  j["r"] = t.r;
  nlohmann::json entries = nlohmann::json::array();
  for (size_t x = 0; x < t.size(); ++x)
    for (size_t y = x + 1; y < t.size(); ++y)
      for (size_t z = 0; z < t.size(); ++z)
        if (std::abs(t.c[x][y][z]) > 1e-12)
          entries.push_back({{"bracket", "[" + t.names[x] + "," + t.names[y] + "]"}, {"component", t.names[z]}, {"value", t.c[x][y][z]}});
  j["structure"] = entries;
  return j;
}

}  // namespace r2g
