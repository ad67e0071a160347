#include "rank2geo/flags.hpp"

namespace r2g {

namespace {

std::vector<int> dims_of(const std::vector<std::vector<QVec>>& spaces) {
  std::vector<int> d;
  for (const auto& s : spaces) d.push_back(int(s.size()));
  return d;
}

bool contains_all(const std::vector<QVec>& big, const std::vector<QVec>& small) {
  for (const auto& v : small)
    if (!span_contains(big, v)) return false;
  return true;
}

// {v : sigma(w, v) = 0 for all w in span}
std::vector<QVec> skew_complement(const std::vector<QVec>& span, const QMat& s) {
  const size_t dim = s.size();
  QMat rows;
  for (const auto& w : span) {
    QVec r(dim, 0);
    for (size_t a = 0; a < dim; ++a) {
      if (w[a] == 0) continue;
      for (size_t b = 0; b < dim; ++b)
        if (s[a][b] != 0) r[b] += w[a] * s[a][b];
    }
    rows.push_back(std::move(r));
  }
  return span_basis(nullspace(rows, dim));
}

}  // namespace

std::vector<int> FlagAtPoint::upper_dims() const { return dims_of(upper); }
std::vector<int> FlagAtPoint::lower_dims() const { return dims_of(lower); }

std::vector<QVec> vertical_basis(int n) {
  std::vector<QVec> out;
  const size_t dim = size_t(2 * n - 3);
  for (int i = 4; i <= n; ++i) {
    QVec v(dim, 0);
    v[size_t(n + i - 4)] = 1;
    out.push_back(std::move(v));
  }
  return out;
}

FlagEngine::FlagEngine(CotangentChart cc, int extra_steps) : cc_(std::move(cc)), extra_(extra_steps) {}

std::vector<VectorField> FlagEngine::lift_fields() const {
  std::vector<VectorField> f{cc_.dist.X1.on(cc_.annihilator), cc_.dist.X2.on(cc_.annihilator)};
  for (int i = 4; i <= cc_.n; ++i) f.push_back(VectorField::partial(cc_.annihilator, cc_.u_index(i)));
  return f;
}

std::vector<QVec> FlagEngine::lift(const QVec& lambda) const {
  std::vector<QVec> vals;
  for (const auto& f : lift_fields()) vals.push_back(eval_point(f, lambda, "flags"));
  auto b = span_basis(vals);
  if (int(b.size()) != cc_.n - 1)
    throw Error(ErrorKind::Degenerate, "flags", "lift has dimension " + std::to_string(b.size()) + ", expected n-1");
  return b;
}

const std::vector<std::vector<VectorField>>& FlagEngine::families(bool normalized) const {
  auto& slot = normalized ? norm_ : raw_;
  if (!slot) {
    VectorField h = characteristic_field(cc_, normalized);
    std::vector<std::vector<VectorField>> fam{lift_fields()};
    for (int k = 1; k <= depth(); ++k) {
      std::vector<VectorField> next;
      for (const auto& f : fam.back()) next.push_back(lie_bracket(h, f));
      fam.push_back(std::move(next));
    }
    slot = std::move(fam);
  }
  return *slot;
}

FlagAtPoint FlagEngine::flag_at(const QVec& lambda, bool strict) const {
  const int n = cc_.n;
  if (lambda.size() != cc_.annihilator->dim())
    throw Error(ErrorKind::ChartMismatch, "flags", "point does not match the annihilator chart");
  FlagAtPoint f;
  f.lambda = lambda;
  f.n = n;
  const mpq_class& u4 = lambda[cc_.u_index(4)];
  const mpq_class& u5 = lambda[cc_.u_index(5)];
  if (u4 == 0 && u5 == 0)
    throw Error(ErrorKind::Degenerate, "flags", "u4 = u5 = 0: the point lies in the annihilator of D^3");
  f.normalized_field = u4 != 0;
  f.C = eval_point(characteristic_field(cc_, f.normalized_field), lambda, "flags");
  f.e = eval_exact(euler_field(cc_), lambda);
  f.sigma = sigma_matrix(cc_, lambda);

  const auto& fam = families(f.normalized_field);
  std::vector<QVec> acc;
  for (int k = 0; k <= depth(); ++k) {
    for (const auto& v : fam[size_t(k)]) acc.push_back(eval_point(v, lambda, "flags"));
    acc = span_basis(acc);
    f.upper.push_back(acc);
  }
  f.J = f.upper[0];
  const auto vert = vertical_basis(n);
  for (const auto& up : f.upper) {
    f.lower.push_back(skew_complement(up, f.sigma));
    f.vertical.push_back(intersect(f.lower.back(), vert, lambda.size()));
  }
  f.violations = flag_violations(f);
  if (strict && !f.violations.empty())
    throw Error(ErrorKind::Internal, "flags", "flag is inconsistent at the point: " + f.violations.front());
  return f;
}

std::vector<std::string> flag_violations(const FlagAtPoint& f) {
  std::vector<std::string> bad;
  const int n = f.n;
  auto up = f.upper_dims(), lo = f.lower_dims();
  if (int(f.J.size()) != n - 1) bad.push_back("dim J != n-1");
  if (!span_contains(f.J, f.C)) bad.push_back("characteristic direction not in J");
  if (!contains_all(f.J, vertical_basis(n))) bad.push_back("vertical space not in J");
  if (!same_span(f.lower[0], f.upper[0])) bad.push_back("J_(0) != J^(0) (sigma does not vanish on J)");
  for (size_t i = 1; i < f.upper.size(); ++i) {
    if (!contains_all(f.upper[i], f.upper[i - 1])) bad.push_back("J^(i-1) not in J^(i) at i=" + std::to_string(i));
    if (!contains_all(f.lower[i - 1], f.lower[i])) bad.push_back("J_(i) not in J_(i-1) at i=" + std::to_string(i));
    if (up[i] - up[i - 1] > 1) bad.push_back("J^(i) grows by more than one at i=" + std::to_string(i));
    if (lo[i - 1] - lo[i] > 1) bad.push_back("J_(i) drops by more than one at i=" + std::to_string(i));
    if (up[i] > 2 * n - 4) bad.push_back("dim J^(i) > 2n-4 at i=" + std::to_string(i));
    if (up[i - 1] == up[i] && i + 1 < f.upper.size() && up[i + 1] != up[i])
      bad.push_back("J^(i) grows again after stabilizing at i=" + std::to_string(i));
    if (!span_contains(f.lower[i], f.C) || int(f.vertical[i].size()) + 1 != lo[i] || span_contains(f.vertical[i], f.C))
      bad.push_back("J_(i) != V_i + C at i=" + std::to_string(i));
  }
  if (f.upper.size() > 1) {
    if (up[1] - up[0] != 1) bad.push_back("dim J^(1) - dim J != 1");
    if (lo[0] - lo[1] != 1) bad.push_back("dim J - dim J_(1) != 1");
  }
  return bad;
}

ClassReport FlagEngine::class_nu(const QVec& lambda) const {
  FlagAtPoint f = flag_at(lambda);
  ClassReport r;
  r.upper_dims = f.upper_dims();
  r.nu = -1;
  for (size_t i = 0; i + 1 < r.upper_dims.size(); ++i)
    if (r.upper_dims[i + 1] == r.upper_dims[i]) {
      r.nu = int(i);
      break;
    }
  if (r.nu < 1 || r.nu > cc_.n - 3)
    throw Error(ErrorKind::Internal, "flags", "the flag J^(i) did not stabilize within n-3 steps");
  r.maximal = r.nu == cc_.n - 3;
  r.in_RD = r.maximal;  // flag_at already rejected points of the annihilator of D^3
  return r;
}

QuotientModel FlagEngine::quotient_symplectic(const FlagAtPoint& f) const {
  const size_t dim = f.lambda.size();
  QuotientModel q;
  auto ker = nullspace({liouville_row(cc_, f.lambda)}, dim);
  std::vector<QVec> base{f.C, f.e};
  if (span_dim(base) != 2) throw Error(ErrorKind::Degenerate, "flags", "H and e are dependent at the point");
  for (const auto& v : ker) {
    auto trial = base;
    trial.push_back(v);
    if (span_dim(trial) == trial.size()) {
      base = std::move(trial);
      q.complement.push_back(v);
    }
  }
  if (int(q.complement.size()) != 2 * (cc_.n - 3))
    throw Error(ErrorKind::Internal, "flags", "dim W != 2(n-3)");
  const size_t w = q.complement.size();
  // basis order for solving: complement, then C, e
  std::vector<QVec> solve_basis = q.complement;
  solve_basis.push_back(f.C);
  solve_basis.push_back(f.e);
  auto image = [&](const std::vector<QVec>& space) {
    std::vector<QVec> out;
    for (const auto& v : space) {
      auto x = solve_combination(solve_basis, v);
      if (!x) throw Error(ErrorKind::Internal, "flags", "flag subspace is not inside the kernel of the Liouville form");
      out.emplace_back(x->begin(), x->begin() + long(w));
    }
    return span_basis(out);
  };
  q.sigma.assign(w, QVec(w, 0));
  for (size_t i = 0; i < w; ++i)
    for (size_t j = 0; j < w; ++j) q.sigma[i][j] = bilinear(q.complement[i], f.sigma, q.complement[j]);
  if (rank(q.sigma) != w) throw Error(ErrorKind::Internal, "flags", "induced form on W is degenerate");
  q.J = image(f.J);
  for (const auto& s : f.upper) q.upper.push_back(image(s));
  for (const auto& s : f.lower) q.lower.push_back(image(s));
  q.lagrangian = int(q.J.size()) == cc_.n - 3;
  for (const auto& a : q.J)
    for (const auto& b : q.J)
      if (bilinear(a, q.sigma, b) != 0) q.lagrangian = false;
  q.duality = true;
  for (size_t i = 0; i < q.upper.size(); ++i)
    if (!same_span(q.lower[i], skew_complement(q.upper[i], q.sigma))) q.duality = false;
  return q;
}

VectorField FlagEngine::top_vertical_section(const QVec& reference) const {
  const int n = cc_.n;
  const size_t nv = size_t(n - 3);
  const auto& fam = families(true);
  // Rows theta^i(pi_* w), i >= 4, for w in J^(n-4); keep a subset independent at the reference point.
  std::vector<std::vector<RationalExpr>> rows;
  std::vector<QVec> vals;
  for (int k = 1; k <= n - 4; ++k)
    for (const auto& w : fam[size_t(k)]) {
      auto t = cc_.coframe(w);
      std::vector<RationalExpr> row(t.begin() + 3, t.end());
      QVec v(nv, 0);
      for (size_t i = 0; i < nv; ++i)
        if (!row[i].is_zero()) v[i] = row[i].eval(reference);
      auto trial = vals;
      trial.push_back(v);
      if (span_dim(trial) > span_dim(vals)) {
        vals = std::move(trial);
        rows.push_back(std::move(row));
      }
    }
  if (rows.size() + 2 != nv)
    throw Error(ErrorKind::Degenerate, "flags", "V_{n-4} is not two-dimensional: the point is not of maximal class");
  auto ker = symbolic_nullspace(rows, nv);
  if (ker.size() != 2) throw Error(ErrorKind::Internal, "flags", "symbolic kernel for V_{n-4} has the wrong rank");
  std::vector<RationalExpr> l(nv);
  for (size_t i = 0; i < nv; ++i) l[i] = ker[0][i] * ker[1][0] - ker[1][i] * ker[0][0];
  size_t last = nv;
  for (size_t i = nv; i-- > 0;)
    if (!l[i].is_zero()) {
      last = i;
      break;
    }
  if (last == nv) throw Error(ErrorKind::Degenerate, "flags", "V_{n-4} collapses onto the Euler field");
  RationalExpr scale = l[last].inverse();
  VectorField out(cc_.annihilator);
  for (size_t i = 0; i < nv; ++i)
    if (!l[i].is_zero()) out[size_t(n) + i] = l[i] * scale;
  return out;
}

bool FlagEngine::bracket_route_agrees(const FlagAtPoint& f, const VectorField& l) const {
  const int n = cc_.n;
  VectorField h = characteristic_field(cc_, true);
  std::vector<QVec> span{f.C, f.e};
  std::vector<VectorField> chain{l};
  for (int k = 1; k <= n - 4; ++k) chain.push_back(lie_bracket(h, chain.back()));
  for (int i = n - 4; i >= 0; --i) {
    span.push_back(eval_point(chain[size_t(n - 4 - i)], f.lambda, "flags"));
    if (!same_span(span, f.lower[size_t(i)])) return false;
  }
  return true;
}

ClassReport class_at(const DistributionSpec& d, const QVec& lambda) {
  const int n = int(d.chart->dim());
  QVec q(lambda.begin(), lambda.begin() + n);
  ClassReport r;
  if (n >= 4 && d3_dimension(d, q) == 4) {
    r.nu = 1;
    r.class_one = true;
    r.maximal = n - 3 == 1;
    r.reason = kClassOneReason;
    return r;
  }
  FlagEngine eng(quasi_impulses(d, q));
  return eng.class_nu(lambda);
}

nlohmann::json flag_report(const FlagAtPoint& f, const ClassReport& c) {
  nlohmann::json j;
  std::vector<std::string> pt;
  for (const auto& x : f.lambda) pt.push_back(x.get_str());
  j["lambda"] = pt;
  j["field"] = f.normalized_field ? "normalized" : "raw";
  j["dim_upper"] = f.upper_dims();
  j["dim_lower"] = f.lower_dims();
  j["dim_vertical"] = dims_of(f.vertical);
  j["nu"] = c.nu;
  j["maximal"] = c.maximal;
  j["in_RD"] = c.in_RD;
  j["violations"] = f.violations;
  return j;
}

}  // namespace r2g
