#include "rank2geo/cotangent.hpp"

namespace r2g {

const char* const kClassOneReason = "dim D^3(q) = 4: class 1 (Goursat-type) point";

namespace {

std::vector<QVec> evaluate_all(const std::vector<VectorField>& fields, const QVec& q) {
  std::vector<QVec> out;
  for (const auto& f : fields) out.push_back(eval_point(f, q, "cotangent"));
  return out;
}

// Right-normed words over {X1, X2} of a given length, in lexicographic order.
void words_of_length(int len, std::vector<std::vector<int>>& out, std::vector<int>& cur) {
  if (int(cur.size()) == len) {
    out.push_back(cur);
    return;
  }
  for (int g = 1; g <= 2; ++g) {
    cur.push_back(g);
    words_of_length(len, out, cur);
    cur.pop_back();
  }
}

}  // namespace

size_t CotangentChart::u_index(int i) const {
  if (i >= 4) return size_t(n + i - 4);
  return size_t(n + (n - 3) + i - 1);
}

RationalExpr CotangentChart::u(int i) const {
  if (i >= 4) return RationalExpr::coordinate(annihilator, u_index(i));
  return RationalExpr::coordinate(full, u_index(i));
}

std::vector<RationalExpr> CotangentChart::coframe(const VectorField& v) const {
  std::vector<RationalExpr> t(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    RationalExpr s;
    for (int c = 0; c < n; ++c) {
      if (v[size_t(c)].is_zero() || theta[size_t(i)][size_t(c)].is_zero()) continue;
      s += theta[size_t(i)][size_t(c)] * v[size_t(c)];
    }
    t[size_t(i)] = std::move(s);
  }
  return t;
}

bool CotangentChart::on_annihilator(const VectorField& v) const { return v.chart() == annihilator; }

int d3_dimension(const DistributionSpec& d, const QVec& q) {
  VectorField x3 = lie_bracket(d.X1, d.X2);
  std::vector<VectorField> f{d.X1, d.X2, x3, lie_bracket(d.X1, x3), lie_bracket(d.X2, x3)};
  return int(span_dim(evaluate_all(f, q)));
}

int d3_dimension(const CotangentChart& cc) {
  std::vector<VectorField> f(cc.X.begin(), cc.X.begin() + 5);
  return int(span_dim(evaluate_all(f, cc.base_point)));
}

CotangentChart quasi_impulses(const DistributionSpec& d, const QVec& q) {
  CotangentChart cc;
  cc.dist = d;
  cc.n = int(d.chart->dim());
  const int n = cc.n;
  if (n < 5) throw Error(ErrorKind::Degenerate, "cotangent", "the annihilator of D^2 needs n >= 5");
  cc.base_point = q;
  cc.base = d.chart;
  std::vector<std::string> names = d.chart->names();
  for (int i = 4; i <= n; ++i) names.push_back("u" + std::to_string(i));
  cc.annihilator = Chart::make(names);
  for (int i = 1; i <= 3; ++i) names.push_back("u" + std::to_string(i));
  cc.full = Chart::make(names);

  VectorField x3 = lie_bracket(d.X1, d.X2);
  if (x3.is_zero()) throw Error(ErrorKind::Degenerate, "cotangent", "[X1,X2] = 0: the distribution is involutive");
  cc.X = {d.X1, d.X2, x3, lie_bracket(d.X1, x3), lie_bracket(d.X2, x3)};
  cc.words = {"X1", "X2", "X3=[X1,X2]", "X4=[X1,X3]", "X5=[X2,X3]"};
  std::vector<QVec> vals = evaluate_all(cc.X, q);
  if (span_dim({vals[0], vals[1]}) < 2)
    throw Error(ErrorKind::Degenerate, "cotangent", "generators are dependent at the base point");
  if (span_dim({vals[0], vals[1], vals[2]}) < 3)
    throw Error(ErrorKind::Degenerate, "cotangent", "dim D^2(q) = 2: no abnormal directions");
  int d3 = int(span_dim(vals));
  if (d3 == 4) throw Error(ErrorKind::NotRegular, "cotangent", kClassOneReason);
  if (d3 < 5) throw Error(ErrorKind::Degenerate, "cotangent", "dim D^3(q) < 5 at the base point");

  // Complete to a frame: (ad X2)^k X5, then (ad X2)^k X4, then other words.
  struct Candidate {
    std::string label;
    VectorField f;
  };
  auto try_add = [&](const VectorField& f, const std::string& label) {
    if (int(cc.X.size()) == n || f.is_zero()) return;
    QVec v = eval_point(f, q, "cotangent");
    std::vector<QVec> trial = vals;
    trial.push_back(v);
    if (span_dim(trial) == vals.size() + 1) {
      cc.X.push_back(f);
      cc.words.push_back("X" + std::to_string(cc.X.size()) + "=" + label);
      vals = std::move(trial);
    }
  };
  VectorField y = cc.X[4];
  for (int k = 1; k <= n && int(cc.X.size()) < n; ++k) {
    y = lie_bracket(d.X2, y);
    try_add(y, "(ad X2)^" + std::to_string(k) + " X5");
  }
  y = cc.X[3];
  for (int k = 1; k <= n && int(cc.X.size()) < n; ++k) {
    y = lie_bracket(d.X2, y);
    try_add(y, "(ad X2)^" + std::to_string(k) + " X4");
  }
  for (int len = 4; len <= n + 1 && int(cc.X.size()) < n; ++len) {
    std::vector<std::vector<int>> ws;
    std::vector<int> cur;
    words_of_length(len, ws, cur);
    for (const auto& w : ws) {
      if (int(cc.X.size()) == n) break;
      VectorField f = w.back() == 1 ? d.X1 : d.X2;
      std::string label = w.back() == 1 ? "X1" : "X2";
      for (int i = int(w.size()) - 2; i >= 0; --i) {
        f = lie_bracket(w[size_t(i)] == 1 ? d.X1 : d.X2, f);
        label = "[X" + std::to_string(w[size_t(i)]) + "," + label + "]";
      }
      try_add(f, label);
    }
  }
  if (int(cc.X.size()) < n)
    throw Error(ErrorKind::Degenerate, "cotangent", "bracket words do not complete to a frame at the base point");

  std::vector<std::vector<RationalExpr>> m(static_cast<size_t>(n), std::vector<RationalExpr>(static_cast<size_t>(n)));
  for (int c = 0; c < n; ++c)
    for (int i = 0; i < n; ++i) m[size_t(c)][size_t(i)] = cc.X[size_t(i)][size_t(c)];
  auto inv = symbolic_inverse(m);
  if (!inv) throw Error(ErrorKind::Degenerate, "cotangent", "adapted frame is singular");
  cc.theta = std::move(*inv);

  cc.brackets.assign(static_cast<size_t>(n), std::vector<VectorField>(static_cast<size_t>(n), VectorField(cc.base)));
  cc.structure.assign(static_cast<size_t>(n), std::vector<std::vector<RationalExpr>>(static_cast<size_t>(n), std::vector<RationalExpr>(static_cast<size_t>(n))));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      VectorField br = lie_bracket(cc.X[size_t(a)], cc.X[size_t(b)]);
      cc.structure[size_t(a)][size_t(b)] = cc.coframe(br);
      std::vector<RationalExpr> neg = cc.structure[size_t(a)][size_t(b)];
      for (auto& x : neg) x = -x;
      cc.structure[size_t(b)][size_t(a)] = std::move(neg);
      cc.brackets[size_t(b)][size_t(a)] = -br;
      cc.brackets[size_t(a)][size_t(b)] = std::move(br);
    }
  return cc;
}

namespace {

// sum_k c^k_{ab} u_k over k in [kmin, n]
RationalExpr omega(const CotangentChart& cc, int a, int b, int kmin) {
  RationalExpr s;
  for (int k = kmin; k <= cc.n; ++k) {
    const RationalExpr& c = cc.structure[size_t(a - 1)][size_t(b - 1)][size_t(k - 1)];
    if (!c.is_zero()) s += c * cc.u(k);
  }
  return s;
}

}  // namespace

VectorField impulse_lift(const CotangentChart& cc, int a) {
  VectorField f = cc.X[size_t(a - 1)].on(cc.full);
  for (int i = 1; i <= cc.n; ++i) f[cc.u_index(i)] = omega(cc, a, i, 1).on(cc.full);
  return f;
}

VectorField impulse_lift_on_annihilator(const CotangentChart& cc, int a) {
  VectorField f = cc.X[size_t(a - 1)].on(cc.annihilator);
  for (int i = 4; i <= cc.n; ++i) f[cc.u_index(i)] = omega(cc, a, i, 4);
  return f;
}

RationalExpr quasi_impulse(const CotangentChart& cc, const VectorField& y) {
  auto t = cc.coframe(y);
  RationalExpr s;
  for (int i = 1; i <= cc.n; ++i)
    if (!t[size_t(i - 1)].is_zero()) s += t[size_t(i - 1)] * cc.u(i);
  return s;
}

VectorField hamiltonian_field(const CotangentChart& cc, const RationalExpr& G) {
  const int n = cc.n;
  std::vector<RationalExpr> g(static_cast<size_t>(n));
  RationalExpr rest = G;
  for (int i = 1; i <= n; ++i) {
    g[size_t(i - 1)] = G.diff(cc.u_index(i));
    for (int j = 1; j <= n; ++j)
      if (g[size_t(i - 1)].depends_on(cc.u_index(j)))
        throw Error(ErrorKind::Degenerate, "cotangent", "G is not fiber-linear");
    rest -= g[size_t(i - 1)] * cc.u(i);
  }
  if (!rest.is_zero()) throw Error(ErrorKind::Degenerate, "cotangent", "G is not fiber-linear");
  VectorField out(cc.full);
  for (int i = 1; i <= n; ++i) {
    if (g[size_t(i - 1)].is_zero()) continue;
    out += impulse_lift(cc, i).scaled(g[size_t(i - 1)]);
  }
  // vertical part from the coefficient functions: -sum_i u_i X_j(g_i) d/du_j
  for (int j = 1; j <= n; ++j) {
    VectorField xj = cc.X[size_t(j - 1)].on(cc.full);
    RationalExpr s;
    for (int i = 1; i <= n; ++i)
      if (!g[size_t(i - 1)].is_zero()) s += cc.u(i) * xj.apply(g[size_t(i - 1)]);
    if (!s.is_zero()) out[cc.u_index(j)] -= s;
  }
  return out;
}

namespace {

RationalExpr sigma_impl(const CotangentChart& cc, const VectorField& v, const VectorField& w, int imin) {
  const int n = cc.n;
  auto tv = cc.coframe(v), tw = cc.coframe(w);
  RationalExpr s;
  for (int i = imin; i <= n; ++i) {
    size_t ui = cc.u_index(i);
    if (!v[ui].is_zero() && !tw[size_t(i - 1)].is_zero()) s += v[ui] * tw[size_t(i - 1)];
    if (!w[ui].is_zero() && !tv[size_t(i - 1)].is_zero()) s -= w[ui] * tv[size_t(i - 1)];
  }
  for (int a = 1; a <= n; ++a) {
    if (tv[size_t(a - 1)].is_zero()) continue;
    RationalExpr inner;
    for (int b = 1; b <= n; ++b) {
      if (a == b || tw[size_t(b - 1)].is_zero()) continue;
      RationalExpr om = omega(cc, a, b, imin);
      if (!om.is_zero()) inner += om * tw[size_t(b - 1)];
    }
    if (!inner.is_zero()) s -= tv[size_t(a - 1)] * inner;
  }
  return s;
}

}  // namespace

RationalExpr sigma_full(const CotangentChart& cc, const VectorField& v, const VectorField& w) {
  return sigma_impl(cc, v.on(cc.full), w.on(cc.full), 1);
}

RationalExpr sigma_annihilator(const CotangentChart& cc, const VectorField& v, const VectorField& w) {
  return sigma_impl(cc, v, w, 4);
}

QMat sigma_matrix(const CotangentChart& cc, const QVec& lambda) {
  const size_t n = size_t(cc.n), dim = cc.annihilator->dim();
  QMat t(n, QVec(n, 0));
  for (size_t i = 0; i < n; ++i)
    for (size_t c = 0; c < n; ++c)
      if (!cc.theta[i][c].is_zero()) t[i][c] = cc.theta[i][c].eval(lambda);
  QMat om(n, QVec(n, 0));
  for (int a = 1; a <= cc.n; ++a)
    for (int b = a + 1; b <= cc.n; ++b) {
      mpq_class v = 0;
      for (int k = 4; k <= cc.n; ++k) {
        const RationalExpr& c = cc.structure[size_t(a - 1)][size_t(b - 1)][size_t(k - 1)];
        if (!c.is_zero()) v += c.eval(lambda) * lambda[cc.u_index(k)];
      }
      om[size_t(a - 1)][size_t(b - 1)] = v;
      om[size_t(b - 1)][size_t(a - 1)] = -v;
    }
  QMat s(dim, QVec(dim, 0));
  // base-base block: -T^T Omega T
  QMat ot(n, QVec(n, 0));
  for (size_t a = 0; a < n; ++a)
    for (size_t c = 0; c < n; ++c)
      for (size_t b = 0; b < n; ++b)
        if (om[a][b] != 0 && t[b][c] != 0) ot[a][c] += om[a][b] * t[b][c];
  for (size_t r = 0; r < n; ++r)
    for (size_t c = 0; c < n; ++c) {
      mpq_class v = 0;
      for (size_t a = 0; a < n; ++a)
        if (t[a][r] != 0 && ot[a][c] != 0) v += t[a][r] * ot[a][c];
      s[r][c] = -v;
    }
  for (int i = 4; i <= cc.n; ++i) {
    size_t ui = cc.u_index(i);
    for (size_t c = 0; c < n; ++c) {
      s[ui][c] = t[size_t(i - 1)][c];
      s[c][ui] = -t[size_t(i - 1)][c];
    }
  }
  return s;
}

QVec liouville_row(const CotangentChart& cc, const QVec& lambda) {
  const size_t n = size_t(cc.n);
  QVec row(cc.annihilator->dim(), 0);
  for (int i = 4; i <= cc.n; ++i) {
    const mpq_class& ui = lambda[cc.u_index(i)];
    if (ui == 0) continue;
    for (size_t c = 0; c < n; ++c)
      if (!cc.theta[size_t(i - 1)][c].is_zero()) row[c] += ui * cc.theta[size_t(i - 1)][c].eval(lambda);
  }
  return row;
}

VectorField characteristic_field(const CotangentChart& cc, bool normalized) {
  if (d3_dimension(cc) != 5) throw Error(ErrorKind::NotRegular, "cotangent", kClassOneReason);
  VectorField l1 = impulse_lift_on_annihilator(cc, 1), l2 = impulse_lift_on_annihilator(cc, 2);
  RationalExpr u4 = cc.u(4), u5 = cc.u(5);
  if (normalized) return l2 - l1.scaled(u5 / u4);
  return l2.scaled(u4) - l1.scaled(u5);
}

VectorField euler_field(const CotangentChart& cc) {
  VectorField e(cc.annihilator);
  for (int i = 4; i <= cc.n; ++i) e[cc.u_index(i)] = cc.u(i);
  return e;
}

nlohmann::json cotangent_report(const CotangentChart& cc) {
  nlohmann::json j;
  j["completion_words"] = cc.words;
  j["cotangent_coordinates"] = cc.full->names();
  j["annihilator_coordinates"] = cc.annihilator->names();
  j["component"] = "u4 > 0";
  return j;
}

}  // namespace r2g
