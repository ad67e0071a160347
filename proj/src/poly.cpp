#include <algorithm>
#include <cstring>
#include <sstream>

#include "rank2geo/symca.hpp"

namespace r2g {

namespace {

thread_local size_t g_term_limit = 2'000'000;

void check_size(size_t n) {
  if (n > g_term_limit) {
    throw Error(ErrorKind::Resource, "symca",
                "expression with " + std::to_string(n) + " terms exceeds the term limit of " +
                    std::to_string(g_term_limit));
  }
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r;
  for (int i = 0; i < kMaxVars; ++i) {
    unsigned s = unsigned(a.e[i]) + unsigned(b.e[i]);
    if (s > 255) throw Error(ErrorKind::Resource, "symca", "exponent overflow (> 255)");
    r.e[i] = uint8_t(s);
  }
  return r;
}

bool mono_divides(const Monomial& d, const Monomial& m) {
  for (int i = 0; i < kMaxVars; ++i)
    if (d.e[i] > m.e[i]) return false;
  return true;
}

Monomial mono_div(const Monomial& m, const Monomial& d) {
  Monomial r;
  for (int i = 0; i < kMaxVars; ++i) r.e[i] = uint8_t(m.e[i] - d.e[i]);
  return r;
}

}  // namespace

size_t term_limit() { return g_term_limit; }
void set_term_limit(size_t limit) { g_term_limit = limit; }

int compare(const Monomial& a, const Monomial& b) {
  return std::memcmp(a.e.data(), b.e.data(), kMaxVars);
}

bool Monomial::is_one() const {
  for (auto x : e)
    if (x) return false;
  return true;
}

uint32_t Monomial::support() const {
  uint32_t s = 0;
  for (int i = 0; i < kMaxVars; ++i)
    if (e[i]) s |= (1u << i);
  return s;
}

Poly::Poly(const mpq_class& c) {
  if (c != 0) t_.push_back({Monomial{}, c});
}

Poly Poly::variable(int v) {
  Poly p;
  Monomial m;
  m.e[v] = 1;
  p.t_.push_back({m, mpq_class(1)});
  return p;
}

Poly Poly::from_sorted(std::vector<Term> terms) {
  Poly p;
  p.t_ = std::move(terms);
  return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return compare(a.m, b.m) > 0; });
  Poly p;
  p.t_.reserve(terms.size());
  for (auto& t : terms) {
    if (!p.t_.empty() && p.t_.back().m == t.m) {
      p.t_.back().c += t.c;
    } else {
      if (!p.t_.empty() && p.t_.back().c == 0) p.t_.pop_back();
      p.t_.push_back(std::move(t));
    }
  }
  if (!p.t_.empty() && p.t_.back().c == 0) p.t_.pop_back();
  check_size(p.t_.size());
  return p;
}

mpq_class Poly::constant_value() const {
  if (t_.empty()) return 0;
  if (!t_[0].m.is_one()) throw Error(ErrorKind::Internal, "symca", "polynomial is not constant");
  return t_[0].c;
}

uint32_t Poly::support() const {
  uint32_t s = 0;
  for (const auto& t : t_) s |= t.m.support();
  return s;
}

int Poly::degree(int v) const {
  int d = 0;
  for (const auto& t : t_) d = std::max(d, int(t.m.e[v]));
  return d;
}

Monomial Poly::min_monomial() const {
  Monomial r;
  if (t_.empty()) return r;
  r = t_[0].m;
  for (const auto& t : t_)
    for (int i = 0; i < kMaxVars; ++i) r.e[i] = std::min(r.e[i], t.m.e[i]);
  return r;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& t : r.t_) t.c = -t.c;
  return r;
}

Poly poly_add(const Poly& a, const Poly& b, int sign) {
  Poly r;
  r.t_.reserve(a.t_.size() + b.t_.size());
  size_t i = 0, j = 0;
  while (i < a.t_.size() || j < b.t_.size()) {
    int c;
    if (i == a.t_.size())
      c = -1;
    else if (j == b.t_.size())
      c = 1;
    else
      c = compare(a.t_[i].m, b.t_[j].m);
    if (c > 0) {
      r.t_.push_back(a.t_[i++]);
    } else if (c < 0) {
      r.t_.push_back(b.t_[j++]);
      if (sign < 0) r.t_.back().c = -r.t_.back().c;
    } else {
      mpq_class s = sign > 0 ? mpq_class(a.t_[i].c + b.t_[j].c) : mpq_class(a.t_[i].c - b.t_[j].c);
      if (s != 0) r.t_.push_back({a.t_[i].m, std::move(s)});
      ++i;
      ++j;
    }
  }
  check_size(r.t_.size());
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  if (o.is_zero()) return *this;
  *this = poly_add(*this, o, 1);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.is_zero()) return *this;
  *this = poly_add(*this, o, -1);
  return *this;
}

Poly Poly::scaled(const mpq_class& c) const {
  if (c == 0) return Poly();
  Poly r = *this;
  if (c == 1) return r;
  for (auto& t : r.t_) t.c *= c;
  return r;
}

Poly Poly::mul_monomial(const Monomial& m) const {
  Poly r = *this;
  for (auto& t : r.t_) t.m = mono_mul(t.m, m);
  return r;
}

Poly Poly::div_monomial(const Monomial& m) const {
  Poly r = *this;
  for (auto& t : r.t_) t.m = mono_div(t.m, m);
  return r;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  if (a.size() == 1 || b.size() == 1) {
    const Poly& one = a.size() == 1 ? a : b;
    const Poly& other = a.size() == 1 ? b : a;
    Poly r = other.mul_monomial(one.t_[0].m);
    if (one.t_[0].c != 1)
      for (auto& t : r.t_) t.c *= one.t_[0].c;
    return r;
  }
  check_size(a.size() * b.size() / 4);
  std::vector<Poly::Term> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a.t_)
    for (const auto& y : b.t_) out.push_back({mono_mul(x.m, y.m), x.c * y.c});
  return Poly::from_terms(std::move(out));
}

Poly Poly::pow(unsigned k) const {
  Poly r(mpq_class(1)), base = *this;
  while (k) {
    if (k & 1) r = r * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return r;
}

bool Poly::operator==(const Poly& o) const {
  if (t_.size() != o.t_.size()) return false;
  for (size_t i = 0; i < t_.size(); ++i)
    if (!(t_[i].m == o.t_[i].m) || t_[i].c != o.t_[i].c) return false;
  return true;
}

Poly Poly::diff(int v) const {
  std::vector<Term> out;
  for (const auto& t : t_) {
    if (t.m.e[v] == 0) continue;
    Term n{t.m, t.c * t.m.e[v]};
    n.m.e[v]--;
    out.push_back(std::move(n));
  }
  // lowering one exponent can reorder terms only among equal prefixes; resort
  return from_terms(std::move(out));
}

std::optional<Poly> Poly::divide_exact(const Poly& g) const {
  if (g.is_zero()) throw Error(ErrorKind::Internal, "symca", "division by zero polynomial");
  if (is_zero()) return Poly();
  if (g.is_constant()) return scaled(1 / g.t_[0].c);
  if (!mono_divides(g.t_.front().m, t_.front().m)) return std::nullopt;
  if (!mono_divides(g.t_.back().m, t_.back().m)) return std::nullopt;
  for (int v = 0; v < kMaxVars; ++v)
    if (g.degree(v) > degree(v)) return std::nullopt;
  if (g.size() == 1) {
    Poly r = div_monomial(g.t_[0].m);
    const mpq_class inv = 1 / g.t_[0].c;
    for (auto& t : r.t_) t.c *= inv;
    return r;
  }
  std::vector<Term> q;
  Poly r = *this;
  const mpq_class inv = 1 / g.lc();
  while (!r.is_zero()) {
    const Term& lt = r.t_.front();
    if (!mono_divides(g.lm(), lt.m)) return std::nullopt;
    Term t{mono_div(lt.m, g.lm()), lt.c * inv};
    Poly tg = g.mul_monomial(t.m);
    for (auto& x : tg.t_) x.c *= t.c;
    r = poly_add(r, tg, -1);
    q.push_back(std::move(t));
  }
  return from_sorted(std::move(q));
}

Poly Poly::monic() const {
  if (is_zero() || lc() == 1) return *this;
  return scaled(1 / lc());
}

Poly Poly::primitive() const {
  if (is_zero()) return *this;
  mpz_class l = 1, g = 0;
  for (const auto& t : t_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.c.get_den_mpz_t());
  for (const auto& t : t_) {
    mpz_class v = t.c.get_num() * (l / t.c.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  }
  mpq_class s(l, g);
  s.canonicalize();
  if (lc() < 0) s = -s;
  return scaled(s);
}

mpq_class Poly::eval(const std::vector<mpq_class>& pt) const {
  mpq_class s = 0;
  for (const auto& t : t_) {
    mpq_class v = t.c;
    for (int i = 0; i < kMaxVars; ++i)
      for (int k = 0; k < t.m.e[i]; ++k) v *= pt.at(i);
    s += v;
  }
  return s;
}

double Poly::eval(const std::vector<double>& pt) const {
  double s = 0;
  for (const auto& t : t_) {
    double v = t.c.get_d();
    for (int i = 0; i < kMaxVars; ++i)
      for (int k = 0; k < t.m.e[i]; ++k) v *= pt.at(i);
    s += v;
  }
  return s;
}

std::string Poly::str(const std::vector<std::string>& names) const {
  if (t_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : t_) {
    mpq_class c = t.c;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    c = abs(c);
    bool need_star = false;
    if (t.m.is_one() || c != 1) {
      os << rational_str(c);
      need_star = true;
    }
    for (int i = 0; i < kMaxVars; ++i) {
      if (!t.m.e[i]) continue;
      if (need_star) os << "*";
      os << (size_t(i) < names.size() ? names[i] : "v" + std::to_string(i));
      if (t.m.e[i] > 1) os << "^" << int(t.m.e[i]);
      need_star = true;
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// gcd: recursive content/primitive-part split with a subresultant PRS in the
// main variable, after cheap reductions (monomial content, variables present
// on one side only, trial division).

namespace {

using Univ = std::vector<Poly>;

Univ to_univ(const Poly& f, int v) {
  int d = f.degree(v);
  std::vector<std::vector<Poly::Term>> buckets(d + 1);
  for (const auto& t : f.terms()) {
    Poly::Term n = t;
    int e = n.m.e[v];
    n.m.e[v] = 0;
    buckets[e].push_back(std::move(n));
  }
  Univ u;
  u.reserve(d + 1);
  for (auto& b : buckets) u.push_back(Poly::from_sorted(std::move(b)));
  return u;
}

Poly from_univ(const Univ& u, int v) {
  std::vector<Poly::Term> out;
  for (size_t e = 0; e < u.size(); ++e)
    for (const auto& t : u[e].terms()) {
      Poly::Term n = t;
      n.m.e[v] = uint8_t(e);
      out.push_back(std::move(n));
    }
  return Poly::from_terms(std::move(out));
}

void trim(Univ& u) {
  while (!u.empty() && u.back().is_zero()) u.pop_back();
}

Poly exact(const Poly& a, const Poly& b) {
  auto q = a.divide_exact(b);
  if (!q) throw Error(ErrorKind::Internal, "symca", "inexact division inside gcd");
  return std::move(*q);
}

Poly content(const Univ& u);

Univ prem(Univ r, const Univ& b) {
  const int db = int(b.size()) - 1;
  const Poly& lb = b.back();
  int e = int(r.size()) - db;
  while (!r.empty() && int(r.size()) - 1 >= db) {
    int d = int(r.size()) - 1 - db;
    Poly lr = r.back();
    for (size_t i = 0; i + 1 < r.size(); ++i)
      if (!r[i].is_zero()) r[i] = r[i] * lb;
    for (int j = 0; j < db; ++j)
      if (!b[j].is_zero()) r[j + d] -= lr * b[j];
    r.pop_back();
    trim(r);
    --e;
  }
  if (e > 0 && !r.empty()) {
    Poly f = lb.pow(unsigned(e));
    for (auto& c : r) c = c * f;
  }
  return r;
}

Poly gcd_rec(const Poly& f, const Poly& g);

Poly content(const Univ& u) {
  Poly c;
  for (const auto& x : u) {
    if (x.is_zero()) continue;
    c = c.is_zero() ? x.monic() : gcd_rec(c, x);
    if (c.is_constant()) return Poly(mpq_class(1));
  }
  return c;
}

// gcd with respect to the variables in `mask`: coefficients of f seen as a
// polynomial in those variables.
std::vector<Poly> coefficients_in(const Poly& f, uint32_t mask) {
  std::map<std::vector<uint8_t>, std::vector<Poly::Term>> groups;
  for (const auto& t : f.terms()) {
    std::vector<uint8_t> key(kMaxVars);
    Poly::Term n = t;
    for (int i = 0; i < kMaxVars; ++i)
      if (mask & (1u << i)) {
        key[i] = n.m.e[i];
        n.m.e[i] = 0;
      }
    groups[key].push_back(std::move(n));
  }
  std::vector<Poly> out;
  for (auto& [k, terms] : groups) out.push_back(Poly::from_sorted(std::move(terms)));
  std::sort(out.begin(), out.end(), [](const Poly& a, const Poly& b) { return a.size() < b.size(); });
  return out;
}

Poly gcd_core(const Poly& f, const Poly& g) {
  if (f.is_constant() || g.is_constant()) return Poly(mpq_class(1));
  uint32_t sf = f.support(), sg = g.support();
  if (uint32_t only = sf & ~sg) {
    Poly r = g;
    for (const auto& c : coefficients_in(f, only)) {
      r = gcd_rec(r, c);
      if (r.is_constant()) return r;
    }
    return r;
  }
  if (uint32_t only = sg & ~sf) {
    Poly r = f;
    for (const auto& c : coefficients_in(g, only)) {
      r = gcd_rec(r, c);
      if (r.is_constant()) return r;
    }
    return r;
  }
  const Poly& small = f.size() <= g.size() ? f : g;
  const Poly& large = f.size() <= g.size() ? g : f;
  if (large.divide_exact(small)) return small.monic();

  int v = -1, best = 1 << 30;
  for (int i = 0; i < kMaxVars; ++i) {
    if (!(sf & (1u << i))) continue;
    int d = std::max(f.degree(i), g.degree(i));
    if (d < best) best = d, v = i;
  }
  Univ a = to_univ(f, v), b = to_univ(g, v);
  Poly ca = content(a), cb = content(b);
  Poly c = gcd_rec(ca, cb);
  for (auto& x : a) x = exact(x, ca);
  for (auto& x : b) x = exact(x, cb);
  if (a.size() < b.size()) std::swap(a, b);
  Univ aa = std::move(a), bb = std::move(b);
  Poly g0(mpq_class(1)), h(mpq_class(1));
  while (true) {
    if (bb.size() == 1) return c;
    int d = int(aa.size()) - int(bb.size());
    Univ r = prem(aa, bb);
    if (r.empty()) break;
    if (r.size() == 1) return c;
    aa = std::move(bb);
    Poly div = g0 * h.pow(unsigned(d));
    for (auto& x : r) x = exact(x, div);
    bb = std::move(r);
    g0 = aa.back();
    if (d == 1)
      h = g0;
    else if (d > 1)
      h = exact(g0.pow(unsigned(d)), h.pow(unsigned(d - 1)));
  }
  Poly cc = content(bb);
  for (auto& x : bb) x = exact(x, cc);
  return (from_univ(bb, v) * c).monic();
}

Poly gcd_rec(const Poly& f, const Poly& g) {
  if (f.is_zero()) return g.monic();
  if (g.is_zero()) return f.monic();
  if (f.is_constant() || g.is_constant()) return Poly(mpq_class(1));
  if (f.size() == g.size() && f.monic() == g.monic()) return f.monic();
  Monomial mf = f.min_monomial(), mg = g.min_monomial(), mc;
  for (int i = 0; i < kMaxVars; ++i) mc.e[i] = std::min(mf.e[i], mg.e[i]);
  Poly a = f.div_monomial(mf), b = g.div_monomial(mg);
  Poly core;
  if (a.is_constant() || b.is_constant())
    core = Poly(mpq_class(1));
  else
    core = gcd_core(a.primitive(), b.primitive());
  return core.mul_monomial(mc).monic();
}

}  // namespace

Poly gcd(const Poly& f, const Poly& g) { return gcd_rec(f, g); }

}  // namespace r2g
