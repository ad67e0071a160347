#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "rank2geo/symca.hpp"

namespace r2g {

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::ChartMismatch: return "chart-mismatch";
    case ErrorKind::Pole: return "pole";
    case ErrorKind::Resource: return "resource";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::NotRegular: return "not-regular";
    case ErrorKind::Internal: return "internal";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, std::string module, std::string reason)
    : std::runtime_error(module + ": " + reason), kind_(kind), module_(std::move(module)),
      reason_(std::move(reason)) {}

// ---------------------------------------------------------------- Chart

Chart::Chart(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() > size_t(kMaxVars))
    throw Error(ErrorKind::Resource, "symca",
                "chart with " + std::to_string(names_.size()) + " coordinates exceeds " +
                    std::to_string(kMaxVars));
  for (size_t i = 0; i < names_.size(); ++i) {
    if (!lookup_.emplace(names_[i], i).second)
      throw Error(ErrorKind::ChartMismatch, "symca", "duplicate coordinate '" + names_[i] + "'");
  }
}

std::shared_ptr<const Chart> Chart::make(std::vector<std::string> names) {
  return std::make_shared<const Chart>(std::move(names));
}

std::optional<size_t> Chart::index(std::string_view name) const {
  auto it = lookup_.find(std::string(name));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

size_t Chart::require(std::string_view name) const {
  auto i = index(name);
  if (!i) throw Error(ErrorKind::ChartMismatch, "symca", "unknown coordinate '" + std::string(name) + "'");
  return *i;
}

bool Chart::extends(const Chart& other) const {
  if (other.dim() > dim()) return false;
  for (size_t i = 0; i < other.dim(); ++i)
    if (names_[i] != other.names_[i]) return false;
  return true;
}

ChartPtr merge_charts(const ChartPtr& a, const ChartPtr& b) {
  if (a == b || !b) return a;
  if (!a) return b;
  if (a->extends(*b)) return a;
  if (b->extends(*a)) return b;
  throw Error(ErrorKind::ChartMismatch, "symca", "expressions live on incompatible charts");
}

// ---------------------------------------------------------------- rationals

mpq_class parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  mpq_class q;
  if (s.empty() || q.set_str(s, 10) != 0)
    throw Error(ErrorKind::Parse, "symca", "not a rational number: '" + std::string(text) + "'");
  if (q.get_den() == 0) throw Error(ErrorKind::Parse, "symca", "zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

std::string rational_str(const mpq_class& q) { return q.get_str(); }

// ---------------------------------------------------------------- RationalExpr

namespace {

RationalExpr make_reduced(ChartPtr chart, Poly n, Poly d, const Poly* g_hint = nullptr) {
  if (n.is_zero()) return RationalExpr();
  Poly g = g_hint ? *g_hint : gcd(n, d);
  if (!g.is_constant()) {
    n = *n.divide_exact(g);
    d = *d.divide_exact(g);
  }
  return RationalExpr::from_polys(std::move(chart), std::move(n), std::move(d));
}

Poly exact_div(const Poly& a, const Poly& b) {
  auto q = a.divide_exact(b);
  if (!q) throw Error(ErrorKind::Internal, "symca", "inexact division in canonical form");
  return std::move(*q);
}

}  // namespace

RationalExpr RationalExpr::coordinate(const ChartPtr& chart, size_t index) {
  if (index >= chart->dim()) throw Error(ErrorKind::ChartMismatch, "symca", "coordinate index out of range");
  RationalExpr e;
  e.chart_ = chart;
  e.num_ = Poly::variable(int(index));
  return e;
}

RationalExpr RationalExpr::coordinate(const ChartPtr& chart, std::string_view name) {
  return coordinate(chart, chart->require(name));
}

// Assumes gcd(num, den) = 1; only fixes the scalar normalization.
RationalExpr RationalExpr::from_polys(ChartPtr chart, Poly num, Poly den) {
  if (den.is_zero()) throw Error(ErrorKind::Pole, "symca", "denominator is identically zero");
  RationalExpr e;
  if (num.is_zero()) return e;
  e.chart_ = std::move(chart);
  if (den.lc() != 1) {
    mpq_class inv = 1 / den.lc();
    num = num.scaled(inv);
    den = den.scaled(inv);
  }
  e.num_ = std::move(num);
  e.den_ = std::move(den);
  return e;
}

mpq_class RationalExpr::constant_value() const {
  return num_.constant_value() / den_.constant_value();
}

bool RationalExpr::depends_on(size_t index) const {
  uint32_t bit = 1u << index;
  return (num_.support() & bit) || (den_.support() & bit);
}

RationalExpr RationalExpr::operator-() const {
  RationalExpr r = *this;
  r.num_ = -r.num_;
  return r;
}

RationalExpr& RationalExpr::operator+=(const RationalExpr& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  ChartPtr c = merge_charts(chart_, o.chart_);
  if (den_ == o.den_) {
    Poly n = num_ + o.num_;
    if (den_.is_constant()) {
      *this = from_polys(c, std::move(n), den_);
    } else {
      *this = make_reduced(c, std::move(n), den_);
    }
    return *this;
  }
  if (den_.is_constant() || o.den_.is_constant()) {
    // coprimality is preserved when one side has a constant denominator
    Poly n = num_ * o.den_ + o.num_ * den_;
    Poly d = den_ * o.den_;
    *this = from_polys(c, std::move(n), std::move(d));
    return *this;
  }
  Poly g = gcd(den_, o.den_);
  Poly d1 = exact_div(den_, g), d2 = exact_div(o.den_, g);
  Poly n = num_ * d2 + o.num_ * d1;
  if (n.is_zero()) return *this = RationalExpr();
  Poly d = den_ * d2;
  if (g.is_constant()) {
    *this = from_polys(c, std::move(n), std::move(d));
  } else {
    Poly h = gcd(n, g);
    *this = make_reduced(c, std::move(n), std::move(d), &h);
  }
  return *this;
}

RationalExpr& RationalExpr::operator-=(const RationalExpr& o) { return *this += -o; }

RationalExpr& RationalExpr::operator*=(const RationalExpr& o) {
  if (is_zero()) return *this;
  if (o.is_zero()) return *this = RationalExpr();
  ChartPtr c = merge_charts(chart_, o.chart_);
  if (o.is_constant()) {
    num_ = num_.scaled(o.constant_value());
    chart_ = c;
    return *this;
  }
  if (is_constant()) {
    mpq_class k = constant_value();
    *this = o;
    num_ = num_.scaled(k);
    chart_ = c;
    return *this;
  }
  Poly g1 = gcd(num_, o.den_), g2 = gcd(o.num_, den_);
  Poly n1 = g1.is_constant() ? num_ : exact_div(num_, g1);
  Poly d2 = g1.is_constant() ? o.den_ : exact_div(o.den_, g1);
  Poly n2 = g2.is_constant() ? o.num_ : exact_div(o.num_, g2);
  Poly d1 = g2.is_constant() ? den_ : exact_div(den_, g2);
  *this = from_polys(c, n1 * n2, d1 * d2);
  return *this;
}

RationalExpr RationalExpr::inverse() const {
  if (is_zero()) throw Error(ErrorKind::Pole, "symca", "inverse of the zero function");
  return from_polys(chart_, den_, num_);
}

RationalExpr& RationalExpr::operator/=(const RationalExpr& o) { return *this *= o.inverse(); }

RationalExpr RationalExpr::pow(int k) const {
  if (k < 0) return inverse().pow(-k);
  RationalExpr r = from_polys(chart_, num_.pow(unsigned(k)), den_.pow(unsigned(k)));
  if (k == 0) return RationalExpr(1);
  return r;
}

RationalExpr RationalExpr::diff(size_t index) const {
  if (!depends_on(index)) return RationalExpr();
  const int v = int(index);
  if (!(den_.support() & (1u << index))) {
    return make_reduced(chart_, num_.diff(v), den_);
  }
  Poly dd = den_.diff(v);
  Poly g = gcd(den_, dd);
  Poly d1 = exact_div(den_, g);
  Poly n = num_.diff(v) * d1 - num_ * exact_div(dd, g);
  if (n.is_zero()) return RationalExpr();
  Poly d = den_ * d1;
  // every common factor of (n, d) already divides den with full multiplicity
  Poly h = gcd(n, den_);
  return make_reduced(chart_, std::move(n), std::move(d), &h);
}

mpq_class RationalExpr::eval(const std::vector<mpq_class>& pt) const {
  mpq_class d = den_.eval(pt);
  if (d == 0) {
    throw Error(ErrorKind::Pole, "symca",
                "denominator " + den_.str(chart_ ? chart_->names() : std::vector<std::string>{}) +
                    " vanishes at the point");
  }
  return num_.eval(pt) / d;
}

double RationalExpr::eval(const std::vector<double>& pt) const {
  double d = den_.eval(pt);
  if (d == 0) {
    throw Error(ErrorKind::Pole, "symca",
                "denominator " + den_.str(chart_ ? chart_->names() : std::vector<std::string>{}) +
                    " vanishes at the point");
  }
  return num_.eval(pt) / d;
}

std::string RationalExpr::str() const {
  std::vector<std::string> names = chart_ ? chart_->names() : std::vector<std::string>{};
  std::string n = num_.str(names);
  if (den_.is_constant() && den_.constant_value() == 1) return n;
  std::string d = den_.str(names);
  if (num_.size() > 1) n = "(" + n + ")";
  if (den_.size() > 1 || !den_.terms()[0].m.is_one() || d.find('*') != std::string::npos ||
      d.find('/') != std::string::npos)
    d = "(" + d + ")";
  return n + "/" + d;
}

RationalExpr RationalExpr::on(const ChartPtr& chart) const {
  if (chart_ && !chart->extends(*chart_))
    throw Error(ErrorKind::ChartMismatch, "symca", "target chart does not extend the expression's chart");
  RationalExpr r = *this;
  if (!r.is_zero()) r.chart_ = chart;
  return r;
}

RationalExpr differentiate(const RationalExpr& e, const Coordinate& v) {
  if (!e.chart()) {
    return RationalExpr();
  }
  auto idx = e.chart()->index(v.name);
  if (!idx || *idx != v.index)
    throw Error(ErrorKind::ChartMismatch, "symca", "coordinate '" + v.name + "' is not on the expression's chart");
  return e.diff(*idx);
}

bool is_zero(const RationalExpr& e) { return e.is_zero(); }

mpq_class evaluate(const RationalExpr& e, const std::map<std::string, mpq_class>& point) {
  std::vector<mpq_class> pt(kMaxVars);
  const uint32_t used = e.num().support() | e.den().support();
  for (int i = 0; i < kMaxVars; ++i) {
    if (!(used & (1u << i))) continue;
    const std::string& name = e.chart()->name(size_t(i));
    auto it = point.find(name);
    if (it == point.end())
      throw Error(ErrorKind::ChartMismatch, "symca", "coordinate '" + name + "' has no value");
    pt[i] = it->second;
  }
  return e.eval(pt);
}

// ---------------------------------------------------------------- parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, const ChartPtr& chart) : s_(text), chart_(chart) {}

  RationalExpr run() {
    RationalExpr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw Error(ErrorKind::Parse, "symca", "column " + std::to_string(pos_ + 1) + ": " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  RationalExpr expr() {
    RationalExpr e = term();
    while (true) {
      if (eat('+'))
        e += term();
      else if (eat('-'))
        e -= term();
      else
        return e;
    }
  }
  RationalExpr term() {
    RationalExpr e = unary();
    while (true) {
      if (eat('*')) {
        e *= unary();
      } else if (eat('/')) {
        size_t at = pos_;
        RationalExpr d = unary();
        if (d.is_zero()) {
          pos_ = at;
          fail("division by zero");
        }
        e /= d;
      } else {
        return e;
      }
    }
  }
  RationalExpr unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  RationalExpr power() {
    RationalExpr b = primary();
    if (eat('^')) {
      skip();
      bool neg = false;
      if (eat('-')) neg = true;
      skip();
      size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("integer exponent expected");
      int k = std::stoi(std::string(s_.substr(start, pos_ - start)));
      if (neg && b.is_zero()) fail("negative power of zero");
      b = b.pow(neg ? -k : k);
    }
    return b;
  }
  RationalExpr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      RationalExpr e = expr();
      if (!eat(')')) fail("')' expected");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return RationalExpr(mpq_class(std::string(s_.substr(start, pos_ - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      auto idx = chart_ ? chart_->index(name) : std::nullopt;
      if (!idx) {
        pos_ = start;
        fail("unknown coordinate '" + name + "'");
      }
      return RationalExpr::coordinate(chart_, *idx);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  const ChartPtr& chart_;
  size_t pos_ = 0;
};

}  // namespace

RationalExpr parse_expr(std::string_view text, const ChartPtr& chart) { return Parser(text, chart).run(); }

// ---------------------------------------------------------------- Radical / SurdExpr

namespace {

// Squares have even degree in every variable in both numerator and denominator.
bool certainly_not_square(const RationalExpr& r) {
  if (r.is_constant()) {
    mpq_class v = r.constant_value();
    if (v <= 0) return true;
    return !(mpz_perfect_square_p(v.get_num_mpz_t()) && mpz_perfect_square_p(v.get_den_mpz_t()));
  }
  for (int v = 0; v < kMaxVars; ++v)
    if (r.num().degree(v) % 2 || r.den().degree(v) % 2) return true;
  return false;
}

}  // namespace

Radical::Radical(RationalExpr radicand, std::string label) : r_(std::move(radicand)), label_(std::move(label)) {
  if (!certainly_not_square(r_))
    throw Error(ErrorKind::Internal, "symca", "radicand " + r_.str() + " cannot be certified as a non-square");
  size_t n = r_.chart() ? r_.chart()->dim() : 0;
  hld_.resize(n);
  RationalExpr twice = r_ * RationalExpr(2);
  for (size_t i = 0; i < n; ++i)
    if (r_.depends_on(i)) hld_[i] = r_.diff(i) / twice;
}

const RationalExpr& Radical::half_log_derivative(size_t i) const {
  static const RationalExpr zero;
  return i < hld_.size() ? hld_[i] : zero;
}

SurdExpr::SurdExpr(RadicalPtr rad, RationalExpr a, RationalExpr b)
    : rad_(std::move(rad)), a_(std::move(a)), b_(std::move(b)) {
  if (!rad_ && !b_.is_zero()) throw Error(ErrorKind::Internal, "symca", "surd part without a radical");
}

SurdExpr SurdExpr::root(const RadicalPtr& rad) { return SurdExpr(rad, RationalExpr(), RationalExpr(1)); }

void SurdExpr::adopt(const SurdExpr& o) {
  if (!o.rad_ || o.rad_ == rad_) return;
  if (!rad_) {
    rad_ = o.rad_;
    return;
  }
  throw Error(ErrorKind::Internal, "symca", "arithmetic mixes different radicals");
}

SurdExpr SurdExpr::operator-() const { return SurdExpr(rad_, -a_, -b_); }

SurdExpr& SurdExpr::operator+=(const SurdExpr& o) {
  adopt(o);
  a_ += o.a_;
  b_ += o.b_;
  return *this;
}

SurdExpr& SurdExpr::operator-=(const SurdExpr& o) {
  adopt(o);
  a_ -= o.a_;
  b_ -= o.b_;
  return *this;
}

SurdExpr& SurdExpr::operator*=(const SurdExpr& o) {
  adopt(o);
  if (b_.is_zero() && o.b_.is_zero()) {
    a_ *= o.a_;
    return *this;
  }
  RationalExpr a = a_ * o.a_;
  if (!b_.is_zero() && !o.b_.is_zero()) a += b_ * o.b_ * rad_->radicand();
  RationalExpr b = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(a);
  b_ = std::move(b);
  return *this;
}

SurdExpr SurdExpr::inverse() const {
  if (b_.is_zero()) return SurdExpr(rad_, a_.inverse(), RationalExpr());
  RationalExpr norm = a_ * a_ - b_ * b_ * rad_->radicand();
  if (norm.is_zero()) throw Error(ErrorKind::Pole, "symca", "inverse of the zero function");
  return SurdExpr(rad_, a_ / norm, -b_ / norm);
}

SurdExpr& SurdExpr::operator/=(const SurdExpr& o) { return *this *= o.inverse(); }

SurdExpr SurdExpr::diff(size_t index) const {
  RationalExpr a = a_.diff(index);
  if (b_.is_zero()) return SurdExpr(rad_, std::move(a), RationalExpr());
  RationalExpr b = b_.diff(index);
  const RationalExpr& h = rad_->half_log_derivative(index);
  if (!h.is_zero()) b += b_ * h;
  return SurdExpr(rad_, std::move(a), std::move(b));
}

double SurdExpr::eval(const std::vector<double>& pt) const {
  double v = a_.is_zero() ? 0.0 : a_.eval(pt);
  if (b_.is_zero()) return v;
  double r = rad_->radicand().eval(pt);
  if (!(r > 0)) throw Error(ErrorKind::Pole, "symca", "radicand " + rad_->radicand().str() + " is not positive");
  return v + b_.eval(pt) * std::sqrt(r);
}

double SurdExpr::eval(const std::vector<mpq_class>& pt) const {
  double v = a_.is_zero() ? 0.0 : a_.eval(pt).get_d();
  if (b_.is_zero()) return v;
  mpq_class r = rad_->radicand().eval(pt);
  if (r <= 0) throw Error(ErrorKind::Pole, "symca", "radicand " + rad_->radicand().str() + " is not positive");
  return v + b_.eval(pt).get_d() * std::sqrt(r.get_d());
}

std::string SurdExpr::str() const {
  if (b_.is_zero()) return a_.str();
  std::string s = "(" + b_.str() + ")*" + (rad_->label().empty() ? "sqrt(" + rad_->radicand().str() + ")" : rad_->label());
  if (a_.is_zero()) return s;
  return a_.str() + " + " + s;
}

}  // namespace r2g
