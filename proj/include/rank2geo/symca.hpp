#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rank2geo/error.hpp"

namespace r2g {

constexpr int kMaxVars = 32;

// Ordered list of coordinate names. Charts that share a prefix are compatible:
// an expression on the shorter chart embeds into the longer one unchanged,
// because variables are addressed by position.
class Chart {
 public:
  explicit Chart(std::vector<std::string> names);

  static std::shared_ptr<const Chart> make(std::vector<std::string> names);

  size_t dim() const { return names_.size(); }
  const std::string& name(size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<size_t> index(std::string_view name) const;
  size_t require(std::string_view name) const;  // throws ChartMismatch

  // True when `other` is a prefix of this chart.
  bool extends(const Chart& other) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, size_t> lookup_;
};

using ChartPtr = std::shared_ptr<const Chart>;

struct Coordinate {
  std::string name;
  size_t index = 0;
};

// Of two prefix-compatible charts, the longer one; nullptr stands for "any".
ChartPtr merge_charts(const ChartPtr& a, const ChartPtr& b);

struct Monomial {
  std::array<uint8_t, kMaxVars> e{};

  bool operator==(const Monomial& o) const { return e == o.e; }
  bool is_one() const;
  uint32_t support() const;
};

int compare(const Monomial& a, const Monomial& b);  // lex, variable 0 first

// Sparse polynomial over Q. Terms are kept sorted by decreasing monomial.
class Poly {
 public:
  struct Term {
    Monomial m;
    mpq_class c;
  };

  Poly() = default;
  explicit Poly(const mpq_class& c);
  static Poly variable(int v);
  static Poly from_terms(std::vector<Term> terms);  // sorts and merges
  static Poly from_sorted(std::vector<Term> terms);  // strictly decreasing, no zeros

  bool is_zero() const { return t_.empty(); }
  bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].m.is_one()); }
  mpq_class constant_value() const;
  size_t size() const { return t_.size(); }
  const std::vector<Term>& terms() const { return t_; }
  const mpq_class& lc() const { return t_.front().c; }
  const Monomial& lm() const { return t_.front().m; }

  uint32_t support() const;
  int degree(int v) const;
  Monomial min_monomial() const;

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly scaled(const mpq_class& c) const;
  Poly mul_monomial(const Monomial& m) const;
  Poly div_monomial(const Monomial& m) const;  // m must divide every term
  Poly pow(unsigned k) const;

  bool operator==(const Poly& o) const;
  bool operator!=(const Poly& o) const { return !(*this == o); }

  Poly diff(int v) const;
  std::optional<Poly> divide_exact(const Poly& g) const;
  Poly monic() const;      // leading coefficient 1
  Poly primitive() const;  // integer coefficients with gcd 1, positive lc

  mpq_class eval(const std::vector<mpq_class>& pt) const;
  double eval(const std::vector<double>& pt) const;

  std::string str(const std::vector<std::string>& names) const;

 private:
  std::vector<Term> t_;
  friend Poly poly_add(const Poly&, const Poly&, int sign);
};

Poly gcd(const Poly& f, const Poly& g);

// Size guard shared by polynomial arithmetic on the current thread.
size_t term_limit();
void set_term_limit(size_t limit);

class RationalExpr {
 public:
  RationalExpr() : num_(), den_(mpq_class(1)) {}
  RationalExpr(long v) : num_(mpq_class(v)), den_(mpq_class(1)) {}  // NOLINT
  RationalExpr(const mpq_class& v) : num_(v), den_(mpq_class(1)) {}  // NOLINT

  static RationalExpr coordinate(const ChartPtr& chart, size_t index);
  static RationalExpr coordinate(const ChartPtr& chart, std::string_view name);
  static RationalExpr from_polys(ChartPtr chart, Poly num, Poly den);

  const ChartPtr& chart() const { return chart_; }
  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  mpq_class constant_value() const;
  size_t size() const { return num_.size() + den_.size(); }
  bool depends_on(size_t index) const;

  RationalExpr operator-() const;
  RationalExpr& operator+=(const RationalExpr& o);
  RationalExpr& operator-=(const RationalExpr& o);
  RationalExpr& operator*=(const RationalExpr& o);
  RationalExpr& operator/=(const RationalExpr& o);
  friend RationalExpr operator+(RationalExpr a, const RationalExpr& b) { return a += b; }
  friend RationalExpr operator-(RationalExpr a, const RationalExpr& b) { return a -= b; }
  friend RationalExpr operator*(RationalExpr a, const RationalExpr& b) { return a *= b; }
  friend RationalExpr operator/(RationalExpr a, const RationalExpr& b) { return a /= b; }
  RationalExpr pow(int k) const;
  RationalExpr inverse() const;

  bool operator==(const RationalExpr& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const RationalExpr& o) const { return !(*this == o); }

  RationalExpr diff(size_t index) const;

  // Point given by chart position; entries past the chart are ignored.
  mpq_class eval(const std::vector<mpq_class>& pt) const;
  double eval(const std::vector<double>& pt) const;

  std::string str() const;

  // Same function seen on a chart that extends the current one.
  RationalExpr on(const ChartPtr& chart) const;

 private:
  ChartPtr chart_;
  Poly num_;
  Poly den_;
};

RationalExpr differentiate(const RationalExpr& e, const Coordinate& v);
bool is_zero(const RationalExpr& e);
mpq_class evaluate(const RationalExpr& e, const std::map<std::string, mpq_class>& point);

// Text syntax: integers, coordinate names, + - * / ^ (integer exponents), parentheses.
RationalExpr parse_expr(std::string_view text, const ChartPtr& chart);

mpq_class parse_rational(std::string_view text);
std::string rational_str(const mpq_class& q);

// Square root of a tracked expression R. R must not be a perfect square, which
// keeps K(sqrt R) a field with decidable zero.
class Radical {
 public:
  Radical(RationalExpr radicand, std::string label);

  const RationalExpr& radicand() const { return r_; }
  const std::string& label() const { return label_; }
  // d(sqrt R)/dx_i = half_log_derivative(i) * sqrt R
  const RationalExpr& half_log_derivative(size_t i) const;

 private:
  RationalExpr r_;
  std::string label_;
  std::vector<RationalExpr> hld_;
};

using RadicalPtr = std::shared_ptr<const Radical>;

// alpha + beta * sqrt(R) with alpha, beta rational.
class SurdExpr {
 public:
  SurdExpr() = default;
  SurdExpr(long v) : a_(v) {}                     // NOLINT
  SurdExpr(const RationalExpr& a) : a_(a) {}      // NOLINT
  SurdExpr(RadicalPtr rad, RationalExpr a, RationalExpr b);

  static SurdExpr root(const RadicalPtr& rad);  // sqrt(R) itself

  const RadicalPtr& radical() const { return rad_; }
  const RationalExpr& rational_part() const { return a_; }
  const RationalExpr& surd_part() const { return b_; }

  bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
  size_t size() const { return a_.size() + b_.size(); }

  SurdExpr operator-() const;
  SurdExpr& operator+=(const SurdExpr& o);
  SurdExpr& operator-=(const SurdExpr& o);
  SurdExpr& operator*=(const SurdExpr& o);
  SurdExpr& operator/=(const SurdExpr& o);
  friend SurdExpr operator+(SurdExpr a, const SurdExpr& b) { return a += b; }
  friend SurdExpr operator-(SurdExpr a, const SurdExpr& b) { return a -= b; }
  friend SurdExpr operator*(SurdExpr a, const SurdExpr& b) { return a *= b; }
  friend SurdExpr operator/(SurdExpr a, const SurdExpr& b) { return a /= b; }
  SurdExpr inverse() const;

  bool operator==(const SurdExpr& o) const { return (*this - o).is_zero(); }

  SurdExpr diff(size_t index) const;
  double eval(const std::vector<double>& pt) const;
  double eval(const std::vector<mpq_class>& pt) const;

  std::string str() const;

 private:
  void adopt(const SurdExpr& o);
  RadicalPtr rad_;
  RationalExpr a_;
  RationalExpr b_;
};

inline RationalExpr diff(const RationalExpr& e, size_t i) { return e.diff(i); }
inline SurdExpr diff(const SurdExpr& e, size_t i) { return e.diff(i); }
inline bool is_zero(const SurdExpr& e) { return e.is_zero(); }
inline size_t expr_size(const RationalExpr& e) { return e.size(); }
inline size_t expr_size(const SurdExpr& e) { return e.size(); }

}  // namespace r2g
