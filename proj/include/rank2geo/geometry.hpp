#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rank2geo/linalg.hpp"
#include "rank2geo/symca.hpp"

namespace r2g {

// Derivation on a chart with coefficients in T (RationalExpr or SurdExpr).
template <class T>
class BasicField {
 public:
  BasicField() = default;
  explicit BasicField(ChartPtr chart) : chart_(std::move(chart)), c_(chart_->dim()) {}
  BasicField(ChartPtr chart, std::vector<T> comps) : chart_(std::move(chart)), c_(std::move(comps)) {
    if (c_.size() != chart_->dim())
      throw Error(ErrorKind::ChartMismatch, "geometry", "component count differs from chart dimension");
  }

  static BasicField partial(const ChartPtr& chart, size_t i) {
    BasicField f(chart);
    f.c_.at(i) = T(1);
    return f;
  }

  const ChartPtr& chart() const { return chart_; }
  size_t dim() const { return c_.size(); }
  const T& operator[](size_t i) const { return c_[i]; }
  T& operator[](size_t i) { return c_[i]; }
  const std::vector<T>& components() const { return c_; }

  bool is_zero() const {
    for (const auto& x : c_)
      if (!r2g::is_zero(x)) return false;
    return true;
  }
  size_t size() const {
    size_t s = 0;
    for (const auto& x : c_) s += expr_size(x);
    return s;
  }

  BasicField& operator+=(const BasicField& o) {
    align(o);
    for (size_t i = 0; i < o.c_.size(); ++i)
      if (!r2g::is_zero(o.c_[i])) c_[i] += o.c_[i];
    return *this;
  }
  BasicField& operator-=(const BasicField& o) {
    align(o);
    for (size_t i = 0; i < o.c_.size(); ++i)
      if (!r2g::is_zero(o.c_[i])) c_[i] -= o.c_[i];
    return *this;
  }
  friend BasicField operator+(BasicField a, const BasicField& b) { return a += b; }
  friend BasicField operator-(BasicField a, const BasicField& b) { return a -= b; }
  BasicField operator-() const {
    BasicField r = *this;
    for (auto& x : r.c_)
      if (!r2g::is_zero(x)) x = -x;
    return r;
  }
  BasicField scaled(const T& f) const {
    BasicField r = *this;
    for (auto& x : r.c_)
      if (!r2g::is_zero(x)) x *= f;
    return r;
  }
  bool operator==(const BasicField& o) const { return (*this - o).is_zero(); }

  // X(f) = sum_i X^i d_i f
  T apply(const T& f) const {
    T s;
    for (size_t i = 0; i < c_.size(); ++i) {
      if (r2g::is_zero(c_[i])) continue;
      T d = diff(f, i);
      if (!r2g::is_zero(d)) s += c_[i] * d;
    }
    return s;
  }

  std::vector<double> eval(const std::vector<double>& pt) const {
    std::vector<double> v(c_.size(), 0.0);
    for (size_t i = 0; i < c_.size(); ++i)
      if (!r2g::is_zero(c_[i])) v[i] = c_[i].eval(pt);
    return v;
  }

  // Same field on a chart extending this one (new components zero).
  BasicField on(const ChartPtr& bigger) const {
    if (!bigger->extends(*chart_))
      throw Error(ErrorKind::ChartMismatch, "geometry", "target chart does not extend the field's chart");
    BasicField r(bigger);
    for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i];
    return r;
  }

  // Components along the first `smaller->dim()` coordinates.
  BasicField truncated(const ChartPtr& smaller) const {
    if (!chart_->extends(*smaller))
      throw Error(ErrorKind::ChartMismatch, "geometry", "chart is not a prefix of the field's chart");
    BasicField r(smaller);
    for (size_t i = 0; i < smaller->dim(); ++i) r.c_[i] = c_[i];
    return r;
  }

  void align(const BasicField& o) {
    if (!chart_) {
      *this = BasicField(o.chart_);
      return;
    }
    if (chart_ == o.chart_ || chart_->extends(*o.chart_)) return;
    if (o.chart_->extends(*chart_)) {
      *this = on(o.chart_);
      return;
    }
    throw Error(ErrorKind::ChartMismatch, "geometry", "vector fields live on incompatible charts");
  }

 private:
  ChartPtr chart_;
  std::vector<T> c_;
};

using VectorField = BasicField<RationalExpr>;
using SurdField = BasicField<SurdExpr>;

QVec eval_exact(const VectorField& f, const QVec& pt);
SurdField to_surd(const VectorField& f);

// [X,Y]^k = sum_j (X^j d_j Y^k - Y^j d_j X^k)
template <class T>
BasicField<T> lie_bracket(BasicField<T> x, BasicField<T> y) {
  x.align(y);
  y.align(x);
  const size_t n = x.dim();
  BasicField<T> out(x.chart());
  std::vector<size_t> sx, sy;
  for (size_t j = 0; j < n; ++j) {
    if (!is_zero(x[j])) sx.push_back(j);
    if (!is_zero(y[j])) sy.push_back(j);
  }
  for (size_t k = 0; k < n; ++k) {
    T s;
    if (!is_zero(y[k]))
      for (size_t j : sx) {
        T d = diff(y[k], j);
        if (!is_zero(d)) s += x[j] * d;
      }
    if (!is_zero(x[k]))
      for (size_t j : sy) {
        T d = diff(x[k], j);
        if (!is_zero(d)) s -= y[j] * d;
      }
    out[k] = std::move(s);
  }
  return out;
}

template <class T>
BasicField<T> ad_power(const BasicField<T>& h, BasicField<T> y, int k, int limit = 64) {
  if (k < 0 || k > limit)
    throw Error(ErrorKind::Resource, "geometry", "ad power " + std::to_string(k) + " outside the resource limit");
  for (int i = 0; i < k; ++i) y = lie_bracket(h, y);
  return y;
}

struct OdeSource {
  int n = 0;
  RationalExpr F;
};

struct DistributionSpec {
  ChartPtr chart;
  VectorField X1, X2;
  std::optional<OdeSource> ode;
};

// Chart (x, p0, ..., p_{n-3}, z).
ChartPtr ode_chart(int n);
DistributionSpec from_ode(int n, const RationalExpr& F);
DistributionSpec from_fields(VectorField x1, VectorField x2);

// Rows are covectors on the ODE chart: dp_i - p_{i+1} dx and dz - F dx.
std::vector<std::vector<RationalExpr>> pfaffian_forms(const DistributionSpec& d);

struct GrowthResult {
  std::vector<int> dims;
  bool stabilized = false;  // a level produced no new bracket words
  bool truncated = false;   // word-length cap reached before depth
  std::vector<std::string> words;
};

GrowthResult growth_analysis(const DistributionSpec& d, const QVec& q, int depth, int max_word_length = 16);
std::vector<int> small_growth_vector(const DistributionSpec& d, const QVec& q, int depth);

// Evaluation helpers that turn symca pole errors into errors of `module`.
QVec eval_point(const VectorField& f, const QVec& pt, const char* module);

}  // namespace r2g
