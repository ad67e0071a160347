#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "rank2geo/wilczynski.hpp"

namespace r2g {

// r^weight * field on the chart (annihilator coordinates, a, b), where
// r = sqrt(a^(2m-1) / |P|) and P is the pairing of the section l. Every frame
// field has this shape, so brackets stay rational:
// [r^k X, r^j Y] = r^(k+j) ([X,Y] + j X(log r) Y - k Y(log r) X).
struct WeightedField {
  int weight = 0;
  VectorField field;
};

// Chain eps_1..eps_2m built from eps_1 by the recursion, and eta = [eps_1, eps_2m].
struct FrameChain {
  std::vector<WeightedField> eps;  // eps[0] = eps_1
  WeightedField eta;
};

// kappa_1 from [eps_1, eps_2] mod W_1, kappa_2 and kappa_3 from [eps_1, eps_4] mod L_2,
// each as the rational factor of r.
struct Kappas {
  RationalExpr k1, k2, k3;
};

struct NormalizedFrame {
  int branch = 1;
  RationalExpr mu0, mu1, mu2;  // eps~_1 = branch * (candidate + r (mu0 g0 + mu1 g1 + mu2 g2))
  FrameChain chain;
  std::vector<WeightedField> fields;  // h, g0, g1, g2, eps~_1..eps~_2m, eta
  std::vector<std::string> names;
};

// Line in V_{n-4}(lambda), parallel to the Euler field, through the value of
// eps_1 at (lambda, a, b). Its partner is the reflection through the origin.
struct AffineLine {
  std::vector<double> point, direction;  // annihilator coordinates
};

class FrameBuilder {
 public:
  // Requires n > 5.
  explicit FrameBuilder(const CurveSection& s);

  const ChartPtr& chart() const { return chart_; }
  int n() const { return n_; }
  int m() const { return n_ - 3; }
  size_t a_index() const { return chart_->dim() - 2; }
  size_t b_index() const { return chart_->dim() - 1; }
  const RationalExpr& pairing() const { return p_; }

  WeightedField bracket(const WeightedField& x, const WeightedField& y) const;
  // X(log r) for a rational field X.
  RationalExpr log_r_derivative(const VectorField& x) const;

  const WeightedField& h() const { return h_; }
  const WeightedField& g0() const { return g0_; }
  const WeightedField& g1() const { return g1_; }
  const WeightedField& g2() const { return g2_; }
  // r l: the representative of the affine line at (lambda, a, b).
  WeightedField epsilon1() const;
  // eps_1 + r (c0 g0 + c1 g1 + c2 g2)
  WeightedField candidate(const RationalExpr& c0, const RationalExpr& c1, const RationalExpr& c2) const;

  FrameChain recursion(const WeightedField& e1) const;
  Kappas kappas(const FrameChain& c) const;
  NormalizedFrame normalize(const WeightedField& candidate, int branch = 1) const;

  double r_at(const QVec& point) const;
  AffineLine epsilon1_affine(const QVec& lambda, const mpq_class& a) const;
  // Point on the chart from lambda and the fiber coordinates.
  QVec sigma_point(const QVec& lambda, const mpq_class& a, const mpq_class& b) const;

 private:
  int n_ = 0;
  ChartPtr chart_;
  RationalExpr p_;
  VectorField ell_;
  WeightedField h_, g0_, g1_, g2_;
};

// Value and first derivatives of a weighted field at an exact point.
struct FieldJet {
  int weight = 0;
  QVec value;
  QMat jac;  // jac[i][j] = d_j X^i
};
FieldJet field_jet(const WeightedField& f, const QVec& point);

// c[alpha][beta][gamma] = coefficient of v_gamma in [v_alpha, v_beta].
struct StructureTable {
  std::vector<std::string> names;
  QVec point;
  double r = 0;
  std::vector<std::vector<std::vector<double>>> c;

  size_t size() const { return names.size(); }
  size_t index(const std::string& name) const;
  double at(const std::string& x, const std::string& y, const std::string& z) const;
};

// Exact pointwise brackets: rational coefficient times r^(k_alpha + k_beta - k_gamma).
StructureTable structure_table(const FrameBuilder& fb, const NormalizedFrame& f, const QVec& point);
// Kappas of a chain evaluated at a point, including the r factor.
std::vector<double> kappas_at(const FrameBuilder& fb, const FrameChain& c, const QVec& point);

// The gl(2) relations together with the commutation relations of the flat model.
StructureTable expected_flat_table(int m);

struct SymmetryVerdict {
  bool maximal = false;
  double max_variation = 0;  // spread of each entry across the points
  double max_deviation = 0;  // distance to the flat table
  nlohmann::json diffs = nlohmann::json::array();
};
// Needs tables at >= 5 points.
SymmetryVerdict detect_max_symmetry(const std::vector<StructureTable>& tables, double tol = 1e-8);

// F = p_{n-3}^2 / 2 with its closed forms on the annihilator chart.
struct FlatModel {
  DistributionSpec dist;
  CotangentChart cc;
  VectorField H;                    // X2-bar - (u5/u4) X1-bar + sum_{i=5}^{m+2} u_{i+1} d/du_i
  RadicalPtr sqrt_u4;               // |u4|^(1/2) on the component u4 > 0
  SurdField eps_H;                  // |u4|^(1/2) d/du_{m+3}
  std::vector<SurdField> ad_chain;  // (ad H)^i eps_H, i = 0..2m-1
  // on Sigma_D
  VectorField g0, g1, g2, h;
};
FlatModel flat_model(int n);

nlohmann::json frame_report(const StructureTable& t);

}  // namespace r2g
