#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "rank2geo/geometry.hpp"

namespace r2g {

// Adapted coordinates on T*M: base coordinates, then u4..un, then u1, u2, u3.
// With this order the annihilator chart (base, u4..un) is a prefix, so
// expressions on it embed into T*M unchanged.
struct CotangentChart {
  DistributionSpec dist;
  int n = 0;
  QVec base_point;
  ChartPtr base, annihilator, full;
  std::vector<VectorField> X;       // X[0] = X1, ..., X[n-1] = Xn on the base chart
  std::vector<std::string> words;   // how each X_i was obtained
  std::vector<std::vector<RationalExpr>> theta;  // coframe: theta[i][c]
  // structure[a][b][k] = theta^k([X_a, X_b])
  std::vector<std::vector<std::vector<RationalExpr>>> structure;
  std::vector<std::vector<VectorField>> brackets;  // [X_a, X_b] on the base chart

  size_t u_index(int i) const;  // 1-based u_i -> position in `full`
  RationalExpr u(int i) const;  // coordinate function on `full` (on the annihilator chart for i >= 4)
  std::vector<RationalExpr> coframe(const VectorField& v) const;  // theta(pi_* v)
  bool on_annihilator(const VectorField& v) const;
};

CotangentChart quasi_impulses(const DistributionSpec& d, const QVec& base_point);

// Hamiltonian field of u_a (1-based) on the whole of T*M, sign convention i_G sigma = -dG.
VectorField impulse_lift(const CotangentChart& cc, int a);
// Same, restricted to the annihilator chart u1 = u2 = u3 = 0.
VectorField impulse_lift_on_annihilator(const CotangentChart& cc, int a);
// Hamiltonian field of a fiber-linear G on the `full` chart.
VectorField hamiltonian_field(const CotangentChart& cc, const RationalExpr& G);
// Quasi-impulse u_Y = sum theta^i(Y) u_i.
RationalExpr quasi_impulse(const CotangentChart& cc, const VectorField& y);

// Symbolic sigma(v, w) for fields on the full chart / the annihilator chart.
RationalExpr sigma_full(const CotangentChart& cc, const VectorField& v, const VectorField& w);
RationalExpr sigma_annihilator(const CotangentChart& cc, const VectorField& v, const VectorField& w);
// Exact matrix S with sigma(v, w) = v^T S w on T_lambda of the annihilator.
QMat sigma_matrix(const CotangentChart& cc, const QVec& lambda);
// Liouville form restricted to the annihilator, as a row vector at lambda.
QVec liouville_row(const CotangentChart& cc, const QVec& lambda);

// dim D^3 at the base point; 5 is the regular case.
int d3_dimension(const CotangentChart& cc);
int d3_dimension(const DistributionSpec& d, const QVec& q);

// Raw: u4 u2^ - u5 u1^; normalized: divided by u4.
VectorField characteristic_field(const CotangentChart& cc, bool normalized = true);
VectorField euler_field(const CotangentChart& cc);

nlohmann::json cotangent_report(const CotangentChart& cc);

extern const char* const kClassOneReason;

}  // namespace r2g
