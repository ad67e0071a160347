#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "rank2geo/cotangent.hpp"

namespace r2g {

// Subspaces are lists of basis vectors in the coordinates of the annihilator
// chart, in reduced echelon form (pivot order = coordinate order).
struct FlagAtPoint {
  QVec lambda;
  int n = 0;
  bool normalized_field = true;       // H = u2^ - (u5/u4) u1^, otherwise the raw field
  QVec C;                             // characteristic direction
  QVec e;                             // Euler field
  QMat sigma;                         // sigma on T_lambda A
  std::vector<QVec> J;                // the lift
  std::vector<std::vector<QVec>> upper;     // J^(i), i = 0..depth
  std::vector<std::vector<QVec>> lower;     // J_(i), skew complements of upper[i]
  std::vector<std::vector<QVec>> vertical;  // V_i = J_(i) ∩ vertical
  std::vector<std::string> violations;      // failed structural properties, empty when consistent

  std::vector<int> upper_dims() const;
  std::vector<int> lower_dims() const;
};

struct ClassReport {
  int nu = 0;
  bool maximal = false;
  bool in_RD = false;
  bool class_one = false;  // dim D^3(q) = 4
  std::vector<int> upper_dims;
  std::string reason;
};

// Quotient W = ker(s) / span{H, e} at a point, with the induced form.
struct QuotientModel {
  std::vector<QVec> complement;  // representatives of a basis of W in T_lambda A
  QMat sigma;                    // sigma-bar in that basis
  std::vector<QVec> J;
  std::vector<std::vector<QVec>> upper, lower;  // images in W coordinates
  bool lagrangian = false;
  bool duality = false;
  size_t dim() const { return complement.size(); }
};

// Spanning families (ad H)^k f, f in {X1-bar, X2-bar, d/du4..d/dun}, kept symbolically
// so that evaluation at many points reuses them.
class FlagEngine {
 public:
  explicit FlagEngine(CotangentChart cc, int extra_steps = 2);

  const CotangentChart& chart() const { return cc_; }
  int depth() const { return cc_.n - 3 + extra_; }

  std::vector<VectorField> lift_fields() const;
  std::vector<QVec> lift(const QVec& lambda) const;
  // Normalized H where u4 != 0, the raw field where u4 = 0 and u5 != 0.
  FlagAtPoint flag_at(const QVec& lambda, bool strict = true) const;
  ClassReport class_nu(const QVec& lambda) const;
  QuotientModel quotient_symplectic(const FlagAtPoint& f) const;

  // Section of lambda -> V_{n-4}(lambda) modulo the Euler field: the vertical field
  // with zero du4-component and last nonzero component equal to 1.
  VectorField top_vertical_section(const QVec& reference) const;
  // J_(i) = span{H, e, (ad H)^k l : k <= n-4-i}; compares with the skew-complement route.
  bool bracket_route_agrees(const FlagAtPoint& f, const VectorField& l) const;

  const std::vector<std::vector<VectorField>>& families(bool normalized) const;

 private:
  CotangentChart cc_;
  int extra_;
  mutable std::optional<std::vector<std::vector<VectorField>>> norm_, raw_;
};

// Every structural property of the flag that must hold at a regular point.
std::vector<std::string> flag_violations(const FlagAtPoint& f);

// Class at lambda = (q, u4..un), including the class-1 branch dim D^3(q) = 4.
ClassReport class_at(const DistributionSpec& d, const QVec& lambda);

nlohmann::json flag_report(const FlagAtPoint& f, const ClassReport& c);

// The vertical subspace span{d/du4..d/dun} at a point of the annihilator chart.
std::vector<QVec> vertical_basis(int n);

}  // namespace r2g
