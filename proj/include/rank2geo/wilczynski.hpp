#pragma once

#include <json.hpp>

#include <functional>
#include <map>
#include <vector>

#include "rank2geo/flags.hpp"

namespace r2g {

// Truncated Taylor series: c[k] = f^(k)(t0) / k!.
using Series = std::vector<double>;

Series series_mul(const Series& a, const Series& b);
Series series_div(const Series& a, const Series& b);
Series series_pow(const Series& a, double alpha);  // requires a[0] > 0
Series series_derivative(const Series& a);
Series series_integral(const Series& a, double c0);
// f(g(t)) for f given by its series around g[0].
Series series_compose(const Series& f, const Series& g);
double series_jet(const Series& a, int k);  // f^(k)(t0)
Series series_eval(const RationalExpr& e, const std::vector<Series>& point);

// Curve lambda -> J_(n-4)(lambda) along the integral curves of the normalized H.
// l is a section: a field on the annihilator chart with values in V_{n-4}, not
// collinear with the Euler field.
class CurveSection {
 public:
  CurveSection(const FlagEngine& engine, VectorField l);

  const CotangentChart& chart() const { return cc_; }
  int m() const { return cc_.n - 3; }
  const VectorField& H() const { return h_; }
  const VectorField& ell() const { return l_; }

  // (ad H)^0 l, ..., (ad H)^k l; k <= 2m.
  std::vector<VectorField> derivative_frame(int k) const;
  // P = sigma((ad H)^m l, (ad H)^(m-1) l); the canonical section is |P|^(-1/2) l.
  const RationalExpr& pairing() const;
  // gamma = -H(P) / (2P): d/dt of E = |P|^(-1/2) R_0 gives R_{k+1} = [H, R_k] + gamma R_k.
  const RationalExpr& gamma() const;
  // R_k = sum_j r[k][j] (ad H)^j l for k <= 2m; E^(k) = |P|^(-1/2) R_k.
  const std::vector<std::vector<RationalExpr>>& r_coefficients() const;
  VectorField section_derivative(int k) const;
  // B_{2m-1} and B_{2m-2} of the canonical section, symbolically.
  RationalExpr b_top() const;
  const RationalExpr& rho() const;

  // All B_0..B_{2m-1} at an exact point, from the anti-triangular Gram system.
  QVec b_at(const QVec& lambda) const;
  // Vectors R_0(lambda)..R_{2m}(lambda), exact.
  std::vector<QVec> section_jets(const QVec& lambda) const;
  std::vector<std::vector<double>> section_jets(const std::vector<double>& lambda) const;
  // Gram entries sigma((ad H)^j l, (ad H)^k l), symbolic; zero when j + k < 2m - 1.
  RationalExpr gram(int j, int k) const;
  // sigma(E^(m), E^(m-1)) evaluated at lambda; +-1 when the recursion is right.
  mpq_class normalized_pairing(const QVec& lambda) const;

  // Flow of H in floating point.
  std::vector<double> flow_rhs(const std::vector<double>& y) const;
  // Taylor series of the integral curve of H through lambda, to the given order.
  std::vector<Series> flow_series(const std::vector<double>& lambda, int order) const;

 private:
  CotangentChart cc_;
  VectorField h_, l_;
  mutable std::vector<VectorField> frame_;
  mutable std::optional<RationalExpr> p_, gamma_, rho_;
  mutable std::optional<std::vector<std::vector<RationalExpr>>> r_;
  mutable std::map<std::pair<int, int>, RationalExpr> gram_;
};

// Schwarzian: exact for a rational function of one variable, and by central
// differences with two Richardson steps for a numeric function.
RationalExpr schwarzian(const RationalExpr& ups, size_t var);
double schwarzian_numeric(const std::function<double(double)>& ups, double t, double h = 1e-2);
double schwarzian_from_jet(double d1, double d2, double d3);

// Decompose the 2m-th derivative of the reparameterized canonical section
// tau -> ups'(tau)^{-(2m-1)/2} E(ups(tau)) at a point where the t-jets of E are
// `jets` (R_0..R_{2m}) and ups has derivatives ups_jet[k] = ups^(k+1), k = 0..2m.
// Columns in `extra` are quotiented out (H and e). Returns B~_0..B~_{2m-1}.
std::vector<double> decompose_reparameterized(const std::vector<std::vector<double>>& jets,
                                              const std::vector<std::vector<double>>& extra,
                                              const std::vector<double>& ups_jet);
// Exact version; ups_jet[0] must be the square of a positive rational.
std::vector<mpq_class> decompose_reparameterized(const std::vector<QVec>& jets, const std::vector<QVec>& extra,
                                                 const QVec& ups_jet);

// m(4m^2 - 1)/3
double law_constant(int m);

struct Reparameterization {
  std::vector<double> tau, ups, dups, w;  // w = ups''/(2 ups')
  std::vector<std::vector<double>> state;  // point of the annihilator chart at ups(tau)
  double step = 0;
};

// Solves S(ups) = ups'^2 B(ups)/c with ups(0) = t0, ups'(0) = 1, ups''(0) = 0,
// using the Riccati variable w: ups' = v, v' = 2 w v, w' = w^2 + v^2 B / c.
// `rhs` moves the auxiliary state along d/dt (may be empty); `b` returns B at (t, state).
struct BSource {
  std::function<std::vector<double>(const std::vector<double>&)> rhs;
  std::function<double(double, const std::vector<double>&)> b;
  std::vector<double> start;
  double t0 = 0;
};
Reparameterization projective_reparameterization(const BSource& src, int m, double half_width = 0.5,
                                                 double step = 1e-3);
BSource flow_source(const CurveSection& s, const QVec& lambda0);

// B~_0..B~_{2m-1} in the parameter tau at sample i of a reparameterization
// along the flow, recomputed from the t-jets of the canonical section.
std::vector<double> reparameterized_b_at(const CurveSection& s, const Reparameterization& rep, size_t i);

struct ReparameterizationCheck {
  double max_forward = 0;      // max |ups'^2 B(ups) - c S(ups)| with S from finite differences
  double max_recomputed = 0;   // max |B~_{2m-2}| from the jet decomposition (flow sources only)
  double max_top = 0;          // max |B~_{2m-1}| from the jet decomposition
  double max_step_change = 0;  // max |ups_h - ups_{h/2}|
  double b_scale = 0;          // max |B~_k| over all k; round-off in the jets grows with it
  int samples = 0;
};
// `section` enables the jet recomputation; pass nullptr for synthetic sources.
ReparameterizationCheck certify_reparameterization(const BSource& src, int m, const CurveSection* section,
                                                   double half_width = 0.5, double step = 1e-3, int samples = 50);

nlohmann::json wilczynski_report(const CurveSection& s, const QVec& lambda);

}  // namespace r2g
