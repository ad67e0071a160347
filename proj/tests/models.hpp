#pragma once

// Distributions used across the test suite.

#include <random>
#include <string>

#include "gen.hpp"
#include "rank2geo/geometry.hpp"

namespace models {

inline r2g::DistributionSpec ode(int n, const std::string& f) {
  return r2g::from_ode(n, r2g::parse_expr(f, r2g::ode_chart(n)));
}

inline std::string top(int n) { return "p" + std::to_string(n - 3); }

inline r2g::DistributionSpec flat(int n) { return ode(n, "1/2*" + top(n) + "^2"); }
inline r2g::DistributionSpec cartan() { return ode(5, "p2^2"); }
inline r2g::DistributionSpec perturbed7() { return ode(7, "1/2*p4^2 + 1/10*p0*p4^3"); }
// F = p0 gives a Goursat chain, growth (2,3,4,...,n), so dim D^3 = 4.
inline r2g::DistributionSpec goursat(int n) { return ode(n, "p0"); }

// Point on the annihilator chart: base point then u4..un, u4 > 0.
inline std::vector<mpq_class> lambda(std::mt19937_64& rng, int n) {
  auto p = gen::point(rng, size_t(n + n - 3));
  if (p[size_t(n)] <= 0) p[size_t(n)] = -p[size_t(n)] + 1;
  return p;
}

}  // namespace models
