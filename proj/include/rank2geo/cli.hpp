#pragma once

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rank2geo/geometry.hpp"

namespace r2g {

extern const char* const kToolVersion;

// Declarative input file. ODE mode:
//   mode = ode
//   n = 6
//   F = 1/2*p3^2
// Fields mode:
//   mode = fields
//   coordinates = x, y, z, u, v
//   [X1]
//   x = 1
//   [X2]
//   y = 1
//   z = x^2
struct InputSpec {
  std::string mode;  // "ode" or "fields"
  int n = 0;
  std::string F;
  std::vector<std::string> coordinates;
  std::vector<std::pair<std::string, std::string>> x1, x2;  // coordinate -> expression text
};

// Errors carry "line L, column C".
InputSpec parse_input(const std::string& text);
DistributionSpec build_distribution(const InputSpec& in);
// Canonical text; parse_input(emit_input(s)) emits the same bytes again.
std::string emit_input(const InputSpec& in);
std::string emit_flatmodel(int n);

// "x=0,p0=1,u4=2": values by coordinate name.
std::map<std::string, mpq_class> parse_point(const std::string& text);

struct AnalysisRequest {
  std::string command;  // growth | class | characteristic | frame | check-flat | flatmodel
  std::string input_path;
  std::string input_text;  // used when input_path is empty
  std::optional<std::string> point;
  int samples = 5;
  uint64_t seed = 1;
  double tol = 1e-8;
  int component = 1;  // sign of u4 at sampled points
  int n = 0;          // flatmodel only
  int workers = 0;    // 0: RANK2GEO_WORKERS or the hardware concurrency
};

struct RunOutcome {
  int exit_code = 0;
  nlohmann::json report;
  std::string text;  // flatmodel output
};

// 0 on success, 2 on degenerate or invalid input, 1 on internal errors.
RunOutcome run(const AnalysisRequest& req);
int exit_code_for(ErrorKind k);

// Runs f(0..count-1) on a worker pool; results come back in index order.
void parallel_for(size_t count, int workers, const std::function<void(size_t)>& f);

}  // namespace r2g
