// rank2geo: command-line driver for the rank-2 distribution analyses.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "rank2geo/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Invariants of rank-2 distributions via abnormal extremals"};
  app.set_version_flag("--version", std::string("rank2geo ") + r2g::kToolVersion);

  r2g::AnalysisRequest req;
  std::string point, out;
  app.add_option("command", req.command, "growth | class | characteristic | frame | check-flat | flatmodel")
      ->required()
      ->check(CLI::IsMember({"growth", "class", "characteristic", "frame", "check-flat", "flatmodel"}));
  app.add_option("--input", req.input_path, "distribution file (mode = ode | fields)");
  app.add_option("--point", point, "base point and fiber values, e.g. \"x=0,p0=1,u4=2\"");
  app.add_option("--samples", req.samples, "number of sample points")->capture_default_str();
  app.add_option("--seed", req.seed, "RNG seed for sample points")->capture_default_str();
  app.add_option("--tol", req.tol, "tolerance for numerical certificates")->capture_default_str();
  app.add_option("--component", req.component, "sign of u4 at sampled points (1 or -1)")->capture_default_str();
  app.add_option("--n", req.n, "dimension for flatmodel");
  app.add_option("--workers", req.workers, "worker threads (default: RANK2GEO_WORKERS or all cores)");
  app.add_option("--out", out, "write the report (or the flatmodel file) here instead of stdout");
  CLI11_PARSE(app, argc, argv);

  if (!point.empty()) req.point = point;
  if (req.command != "flatmodel" && req.input_path.empty()) {
    std::cerr << "rank2geo: --input is required for " << req.command << "\n";
    return 2;
  }

  r2g::RunOutcome o = r2g::run(req);
  const std::string payload = req.command == "flatmodel" && o.exit_code == 0 ? o.text : o.report.dump(2) + "\n";
  if (out.empty()) {
    std::cout << payload;
  } else {
    std::ofstream f(out);
    if (!f) {
      std::cerr << "rank2geo: cannot write " << out << "\n";
      return 1;
    }
    f << payload;
  }
  if (o.report.contains("error")) {
    const auto& e = o.report["error"];
    std::cerr << "rank2geo: " << e["module"].get<std::string>() << ": " << e["reason"].get<std::string>() << "\n";
  }
  return o.exit_code;
}
