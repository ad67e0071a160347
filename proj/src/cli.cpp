#include "rank2geo/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "rank2geo/frame.hpp"

namespace r2g {

const char* const kToolVersion = "0.1.0";

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

[[noreturn]] void parse_error(size_t line, size_t col, const std::string& what) {
  throw Error(ErrorKind::Parse, "cli", "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what);
}

struct Located {
  std::string text;
  size_t line = 0, col = 0;  // where the value starts
};

// Re-raise an expression error from symca at its position in the file.
RationalExpr parse_located(const Located& v, const ChartPtr& chart) {
  try {
    return parse_expr(v.text, chart);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Parse) throw;
    size_t off = 0;
    std::string msg = e.reason();
    if (msg.rfind("column ", 0) == 0) {
      size_t colon = msg.find(':');
      off = std::stoul(msg.substr(7, colon - 7)) - 1;
      msg = trim(msg.substr(colon + 1));
    }
    parse_error(v.line, v.col + off, msg);
  }
}

struct RawInput {
  InputSpec spec;
  std::map<std::string, Located> where;  // key (with section prefix) -> value position
};

RawInput parse_raw(const std::string& text) {
  RawInput raw;
  InputSpec& in = raw.spec;
  std::istringstream is(text);
  std::string line;
  std::string section;
  size_t ln = 0;
  while (std::getline(is, line)) {
    ++ln;
    std::string body = line.substr(0, line.find('#'));
    if (trim(body).empty()) continue;
    size_t first = body.find_first_not_of(" \t");
    if (body[first] == '[') {
      std::string s = trim(body);
      if (s.back() != ']') parse_error(ln, first + 1, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "X1" && section != "X2") parse_error(ln, first + 2, "unknown section '" + section + "' (expected X1 or X2)");
      continue;
    }
    size_t eq = body.find('=');
    if (eq == std::string::npos) parse_error(ln, first + 1, "expected 'key = value'");
    std::string key = trim(body.substr(0, eq));
    if (key.empty()) parse_error(ln, first + 1, "missing key before '='");
    size_t vstart = body.find_first_not_of(" \t", eq + 1);
    if (vstart == std::string::npos) parse_error(ln, eq + 2, "missing value after '='");
    std::string value = trim(body.substr(vstart));
    size_t vcol = vstart + 1;
    if (value.size() >= 2 && value.front() == '"') {
      if (value.back() != '"') parse_error(ln, vcol, "unterminated string");
      value = unquote(value);
      ++vcol;
    }
    Located loc{value, ln, vcol};
    if (!section.empty()) {
      auto& target = section == "X1" ? in.x1 : in.x2;
      for (const auto& kv : target)
        if (kv.first == key) parse_error(ln, first + 1, "duplicate component '" + key + "' in [" + section + "]");
      target.emplace_back(key, value);
      raw.where[section + "." + key] = loc;
      continue;
    }
    if (raw.where.count(key)) parse_error(ln, first + 1, "duplicate key '" + key + "'");
    raw.where[key] = loc;
    if (key == "mode") {
      if (value != "ode" && value != "fields") parse_error(ln, vcol, "mode must be ode or fields");
      in.mode = value;
    } else if (key == "n") {
      try {
        size_t used = 0;
        in.n = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        parse_error(ln, vcol, "n must be an integer");
      }
    } else if (key == "F") {
      in.F = value;
    } else if (key == "coordinates") {
      std::string tok;
      std::istringstream cs(value);
      while (std::getline(cs, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) parse_error(ln, vcol, "empty coordinate name");
        in.coordinates.push_back(tok);
      }
    } else {
      parse_error(ln, first + 1, "unknown key '" + key + "'");
    }
  }
  auto need = [&](const std::string& key) {
    if (!raw.where.count(key)) parse_error(ln + 1, 1, "missing required key '" + key + "'");
  };
  need("mode");
  if (in.mode == "ode") {
    need("n");
    need("F");
    if (in.n < 3) parse_error(raw.where["n"].line, raw.where["n"].col, "n must be at least 3");
  } else {
    need("coordinates");
    if (in.x1.empty() || in.x2.empty()) parse_error(ln + 1, 1, "fields mode needs [X1] and [X2] sections");
  }
  return raw;
}

DistributionSpec build_raw(const RawInput& raw) {
  const InputSpec& in = raw.spec;
  if (in.mode == "ode") {
    ChartPtr c = ode_chart(in.n);
    return from_ode(in.n, parse_located(raw.where.at("F"), c));
  }
  ChartPtr c = Chart::make(in.coordinates);
  auto field = [&](const std::vector<std::pair<std::string, std::string>>& comps, const std::string& sec) {
    VectorField f(c);
    for (const auto& [name, text] : comps) {
      const Located& loc = raw.where.at(sec + "." + name);
      auto idx = c->index(name);
      if (!idx) parse_error(loc.line, 1, "'" + name + "' is not a declared coordinate");
      f[*idx] = parse_located(loc, c);
    }
    return f;
  };
  return from_fields(field(in.x1, "X1"), field(in.x2, "X2"));
}

QVec to_point(const ChartPtr& chart, const std::map<std::string, mpq_class>& vals, size_t count) {
  QVec p(count);
  for (size_t i = 0; i < count; ++i) {
    auto it = vals.find(chart->name(i));
    if (it == vals.end()) throw Error(ErrorKind::Parse, "cli", "--point is missing coordinate '" + chart->name(i) + "'");
    p[i] = it->second;
  }
  return p;
}

std::vector<std::string> point_strings(const QVec& p) {
  std::vector<std::string> s;
  for (const auto& x : p) s.push_back(rational_str(x));
  return s;
}

mpq_class draw(std::mt19937_64& rng, int span = 7, int maxden = 4) {
  std::uniform_int_distribution<int> num(-span, span), den(1, maxden);
  mpq_class q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

// Base point where the generators have no pole.
QVec sample_base(const DistributionSpec& d, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    QVec q(d.chart->dim());
    for (auto& x : q) x = draw(rng);
    try {
      eval_exact(d.X1, q);
      eval_exact(d.X2, q);
      return q;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Pole) throw;
    }
  }
  throw Error(ErrorKind::Degenerate, "cli", "no pole-free sample point found in 1000 draws");
}

// Fiber values u4..un with u4 != 0 of the requested sign.
QVec sample_fiber(int n, int component, std::mt19937_64& rng) {
  QVec u(size_t(n - 3));
  for (auto& x : u) x = draw(rng);
  mpq_class u4 = abs(u[0]);
  if (u4 == 0) u4 = 1;
  u[0] = component > 0 ? u4 : -u4;
  return u;
}

struct Context {
  const AnalysisRequest& req;
  DistributionSpec dist;
  std::mt19937_64 rng;
  std::optional<std::map<std::string, mpq_class>> given;
};

// Base point from --point when given, otherwise sampled.
QVec base_point(Context& c) {
  if (c.given) return to_point(c.dist.chart, *c.given, c.dist.chart->dim());
  return sample_base(c.dist, c.rng);
}

// Point on the annihilator: base values then u4..un; --point may fix any of them.
QVec lambda_point(Context& c, const QVec& q, int n) {
  QVec lam = q;
  QVec u = sample_fiber(n, c.req.component, c.rng);
  for (int i = 4; i <= n; ++i) {
    const std::string name = "u" + std::to_string(i);
    if (c.given && c.given->count(name)) u[size_t(i - 4)] = c.given->at(name);
  }
  lam.insert(lam.end(), u.begin(), u.end());
  return lam;
}

int samples(const AnalysisRequest& req, int at_least = 1) {
  if (req.samples < 1) throw Error(ErrorKind::Parse, "cli", "--samples must be at least 1");
  return std::max(req.samples, at_least);
}

nlohmann::json error_json(const Error& e) {
  return {{"kind", kind_name(e.kind())}, {"module", e.module()}, {"reason", e.reason()}};
}

// ------------------------------------------------------------ commands

nlohmann::json cmd_growth(Context& c, int& code) {
  const int dim = int(c.dist.chart->dim());
  std::vector<QVec> pts;
  for (int i = 0; i < samples(c.req); ++i) pts.push_back(base_point(c));
  std::vector<nlohmann::json> out(pts.size());
  parallel_for(pts.size(), c.req.workers, [&](size_t i) {
    GrowthResult g = growth_analysis(c.dist, pts[i], dim);
    nlohmann::json j{{"point", point_strings(pts[i])}, {"growth", g.dims}, {"words", g.words}, {"stabilized", g.stabilized}};
    if (g.dims.back() < dim) j["warning"] = "not bracket generating: the flag stabilizes below the dimension of M";
    out[i] = j;
  });
  code = 0;
  return {{"points", out}};
}

nlohmann::json cmd_class(Context& c, int& code) {
  const int n = int(c.dist.chart->dim());
  if (n < 5) throw Error(ErrorKind::Degenerate, "cli", "class needs dim M >= 5");
  std::vector<QVec> pts;
  for (int i = 0; i < samples(c.req); ++i) pts.push_back(lambda_point(c, base_point(c), n));
  std::vector<nlohmann::json> out(pts.size());
  std::vector<int> class_one(pts.size(), 0);
  parallel_for(pts.size(), c.req.workers, [&](size_t i) {
    ClassReport r = class_at(c.dist, pts[i]);
    class_one[i] = r.class_one;
    nlohmann::json j{{"lambda", point_strings(pts[i])}, {"nu", r.nu},         {"maximal", r.maximal},
                     {"in_RD", r.in_RD},                {"class_one", r.class_one}, {"dim_upper", r.upper_dims}};
    if (!r.reason.empty()) j["reason"] = r.reason;
    out[i] = j;
  });
  nlohmann::json res{{"points", out}};
  code = 0;
  if (std::any_of(class_one.begin(), class_one.end(), [](int x) { return x; })) {
    res["error"] = {{"kind", kind_name(ErrorKind::Degenerate)}, {"module", "flags"}, {"reason", kClassOneReason}};
    code = 2;
  }
  return res;
}

nlohmann::json cmd_characteristic(Context& c, int& code) {
  const int n = int(c.dist.chart->dim());
  QVec q = base_point(c);
  CotangentChart cc = quasi_impulses(c.dist, q);
  FlagEngine eng(cc);
  eng.families(true);
  eng.families(false);
  nlohmann::json res = cotangent_report(cc);
  res["component"] = c.req.component > 0 ? "u4 > 0" : "u4 < 0";
  res["base_point"] = point_strings(q);
  auto fstr = [](const VectorField& f) {
    nlohmann::json j = nlohmann::json::object();
    for (size_t i = 0; i < f.dim(); ++i)
      if (!f[i].is_zero()) j[f.chart()->name(i)] = f[i].str();
    return j;
  };
  res["characteristic_raw"] = fstr(characteristic_field(cc, false));
  res["characteristic"] = fstr(characteristic_field(cc, true));
  std::vector<QVec> pts;
  for (int i = 0; i < samples(c.req); ++i) pts.push_back(lambda_point(c, q, n));
  std::vector<nlohmann::json> out(pts.size());
  parallel_for(pts.size(), c.req.workers, [&](size_t i) {
    try {
      FlagAtPoint f = eng.flag_at(pts[i], false);
      out[i] = flag_report(f, eng.class_nu(pts[i]));
    } catch (const Error& e) {
      out[i] = {{"lambda", point_strings(pts[i])}, {"error", error_json(e)}};
    }
  });
  res["points"] = out;
  code = 0;
  return res;
}

nlohmann::json cmd_frame(Context& c, int& code, bool verdict_only) {
  const int n = int(c.dist.chart->dim());
  if (n <= 5)
    throw Error(ErrorKind::Degenerate, "frame",
                "n = " + std::to_string(n) + ": the canonical frame needs n > 5 (n = 5 requires a further prolongation)");
  QVec q = base_point(c);
  FlagEngine eng(quasi_impulses(c.dist, q));
  QVec lam0 = lambda_point(c, q, n);
  CurveSection sec(eng, eng.top_vertical_section(lam0));
  FrameBuilder fb(sec);
  NormalizedFrame frame = fb.normalize(fb.epsilon1());
  nlohmann::json res;
  res["base_point"] = point_strings(q);
  res["reference_lambda"] = point_strings(lam0);
  res["normalization"] = {{"mu0", frame.mu0.str()}, {"mu1", frame.mu1.str()}, {"mu2", frame.mu2.str()}, {"branch", frame.branch}};
  res["wilczynski"] = wilczynski_report(sec, lam0);
  // Shrink the working interval until the Riccati solution stays in its domain.
  res["projective_parameter"] = nlohmann::json::object();
  for (double hw : {0.5, 0.25, 0.1, 0.05}) {
    try {
      ReparameterizationCheck rc = certify_reparameterization(flow_source(sec, lam0), n - 3, &sec, hw);
      res["projective_parameter"] = {{"half_width", hw},
                                     {"max_forward", rc.max_forward},
                                     {"max_recomputed", rc.max_recomputed},
                                     {"max_top", rc.max_top},
                                     {"max_step_change", rc.max_step_change},
                                     {"b_scale", rc.b_scale},
                                     {"samples", rc.samples},
                                     {"certified", rc.max_recomputed < c.req.tol * std::max(1.0, rc.b_scale)}};
      break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Degenerate) throw;
      res["projective_parameter"] = {{"half_width", hw}, {"error", error_json(e)}};
    }
  }

  std::vector<QVec> pts{fb.sigma_point(lam0, 1, 0)};
  const int want = samples(c.req, verdict_only ? 5 : 1);
  while (int(pts.size()) < want) {
    QVec lam = lambda_point(c, c.given ? q : sample_base(c.dist, c.rng), n);
    mpq_class a = abs(draw(c.rng)) + 1;
    pts.push_back(fb.sigma_point(lam, a, draw(c.rng)));
  }
  std::vector<std::optional<StructureTable>> tables(pts.size());
  std::vector<nlohmann::json> per(pts.size());
  parallel_for(pts.size(), c.req.workers, [&](size_t i) {
    try {
      StructureTable t = structure_table(fb, frame, pts[i]);
      nlohmann::json j = frame_report(t);
      std::vector<std::vector<double>> mat;
      for (const auto& f : frame.fields) {
        std::vector<double> col;
        const double s = std::pow(t.r, f.weight);
        for (const auto& x : eval_exact(f.field, pts[i])) col.push_back(s * x.get_d());
        mat.push_back(col);
      }
      j["frame_matrix"] = mat;
      per[i] = j;
      tables[i] = std::move(t);
    } catch (const Error& e) {
      per[i] = {{"point", point_strings(pts[i])}, {"error", error_json(e)}};
    }
  });
  std::vector<StructureTable> ok;
  for (auto& t : tables)
    if (t) ok.push_back(*t);
  if (ok.size() >= 5) {
    SymmetryVerdict v = detect_max_symmetry(ok, c.req.tol);
    res["verdict"] = {{"maximal_symmetry", v.maximal},
                      {"max_variation", v.max_variation},
                      {"max_deviation", v.max_deviation},
                      {"diffs", v.diffs}};
  } else if (verdict_only) {
    throw Error(ErrorKind::NotRegular, "frame", "fewer than 5 sample points admit a frame");
  }
  if (verdict_only) {
    res["structure"] = per.front();
  } else {
    res["points"] = per;
  }
  code = 0;
  return res;
}

}  // namespace

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Degenerate:
    case ErrorKind::NotRegular:
    case ErrorKind::Parse:
    case ErrorKind::Pole: return 2;
    default: return 1;
  }
}

void parallel_for(size_t count, int workers, const std::function<void(size_t)>& f) {
  if (workers <= 0) {
    const char* env = std::getenv("RANK2GEO_WORKERS");
    workers = env ? std::atoi(env) : int(std::thread::hardware_concurrency());
  }
  workers = std::max(1, std::min<int>(workers, int(count)));
  if (workers == 1) {
    for (size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errs(count);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (size_t i = next++; i < count; i = next++) {
        try {
          f(i);
        } catch (...) {
          errs[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

InputSpec parse_input(const std::string& text) {
  RawInput raw = parse_raw(text);
  build_raw(raw);  // expression errors surface here with their position
  return raw.spec;
}

DistributionSpec build_distribution(const InputSpec& in) { return build_raw(parse_raw(emit_input(in))); }

std::string emit_input(const InputSpec& in) {
  std::ostringstream os;
  os << "mode = " << in.mode << "\n";
  if (in.mode == "ode") {
    os << "n = " << in.n << "\n";
    os << "F = " << parse_expr(in.F, ode_chart(in.n)).str() << "\n";
    return os.str();
  }
  ChartPtr c = Chart::make(in.coordinates);
  os << "coordinates = ";
  for (size_t i = 0; i < in.coordinates.size(); ++i) os << (i ? ", " : "") << in.coordinates[i];
  os << "\n";
  auto section = [&](const char* name, const std::vector<std::pair<std::string, std::string>>& comps) {
    os << "\n[" << name << "]\n";
    for (size_t i = 0; i < c->dim(); ++i)
      for (const auto& [k, v] : comps)
        if (k == c->name(i)) {
          RationalExpr e = parse_expr(v, c);
          if (!e.is_zero()) os << k << " = " << e.str() << "\n";
        }
  };
  section("X1", in.x1);
  section("X2", in.x2);
  return os.str();
}

std::string emit_flatmodel(int n) {
  if (n < 5) throw Error(ErrorKind::Degenerate, "cli", "flat model needs n >= 5 (got n = " + std::to_string(n) + ")");
  InputSpec in;
  in.mode = "ode";
  in.n = n;
  in.F = "1/2*p" + std::to_string(n - 3) + "^2";
  return emit_input(in);
}

std::map<std::string, mpq_class> parse_point(const std::string& text) {
  std::map<std::string, mpq_class> out;
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    size_t eq = tok.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Parse, "cli", "--point entry '" + trim(tok) + "' is not name=value");
    std::string name = trim(tok.substr(0, eq));
    if (out.count(name)) throw Error(ErrorKind::Parse, "cli", "--point assigns '" + name + "' twice");
    out[name] = parse_rational(trim(tok.substr(eq + 1)));
  }
  return out;
}

RunOutcome run(const AnalysisRequest& req) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome o;
  nlohmann::json echo{{"command", req.command},  {"input", req.input_path}, {"samples", req.samples},
                      {"seed", req.seed},        {"tol", req.tol},          {"component", req.component}};
  if (req.point) echo["point"] = *req.point;
  if (req.command == "flatmodel") echo["n"] = req.n;
  o.report = {{"tool", "rank2geo"}, {"version", kToolVersion}, {"request", echo}};
  try {
    if (req.tol <= 0) throw Error(ErrorKind::Parse, "cli", "--tol must be positive");
    if (req.component != 1 && req.component != -1) throw Error(ErrorKind::Parse, "cli", "--component must be 1 or -1");
    if (req.command == "flatmodel") {
      o.text = emit_flatmodel(req.n);
      o.report["result"] = {{"input_file", o.text}};
    } else {
      std::string text = req.input_text;
      if (!req.input_path.empty()) {
        std::ifstream f(req.input_path);
        if (!f) throw Error(ErrorKind::Parse, "cli", "cannot read input file '" + req.input_path + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        text = ss.str();
      }
      RawInput raw = parse_raw(text);
      Context c{req, build_raw(raw), std::mt19937_64(req.seed), std::nullopt};
      if (req.point) c.given = parse_point(*req.point);
      int code = 0;
      if (req.command == "growth") {
        o.report["result"] = cmd_growth(c, code);
      } else if (req.command == "class") {
        o.report["result"] = cmd_class(c, code);
      } else if (req.command == "characteristic") {
        o.report["result"] = cmd_characteristic(c, code);
      } else if (req.command == "frame") {
        o.report["result"] = cmd_frame(c, code, false);
      } else if (req.command == "check-flat") {
        o.report["result"] = cmd_frame(c, code, true);
      } else {
        throw Error(ErrorKind::Parse, "cli", "unknown command '" + req.command + "'");
      }
      o.exit_code = code;
    }
  } catch (const Error& e) {
    o.report["error"] = error_json(e);
    o.exit_code = exit_code_for(e.kind());
  } catch (const std::exception& e) {
    o.report["error"] = {{"kind", "internal"}, {"module", "cli"}, {"reason", e.what()}};
    o.exit_code = 1;
  }
  o.report["timing_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return o;
}

}  // namespace r2g
