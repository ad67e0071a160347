#include "rank2geo/geometry.hpp"

namespace r2g {

QVec eval_exact(const VectorField& f, const QVec& pt) {
  QVec v(f.dim(), 0);
  for (size_t i = 0; i < f.dim(); ++i)
    if (!f[i].is_zero()) v[i] = f[i].eval(pt);
  return v;
}

QVec eval_point(const VectorField& f, const QVec& pt, const char* module) {
  try {
    return eval_exact(f, pt);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Pole) throw;
    throw Error(ErrorKind::Pole, module, "vector field has a pole at the point: " + e.reason());
  }
}

SurdField to_surd(const VectorField& f) {
  SurdField s(f.chart());
  for (size_t i = 0; i < f.dim(); ++i) s[i] = SurdExpr(f[i]);
  return s;
}

ChartPtr ode_chart(int n) {
  if (n < 4) throw Error(ErrorKind::Degenerate, "geometry", "ODE mode needs n >= 4, got " + std::to_string(n));
  std::vector<std::string> names{"x"};
  for (int i = 0; i <= n - 3; ++i) names.push_back("p" + std::to_string(i));
  names.push_back("z");
  return Chart::make(std::move(names));
}

DistributionSpec from_ode(int n, const RationalExpr& F) {
  ChartPtr chart = ode_chart(n);
  if (F.chart() && !chart->extends(*F.chart()) && !F.chart()->extends(*chart))
    throw Error(ErrorKind::ChartMismatch, "geometry", "F is not expressed in the coordinates (x, p0..p" +
                                                          std::to_string(n - 3) + ", z)");
  if (F.chart() && F.chart()->dim() > chart->dim()) {
    for (size_t i = chart->dim(); i < F.chart()->dim(); ++i)
      if (F.depends_on(i))
        throw Error(ErrorKind::ChartMismatch, "geometry", "F references unknown coordinate '" + F.chart()->name(i) + "'");
  }
  RationalExpr f = F.chart() ? RationalExpr::from_polys(chart, F.num(), F.den()) : F;
  DistributionSpec d;
  d.chart = chart;
  d.X1 = VectorField::partial(chart, size_t(n - 2));  // d/dp_{n-3}
  d.X2 = VectorField::partial(chart, 0);
  for (int i = 0; i <= n - 4; ++i) d.X2[size_t(i + 1)] = RationalExpr::coordinate(chart, size_t(i + 2));
  d.X2[size_t(n - 1)] = f;
  d.ode = OdeSource{n, f};
  return d;
}

DistributionSpec from_fields(VectorField x1, VectorField x2) {
  x1.align(x2);
  x2.align(x1);
  if (x1.dim() < 3) throw Error(ErrorKind::Degenerate, "geometry", "chart dimension must be at least 3");
  DistributionSpec d;
  d.chart = x1.chart();
  d.X1 = std::move(x1);
  d.X2 = std::move(x2);
  return d;
}

std::vector<std::vector<RationalExpr>> pfaffian_forms(const DistributionSpec& d) {
  if (!d.ode) throw Error(ErrorKind::Degenerate, "geometry", "Pfaffian presentation needs an ODE-mode distribution");
  const int n = d.ode->n;
  std::vector<std::vector<RationalExpr>> forms;
  for (int i = 0; i <= n - 4; ++i) {
    std::vector<RationalExpr> w(static_cast<size_t>(n));
    w[size_t(i + 1)] = 1;
    w[0] = -RationalExpr::coordinate(d.chart, size_t(i + 2));
    forms.push_back(std::move(w));
  }
  std::vector<RationalExpr> w(static_cast<size_t>(n));
  w[size_t(n - 1)] = 1;
  w[0] = -d.ode->F;
  forms.push_back(std::move(w));
  return forms;
}

GrowthResult growth_analysis(const DistributionSpec& d, const QVec& q, int depth, int max_word_length) {
  const size_t n = d.chart->dim();
  GrowthResult res;
  struct Word {
    std::string label;
    VectorField f;
  };
  std::vector<Word> all{{"X1", d.X1}, {"X2", d.X2}};
  std::vector<QVec> values{eval_point(d.X1, q, "geometry"), eval_point(d.X2, q, "geometry")};
  if (span_dim(values) < 2)
    throw Error(ErrorKind::Degenerate, "geometry", "generators are linearly dependent at the point");
  res.dims.push_back(2);
  res.words = {"X1", "X2"};
  std::vector<size_t> last{0, 1};
  for (int level = 2; level <= depth; ++level) {
    if (res.dims.back() == int(n)) break;
    if (level > max_word_length) {
      res.truncated = true;
      break;
    }
    std::vector<size_t> next;
    for (size_t g = 0; g < 2; ++g) {
      for (size_t w : last) {
        VectorField b = lie_bracket(all[g].f, all[w].f);
        if (b.is_zero()) continue;
        bool dup = false;
        for (const auto& o : all)
          if (o.f == b || o.f == -b) {
            dup = true;
            break;
          }
        if (dup) continue;
        all.push_back({"[" + all[g].label + "," + all[w].label + "]", std::move(b)});
        values.push_back(eval_point(all.back().f, q, "geometry"));
        res.words.push_back(all.back().label);
        next.push_back(all.size() - 1);
      }
    }
    res.dims.push_back(int(span_dim(values)));
    if (next.empty()) {
      res.stabilized = true;
      break;
    }
    last = std::move(next);
  }
  return res;
}

std::vector<int> small_growth_vector(const DistributionSpec& d, const QVec& q, int depth) {
  return growth_analysis(d, q, depth).dims;
}

}  // namespace r2g
