#include "rank2geo/linalg.hpp"

namespace r2g {

Echelon rref(QMat m) {
  Echelon e;
  if (m.empty()) return e;
  const size_t nc = m[0].size();
  size_t r = 0;
  for (size_t c = 0; c < nc && r < m.size(); ++c) {
    size_t p = r;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[r], m[p]);
    mpq_class inv = 1 / m[r][c];
    for (size_t j = c; j < nc; ++j) m[r][j] *= inv;
    for (size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c] == 0) continue;
      mpq_class f = m[i][c];
      for (size_t j = c; j < nc; ++j)
        if (m[r][j] != 0) m[i][j] -= f * m[r][j];
    }
    e.pivots.push_back(c);
    ++r;
  }
  m.resize(r);
  e.rows = std::move(m);
  return e;
}

size_t rank(const QMat& m) { return rref(m).pivots.size(); }

size_t span_dim(const std::vector<QVec>& vectors) { return rank(vectors); }

std::vector<QVec> span_basis(const std::vector<QVec>& vectors) { return rref(vectors).rows; }

bool span_contains(const std::vector<QVec>& span, const QVec& v) {
  std::vector<QVec> all = span;
  all.push_back(v);
  return span_dim(all) == span_dim(span);
}

bool same_span(const std::vector<QVec>& a, const std::vector<QVec>& b) {
  size_t da = span_dim(a), db = span_dim(b);
  if (da != db) return false;
  std::vector<QVec> all = a;
  all.insert(all.end(), b.begin(), b.end());
  return span_dim(all) == da;
}

std::vector<QVec> nullspace(const QMat& rows, size_t ncols) {
  Echelon e = rref(rows);
  std::vector<bool> is_piv(ncols, false);
  for (auto p : e.pivots) is_piv[p] = true;
  std::vector<QVec> out;
  for (size_t f = 0; f < ncols; ++f) {
    if (is_piv[f]) continue;
    QVec v(ncols, 0);
    v[f] = 1;
    for (size_t i = 0; i < e.pivots.size(); ++i) v[e.pivots[i]] = -e.rows[i][f];
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<QVec> intersect(const std::vector<QVec>& a, const std::vector<QVec>& b, size_t ncols) {
  // sum alpha_i a_i - sum beta_j b_j = 0, then map alpha back
  const std::vector<QVec> ba = span_basis(a), bb = span_basis(b);
  if (ba.empty() || bb.empty()) return {};
  const size_t k = ba.size() + bb.size();
  QMat rows(ncols, QVec(k));
  for (size_t c = 0; c < ncols; ++c) {
    for (size_t i = 0; i < ba.size(); ++i) rows[c][i] = ba[i][c];
    for (size_t j = 0; j < bb.size(); ++j) rows[c][ba.size() + j] = -bb[j][c];
  }
  std::vector<QVec> out;
  for (const auto& x : nullspace(rows, k)) {
    QVec v(ncols, 0);
    for (size_t i = 0; i < ba.size(); ++i)
      if (x[i] != 0)
        for (size_t c = 0; c < ncols; ++c) v[c] += x[i] * ba[i][c];
    out.push_back(std::move(v));
  }
  return span_basis(out);
}

std::optional<QVec> solve_combination(const std::vector<QVec>& basis, const QVec& target) {
  const size_t k = basis.size(), n = target.size();
  QMat m(n, QVec(k + 1));
  for (size_t c = 0; c < n; ++c) {
    for (size_t j = 0; j < k; ++j) m[c][j] = basis[j][c];
    m[c][k] = target[c];
  }
  Echelon e = rref(m);
  if (!e.pivots.empty() && e.pivots.back() == k) return std::nullopt;
  if (e.pivots.size() != k) return std::nullopt;
  QVec x(k);
  for (size_t i = 0; i < k; ++i) x[e.pivots[i]] = e.rows[i][k];
  return x;
}

QMat inverse(const QMat& a) {
  const size_t n = a.size();
  QMat m(n, QVec(2 * n, 0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) m[i][j] = a[i][j];
    m[i][n + i] = 1;
  }
  Echelon e = rref(m);
  if (e.pivots.size() < n || e.pivots[n - 1] != n - 1)
    throw Error(ErrorKind::Degenerate, "linalg", "matrix is singular");
  QMat inv(n, QVec(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) inv[i][j] = e.rows[i][n + j];
  return inv;
}

QVec mat_vec(const QMat& m, const QVec& v) {
  QVec r(m.size(), 0);
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < v.size(); ++j)
      if (m[i][j] != 0 && v[j] != 0) r[i] += m[i][j] * v[j];
  return r;
}

mpq_class dot(const QVec& a, const QVec& b) {
  mpq_class s = 0;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
  return s;
}

mpq_class bilinear(const QVec& v, const QMat& s, const QVec& w) { return dot(v, mat_vec(s, w)); }

Eigen::VectorXd to_eigen(const QVec& v) {
  Eigen::VectorXd r(v.size());
  for (size_t i = 0; i < v.size(); ++i) r[i] = v[i].get_d();
  return r;
}

Eigen::MatrixXd columns_to_eigen(const std::vector<QVec>& cols) {
  if (cols.empty()) return Eigen::MatrixXd();
  Eigen::MatrixXd m(cols[0].size(), cols.size());
  for (size_t j = 0; j < cols.size(); ++j) m.col(j) = to_eigen(cols[j]);
  return m;
}

double relative_residual(const Eigen::MatrixXd& cols, const Eigen::VectorXd& v) {
  double nv = v.norm();
  if (nv == 0) return 0;
  if (cols.cols() == 0) return 1;
  Eigen::VectorXd x = cols.colPivHouseholderQr().solve(v);
  return (cols * x - v).norm() / nv;
}

}  // namespace r2g
