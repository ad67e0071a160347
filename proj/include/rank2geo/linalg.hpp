#pragma once

#include <Eigen/Dense>
#include <gmpxx.h>

#include <optional>
#include <vector>

#include "rank2geo/symca.hpp"

namespace r2g {

using QVec = std::vector<mpq_class>;
using QMat = std::vector<QVec>;  // row-major

// Reduced row echelon form; pivots are column indices.
struct Echelon {
  QMat rows;
  std::vector<size_t> pivots;
};

Echelon rref(QMat m);
size_t rank(const QMat& m);

// Vectors are treated as the spanning set of a subspace.
size_t span_dim(const std::vector<QVec>& vectors);
// Reduced echelon basis of the span, pivot order = coordinate order.
std::vector<QVec> span_basis(const std::vector<QVec>& vectors);
bool span_contains(const std::vector<QVec>& span, const QVec& v);
bool same_span(const std::vector<QVec>& a, const std::vector<QVec>& b);
// Vectors x with r . x = 0 for every row r.
std::vector<QVec> nullspace(const QMat& rows, size_t ncols);
std::vector<QVec> intersect(const std::vector<QVec>& a, const std::vector<QVec>& b, size_t ncols);
// Coefficients c with sum c_i basis_i = target, if any.
std::optional<QVec> solve_combination(const std::vector<QVec>& basis, const QVec& target);
QMat inverse(const QMat& m);  // throws Degenerate if singular

QVec mat_vec(const QMat& m, const QVec& v);
mpq_class dot(const QVec& a, const QVec& b);
mpq_class bilinear(const QVec& v, const QMat& s, const QVec& w);  // v^T S w

Eigen::VectorXd to_eigen(const QVec& v);
Eigen::MatrixXd columns_to_eigen(const std::vector<QVec>& cols);

// Distance of v to span(cols) divided by |v| (0 when v = 0).
double relative_residual(const Eigen::MatrixXd& cols, const Eigen::VectorXd& v);

// ---- elimination over a symbolic field (RationalExpr or SurdExpr)

template <class T>
size_t pick_pivot(const std::vector<std::vector<T>>& m, size_t from, size_t col) {
  size_t best = m.size();
  size_t best_size = 0;
  for (size_t r = from; r < m.size(); ++r) {
    if (is_zero(m[r][col])) continue;
    size_t s = expr_size(m[r][col]);
    if (best == m.size() || s < best_size) best = r, best_size = s;
  }
  return best;
}

// Gauss-Jordan on an augmented matrix with `ncols` coefficient columns.
// Returns the pivot columns; rows beyond the rank hold the consistency residue.
template <class T>
std::vector<size_t> gauss_jordan(std::vector<std::vector<T>>& m, size_t ncols) {
  std::vector<size_t> pivots;
  size_t r = 0;
  for (size_t col = 0; col < ncols && r < m.size(); ++col) {
    size_t p = pick_pivot(m, r, col);
    if (p == m.size()) continue;
    std::swap(m[r], m[p]);
    T inv = T(1) / m[r][col];
    for (size_t j = 0; j < m[r].size(); ++j)
      if (!is_zero(m[r][j])) m[r][j] *= inv;
    for (size_t i = 0; i < m.size(); ++i) {
      if (i == r || is_zero(m[i][col])) continue;
      T f = m[i][col];
      for (size_t j = 0; j < m[i].size(); ++j)
        if (!is_zero(m[r][j])) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(col);
    ++r;
  }
  return pivots;
}

// Coefficients of target in the given basis; nullopt when target is outside
// the span or the basis is dependent.
template <class T>
std::optional<std::vector<T>> solve_in_basis(const std::vector<std::vector<T>>& basis, const std::vector<T>& target) {
  const size_t k = basis.size(), n = target.size();
  std::vector<std::vector<T>> m;
  for (size_t c = 0; c < n; ++c) {
    std::vector<T> row(k + 1);
    bool any = false;
    for (size_t j = 0; j < k; ++j) {
      row[j] = basis[j][c];
      any = any || !is_zero(row[j]);
    }
    row[k] = target[c];
    if (!any && is_zero(row[k])) continue;
    m.push_back(std::move(row));
  }
  auto piv = gauss_jordan(m, k);
  if (piv.size() != k) return std::nullopt;
  for (size_t i = k; i < m.size(); ++i)
    if (!is_zero(m[i][k])) return std::nullopt;
  std::vector<T> out(k);
  for (size_t i = 0; i < k; ++i) out[piv[i]] = m[i][k];
  return out;
}

template <class T>
std::vector<std::vector<T>> symbolic_nullspace(std::vector<std::vector<T>> rows, size_t ncols) {
  auto piv = gauss_jordan(rows, ncols);
  std::vector<bool> is_piv(ncols, false);
  for (auto p : piv) is_piv[p] = true;
  std::vector<std::vector<T>> out;
  for (size_t f = 0; f < ncols; ++f) {
    if (is_piv[f]) continue;
    std::vector<T> v(ncols);
    v[f] = T(1);
    for (size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -rows[i][f];
    out.push_back(std::move(v));
  }
  return out;
}

template <class T>
std::optional<std::vector<std::vector<T>>> symbolic_inverse(const std::vector<std::vector<T>>& a) {
  const size_t n = a.size();
  std::vector<std::vector<T>> m(n);
  for (size_t i = 0; i < n; ++i) {
    m[i] = a[i];
    m[i].resize(2 * n);
    m[i][n + i] = T(1);
  }
  auto piv = gauss_jordan(m, n);
  if (piv.size() != n) return std::nullopt;
  std::vector<std::vector<T>> inv(n, std::vector<T>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) inv[piv[i]][j] = m[i][n + j];
  return inv;
}

}  // namespace r2g
