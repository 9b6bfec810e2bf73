#include "projrigid/exprmat.hpp"

#include <functional>

namespace projrigid {

ExprMat ExprMat::identity(int n) {
  ExprMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.at(i, j) = Expr::number(i == j ? 1 : 0);
  return m;
}

ExprMat ExprMat::map_entries(const std::function<Expr(const Expr&)>& f) const {
  ExprMat out(rows, cols);
  for (std::size_t i = 0; i < a.size(); ++i) out.a[i] = f(a[i]);
  return out;
}

ExprMat mat_mul(const ExprMat& x, const ExprMat& y) {
  if (x.cols != y.rows) throw ExprError("matrix shape mismatch in multiply");
  ExprMat out(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i) {
    for (int j = 0; j < y.cols; ++j) {
      std::vector<Expr> terms;
      for (int k = 0; k < x.cols; ++k) terms.push_back(x.at(i, k) * y.at(k, j));
      out.at(i, j) = simplify(Expr::add(std::move(terms)));
    }
  }
  return out;
}

ExprMat mat_add(const ExprMat& x, const ExprMat& y) {
  if (x.rows != y.rows || x.cols != y.cols) throw ExprError("matrix shape mismatch in add");
  ExprMat out(x.rows, x.cols);
  for (std::size_t i = 0; i < x.a.size(); ++i) out.a[i] = simplify(x.a[i] + y.a[i]);
  return out;
}

ExprMat mat_scale(const Expr& c, const ExprMat& x) {
  ExprMat out(x.rows, x.cols);
  for (std::size_t i = 0; i < x.a.size(); ++i) out.a[i] = simplify(c * x.a[i]);
  return out;
}

namespace {

Expr det_rec(const ExprMat& m, std::vector<int>& cols, int row) {
  if (row == m.rows) return Expr::number(1);
  std::vector<Expr> terms;
  int sign = 1;
  for (std::size_t ci = 0; ci < cols.size(); ++ci) {
    int c = cols[ci];
    const Expr& entry = m.at(row, c);
    if (!entry.is_zero_literal()) {
      std::vector<int> rest;
      for (std::size_t cj = 0; cj < cols.size(); ++cj)
        if (cj != ci) rest.push_back(cols[cj]);
      Expr sub = det_rec(m, rest, row + 1);
      terms.push_back(Expr::number(sign) * entry * sub);
    }
    sign = -sign;
  }
  return Expr::add(std::move(terms));
}

}  // namespace

Expr mat_det(const ExprMat& m) {
  if (m.rows != m.cols) throw ExprError("determinant of a non-square matrix");
  std::vector<int> cols;
  for (int i = 0; i < m.cols; ++i) cols.push_back(i);
  return simplify(det_rec(m, cols, 0));
}

ExprMat mat_inverse(const ExprMat& m) {
  if (m.rows != m.cols) throw ExprError("inverse of a non-square matrix");
  int n = m.rows;
  Expr d = mat_det(m);
  if (d.is_zero_literal()) throw ExprError("matrix is symbolically singular");
  ExprMat inv(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // cofactor C_ji / det
      ExprMat minor(n - 1, n - 1);
      int mr = 0;
      for (int r = 0; r < n; ++r) {
        if (r == j) continue;
        int mc = 0;
        for (int c = 0; c < n; ++c) {
          if (c == i) continue;
          minor.at(mr, mc) = m.at(r, c);
          ++mc;
        }
        ++mr;
      }
      Expr cof = (n == 1) ? Expr::number(1) : mat_det(minor);
      int sign = ((i + j) % 2 == 0) ? 1 : -1;
      inv.at(i, j) = simplify(Expr::number(sign) * cof / d);
    }
  }
  return inv;
}

ExprMat mat_simplify(const ExprMat& x) {
  return x.map_entries([](const Expr& e) { return simplify(e); });
}

}  // namespace projrigid
