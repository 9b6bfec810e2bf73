#pragma once

#include <functional>
#include <vector>

#include "projrigid/expr.hpp"

namespace projrigid {

/// Dense matrix of symbolic expressions; small sizes only (n <= 5 in
/// practice), used for Jacobians, gauge matrices and frame algebra.
struct ExprMat {
  int rows = 0, cols = 0;
  std::vector<Expr> a;

  ExprMat() = default;
  ExprMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r * c)) {}

  Expr& at(int i, int j) { return a[static_cast<std::size_t>(i * cols + j)]; }
  const Expr& at(int i, int j) const { return a[static_cast<std::size_t>(i * cols + j)]; }

  static ExprMat identity(int n);
  ExprMat map_entries(const std::function<Expr(const Expr&)>& f) const;
};

ExprMat mat_mul(const ExprMat& x, const ExprMat& y);
ExprMat mat_add(const ExprMat& x, const ExprMat& y);
ExprMat mat_scale(const Expr& c, const ExprMat& x);
Expr mat_det(const ExprMat& x);

/// Inverse via adjugate over determinant; throws GeomError-compatible
/// ExprError if the determinant is provably zero.
ExprMat mat_inverse(const ExprMat& x);

ExprMat mat_simplify(const ExprMat& x);

}  // namespace projrigid
