#pragma once

#include "projrigid/fields.hpp"

namespace projrigid {

/// Curvature of a torsion-free connection:
///   R^i_jkl = d_k Gamma^i_lj - d_l Gamma^i_kj
///           + Gamma^i_km Gamma^m_lj - Gamma^i_lm Gamma^m_kj,
/// antisymmetric in (k, l), together with the Ricci contraction
///   Ric_ab = sum_c R^c_bca.
/// The slot order is pinned by the projective change law of the Schouten
/// tensor (see schouten_shift_residual); the test suite enforces it.
struct CurvatureField {
  Chart chart;
  std::vector<Expr> riem;  // dim^4, [i][j][k][l]
  std::vector<Expr> ric;   // dim^2, [a][b]

  const Expr& r(int i, int j, int k, int l) const;
  const Expr& ricci(int a, int b) const;
};

CurvatureField riemann(const ConnectionField& gamma);

/// Ricci contraction of an already-computed curvature (dim^2 entries).
std::vector<Expr> ricci(const CurvatureField& rm);

struct SchoutenField {
  Chart chart;
  std::vector<Expr> p;  // dim^2, [a][b]
  const Expr& at(int a, int b) const;
};

/// Projective Schouten tensor: (n-1) P_ab = Ric_ab - 2/(n+1) Ric_[ab].
SchoutenField schouten(const ConnectionField& gamma);

/// Residual of the projective change law
///   P(shift(Gamma, U)) - (P(Gamma) - grad U + U (x) U),
/// where grad is the covariant derivative of the base connection. Vanishes
/// identically; certifies the curvature sign conventions.
std::vector<Expr> schouten_shift_residual(const ConnectionField& gamma,
                                          const OneFormField& upsilon);

}  // namespace projrigid
