#pragma once

#include <Eigen/Dense>
#include <optional>

#include "projrigid/curvature.hpp"
#include "projrigid/exprmat.hpp"
#include "projrigid/fields.hpp"
#include "projrigid/zero.hpp"

namespace projrigid {

/// (msize x msize) matrix of coordinate 1-forms over a chart: entry (A,B) is
/// sum_i coef(A,B,i) dx^i. Gauges built by normal_gauge are trace-free
/// representatives of their projective (center-quotient) class.
struct FormMatrix {
  Chart chart;
  int msize = 0;
  std::vector<Expr> c;  // msize^2 * chart.dim coefficients

  FormMatrix() = default;
  FormMatrix(const Chart& ch, int m);

  const Expr& coef(int A, int B, int i) const;
  Expr& coef(int A, int B, int i);

  /// One-form trace sum_A entry(A,A), as dim coefficients.
  std::vector<Expr> trace() const;
};

/// Matrix of coordinate 2-forms; coefficient of dx^k ^ dx^l for k < l is
/// coef(A,B,k,l), with the antisymmetric counterpart stored too.
struct TwoFormMatrix {
  Chart chart;
  int msize = 0;
  std::vector<Expr> c;  // msize^2 * dim^2

  TwoFormMatrix() = default;
  TwoFormMatrix(const Chart& ch, int m);

  const Expr& coef(int A, int B, int k, int l) const;
  Expr& coef(int A, int B, int k, int l);
};

/// Local gauge of the normal projective structure connection: gl-block from
/// the trace-adjusted connection forms, translation column (dx^0 .. dx^{n-1}),
/// bottom row from the Schouten tensor, corner -tr/(n+1).
FormMatrix normal_gauge(const ConnectionField& gamma);

/// Omega = d omega + 1/2 [omega, omega] (entrywise wedge products).
TwoFormMatrix gauge_curvature(const FormMatrix& omega);

/// Torsion-freeness: the translation column of the curvature vanishes.
ZeroResult check_torsion_free(const TwoFormMatrix& omega2, const Sampler& sampler);

struct NormalityReport {
  ZeroResult torsion;
  ZeroResult traces;
  std::string failing_trace;  // "j,k" label of the first failing gl-trace
  bool passed() const {
    return torsion.status != ZeroStatus::NonzeroWitness &&
           traces.status != ZeroStatus::NonzeroWitness;
  }
};

/// Torsion-freeness plus the gl-block trace condition
/// sum_i Omega^i_j(e_i, e_k) = 0.
NormalityReport check_normality_traces(const TwoFormMatrix& omega2, const Sampler& sampler);

/// Gauge change omega' = h^-1 dh + h^-1 omega h, re-normalized to the
/// trace-free center representative. `h` must match the structure-group
/// zero pattern (vanishing top-right column block).
FormMatrix gauge_transform(const FormMatrix& omega, const ExprMat& h);

/// Rewrite a gauge in another chart's coordinates: substitute the inverse
/// transition into the coefficients and transport the dx-basis.
FormMatrix transport_gauge(const FormMatrix& omega, const Transition& t, const Chart& target);

/// The structure-group element relating the normal gauges of two charts:
/// block diag(S, 1) with S the Jacobian of the target-to-source change,
/// expressed in target coordinates.
ExprMat transition_gauge_frame(const Transition& t, const Chart& source, const Chart& target);

/// Chart for the boundary slice {coords[0] = 0} of a boundary chart.
Chart boundary_slice_chart(const Chart& chart);

struct BoundaryPullback {
  FormMatrix gauge;        // on the boundary slice chart, still (n+1)x(n+1)
  ZeroResult membership;   // first-row-tail vanishing = hyperplane subalgebra
  std::string witness;     // offending entry, e.g. "omega^0_1|dy^1"
};

/// Pull a gauge back to the boundary: substitute coords[0] = 0, drop dx^0.
/// Membership in the hyperplane-stabilizer subalgebra holds iff the first
/// row past the corner restricts to zero.
BoundaryPullback boundary_pullback(const FormMatrix& omega, const Sampler& boundary_sampler);

/// Quotient a boundary gauge by the non-effectivity kernel: lower-right
/// n x n block minus its trace part; the gauge of the induced projective
/// structure one dimension down.
FormMatrix mod_k_project(const FormMatrix& boundary_gauge);

/// Restriction of the tangential connection components to the boundary.
/// Refuses (with the witness entry) when the obstruction components do not
/// vanish along the boundary.
ConnectionField induce_boundary_connection(const ConnectionField& gamma,
                                           const Sampler& boundary_sampler);

struct SchoutenComparison {
  Chart boundary_chart;
  std::vector<Expr> restricted;            // (n-1)^2, ambient Schouten restricted
  std::optional<std::vector<Expr>> induced;     // (n-1)^2, of the induced connection
  std::optional<std::vector<Expr>> difference;  // restricted - induced
};

/// Curvature-contraction comparison of the ambient Schouten tensor
/// restricted to the boundary against the Schouten tensor of the induced
/// boundary connection (needs n >= 3; n = 2 reports the restriction only).
SchoutenComparison schouten_compare(const ConnectionField& gamma,
                                    const Sampler& boundary_sampler);

// ---------------------------------------------------------------------------
// Second-order frame group (numeric)

/// Element (u^i_j, u^i_jk) of the group of 2-frames at the origin;
/// u invertible, u^i_jk symmetric in (j, k).
struct Jet2 {
  int n = 0;
  Eigen::MatrixXd u;
  std::vector<double> q;  // n^3, [i][j][k]

  Jet2() = default;
  explicit Jet2(int dim);
  double& quad(int i, int j, int k);
  double quad(int i, int j, int k) const;
};

Jet2 jet2_identity(int n);
Jet2 jet2_compose(const Jet2& a, const Jet2& b);
Jet2 jet2_inverse(const Jet2& a);

/// Max-abs difference between two elements (for group-law tests).
double jet2_distance(const Jet2& a, const Jet2& b);

/// Embedding (A, Upsilon) -> (A^i_j, -(A^i_j Ups_k + A^i_k Ups_j)) of the
/// projective isotropy group into the 2-frame group.
Jet2 h_embed(const Eigen::MatrixXd& A, const Eigen::VectorXd& upsilon);

// ---------------------------------------------------------------------------
// Subalgebra zero-pattern masks on (n+1)x(n+1) matrices, modulo the center.

enum class Subalgebra {
  StructureGroup,   // vanishing top-right column block
  HyperplaneStab,   // vanishing first-row tail
  BoundaryIsotropy, // first-row tail and tangential translation column
  Kernel            // first-row tail, scalar lower-right block
};

struct AlgebraMask {
  Subalgebra alg;
  int msize;  // n+1

  bool zero_required(int A, int B) const;
  bool scalar_block() const { return alg == Subalgebra::Kernel; }
  bool admits(const Eigen::MatrixXd& m, double tol) const;
  ZeroResult admits(const FormMatrix& m, const Sampler& sampler) const;
};

}  // namespace projrigid
