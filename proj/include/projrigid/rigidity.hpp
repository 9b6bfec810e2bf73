#pragma once

#include <Eigen/Dense>
#include <optional>

#include "projrigid/fields.hpp"
#include "projrigid/zero.hpp"

namespace projrigid {

enum class Verdict { Rigid, NonrigidCandidate, Mixed, Undetermined };

const char* verdict_name(Verdict v);

/// Pointwise boundary obstruction: the tangential block Gamma^0_{mu nu}
/// evaluated on {coords[0] = 0}. Any entry above the tolerance certifies a
/// rigid boundary (one good point suffices); all-zero keeps the point a
/// non-rigidity candidate.
struct ObstructionResult {
  std::vector<Expr> symbolic;  // (n-1)^2 restricted entries, tangential coords
  Eigen::MatrixXd values;      // evaluated at the point
  Verdict verdict = Verdict::Undetermined;
  double max_abs = 0.0;
};

ObstructionResult boundary_obstruction(const ConnectionField& gamma,
                                       const std::vector<double>& point,
                                       const std::map<std::string, double>& params,
                                       double tol = 1e-9);

/// The linear system satisfied by the boundary 2-jet data (a, b, db) of a
/// boundary-fixing automorphism, assembled at one boundary point. Rows:
/// the obstruction contraction with b, the db-coupling row, and the
/// tangential derivative of the obstruction contraction (the row that closes
/// the argument when b is forced to zero).
struct JetSystem {
  int n = 0;                     // chart dimension
  Eigen::MatrixXd A;             // rows x (1 + m + m^2), m = n-1
  std::vector<std::string> row_labels;
  std::vector<double> gamma_at_p;       // n^3 Christoffel values at the point
  std::vector<double> dgamma_obstruction;  // m^3: d_sigma Gamma^0_{nu tau}

  int idx_a() const { return 0; }
  int idx_b(int mu) const { return 1 + mu; }
  int idx_db(int mu, int nu) const { return 1 + (n - 1) + mu * (n - 1) + nu; }
  int unknowns() const { return 1 + (n - 1) + (n - 1) * (n - 1); }
};

JetSystem jet_system_assemble(const ConnectionField& gamma, const std::vector<double>& point,
                              const std::map<std::string, double>& params);

struct JetElement {
  double a = 0;
  Eigen::VectorXd b;
  Eigen::MatrixXd db;
  Eigen::VectorXd c;        // back-substituted from the explicit quadratic row
  double upsilon0 = 0;      // a + Gamma^0_{0 mu} b^mu; tangential components vanish
};

struct JetSolution {
  std::vector<JetElement> basis;
  int dimension = 0;
  double max_residual = 0;   // full-system re-verification over the basis
  double sv_gap = 0;         // smallest kept / largest dropped singular value
  bool well_conditioned = true;
};

JetSolution solve_boundary_jets(const ConnectionField& gamma, const std::vector<double>& point,
                                const std::map<std::string, double>& params,
                                double tol = 1e-10);

class TaylorPreconditionError : public GeomError {
 public:
  TaylorPreconditionError(const std::string& what, double residual)
      : GeomError(what), residual(residual) {}
  double residual;
};

struct TaylorData {
  double a = 0;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  Eigen::MatrixXd db;  // tangential derivatives of b at the point
};

/// Second-order boundary Taylor data of a boundary-fixing self-map at a
/// boundary point: a = phi^0_rr/2, b = phi^mu_r, c = phi^mu_rr/2.
/// Preconditions (identity on the boundary nearby, unit normal derivative)
/// are sampled; violations throw TaylorPreconditionError with the residual.
TaylorData boundary_taylor(const MapField& map, const std::vector<double>& point,
                           const std::map<std::string, double>& params);

struct ScanPoint {
  std::string chart;
  std::vector<double> point;
  Verdict verdict = Verdict::Undetermined;
  double obstruction_max = 0;
  bool shift_agrees = true;
  bool chart_agrees = true;
};

struct ConnectionScan {
  std::string connection;
  std::string chart;
  Verdict verdict = Verdict::Undetermined;
  std::vector<ScanPoint> points;
};

struct RigidityReport {
  Verdict global = Verdict::Undetermined;
  std::vector<ConnectionScan> scans;
  bool cross_checks_consistent = true;
  std::string inconsistency;
};

struct ScanOptions {
  int boundary_points = 32;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  int shift_checks = 1;
  bool chart_checks = true;
};

/// Scan every boundary-chart connection of the scene: per-point verdicts,
/// re-tested after a random projective shift (the obstruction must be
/// unchanged entry by entry) and, where a boundary-to-boundary transition
/// exists, in the neighbouring chart (the verdict must agree). Cross-check
/// disagreements are reported as inconsistencies, never averaged away.
RigidityReport rigidity_scan(const Scene& scene, const ScanOptions& opt = {});

}  // namespace projrigid
