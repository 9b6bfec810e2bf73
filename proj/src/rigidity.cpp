#include "projrigid/rigidity.hpp"

#include <random>

#include <Eigen/SVD>

#include "projrigid/geometry.hpp"

namespace projrigid {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Rigid: return "RIGID";
    case Verdict::NonrigidCandidate: return "NONRIGID_CANDIDATE";
    case Verdict::Mixed: return "MIXED";
    case Verdict::Undetermined: return "UNDETERMINED";
  }
  return "?";
}

namespace {

VarMap point_assignment(const Chart& chart, const std::vector<double>& point,
                        const std::map<std::string, double>& params) {
  VarMap m = chart.assignment(point);
  for (const auto& [k, v] : params) m.emplace(k, v);
  return m;
}

void require_boundary_point(const Chart& chart, const std::vector<double>& point) {
  if (!chart.boundary)
    throw GeomError("chart '" + chart.name + "' is not a boundary chart");
  if (point.size() != static_cast<std::size_t>(chart.dim))
    throw GeomError("point dimension mismatch");
  if (std::abs(point[0]) > 1e-12)
    throw GeomError("point is not on the boundary: " + chart.coord(0) + " = " +
                    std::to_string(point[0]));
}

}  // namespace

ObstructionResult boundary_obstruction(const ConnectionField& gamma,
                                       const std::vector<double>& point,
                                       const std::map<std::string, double>& params,
                                       double tol) {
  const Chart& chart = gamma.chart;
  require_boundary_point(chart, point);
  int n = chart.dim, m = n - 1;
  ObstructionResult out;
  out.values = Eigen::MatrixXd::Zero(m, m);
  std::map<std::string, Expr> sub{{chart.coord(0), Expr::number(0)}};
  VarMap at = point_assignment(chart, point, params);
  bool eval_ok = true;
  for (int mu = 1; mu < n; ++mu) {
    for (int nu = 1; nu < n; ++nu) {
      Expr e = simplify(substitute(gamma.gamma(0, mu, nu), sub));
      out.symbolic.push_back(e);
      try {
        double v = eval(e, at);
        out.values(mu - 1, nu - 1) = v;
        out.max_abs = std::max(out.max_abs, std::abs(v));
      } catch (const EvalError&) {
        eval_ok = false;
      }
    }
  }
  if (!eval_ok)
    out.verdict = Verdict::Undetermined;
  else
    out.verdict = out.max_abs > tol ? Verdict::Rigid : Verdict::NonrigidCandidate;
  return out;
}

JetSystem jet_system_assemble(const ConnectionField& gamma, const std::vector<double>& point,
                              const std::map<std::string, double>& params) {
  const Chart& chart = gamma.chart;
  require_boundary_point(chart, point);
  int n = chart.dim, m = n - 1;
  JetSystem sys;
  sys.n = n;
  VarMap at = point_assignment(chart, point, params);

  sys.gamma_at_p.resize(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        sys.gamma_at_p[static_cast<std::size_t>((i * n + j) * n + k)] =
            eval(gamma.gamma(i, j, k), at);
  auto G = [&](int i, int j, int k) {
    return sys.gamma_at_p[static_cast<std::size_t>((i * n + j) * n + k)];
  };

  sys.dgamma_obstruction.resize(static_cast<std::size_t>(m) * m * m);
  for (int nu = 1; nu < n; ++nu)
    for (int ta = 1; ta < n; ++ta)
      for (int sg = 1; sg < n; ++sg)
        sys.dgamma_obstruction[static_cast<std::size_t>(((nu - 1) * m + (ta - 1)) * m +
                                                        (sg - 1))] =
            eval(diff(gamma.gamma(0, nu, ta), chart.coord(sg)), at);
  auto dG0 = [&](int nu, int ta, int sg) {
    return sys.dgamma_obstruction[static_cast<std::size_t>(((nu - 1) * m + (ta - 1)) * m +
                                                           (sg - 1))];
  };

  std::vector<Eigen::VectorXd> rows;
  std::vector<std::string> labels;
  int cols = sys.unknowns();

  // obstruction contraction: b^mu Gamma^0_{nu tau} = 0
  for (int mu = 0; mu < m; ++mu)
    for (int nu = 1; nu < n; ++nu)
      for (int ta = nu; ta < n; ++ta) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(cols);
        row(sys.idx_b(mu)) = G(0, nu, ta);
        if (!row.isZero(0.0)) {
          rows.push_back(row);
          labels.push_back("obstruction b^" + std::to_string(mu + 1) + " G0_" +
                           std::to_string(nu) + std::to_string(ta));
        }
      }

  // db coupling: d_nu b^mu - b^mu G^0_{nu 0} + G^mu_{nu tau} b^tau
  //              = delta^mu_nu (a + G^0_{0 sigma} b^sigma)
  for (int mu = 1; mu < n; ++mu)
    for (int nu = 1; nu < n; ++nu) {
      Eigen::VectorXd row = Eigen::VectorXd::Zero(cols);
      row(sys.idx_db(mu - 1, nu - 1)) += 1.0;
      row(sys.idx_b(mu - 1)) += -G(0, nu, 0);
      for (int ta = 1; ta < n; ++ta) row(sys.idx_b(ta - 1)) += G(mu, nu, ta);
      if (mu == nu) {
        row(sys.idx_a()) -= 1.0;
        for (int sg = 1; sg < n; ++sg) row(sys.idx_b(sg - 1)) -= G(0, 0, sg);
      }
      rows.push_back(row);
      labels.push_back("jet db^" + std::to_string(mu) + "_" + std::to_string(nu));
    }

  // tangential derivative of the obstruction contraction:
  // d_sigma b^mu G^0_{nu tau} + b^mu d_sigma G^0_{nu tau} = 0
  for (int mu = 1; mu < n; ++mu)
    for (int nu = 1; nu < n; ++nu)
      for (int ta = nu; ta < n; ++ta)
        for (int sg = 1; sg < n; ++sg) {
          Eigen::VectorXd row = Eigen::VectorXd::Zero(cols);
          row(sys.idx_db(mu - 1, sg - 1)) += G(0, nu, ta);
          row(sys.idx_b(mu - 1)) += dG0(nu, ta, sg);
          if (!row.isZero(0.0)) {
            rows.push_back(row);
            labels.push_back("derived obstruction d_" + std::to_string(sg) + " [b^" +
                             std::to_string(mu) + " G0_" + std::to_string(nu) +
                             std::to_string(ta) + "]");
          }
        }

  sys.A.resize(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) sys.A.row(static_cast<Eigen::Index>(r)) = rows[r];
  sys.row_labels = std::move(labels);
  return sys;
}

namespace {

// residual of the full jet equations for one candidate element
double verify_jet_element(const JetSystem& sys, const JetElement& el) {
  int n = sys.n, m = n - 1;
  auto G = [&](int i, int j, int k) {
    return sys.gamma_at_p[static_cast<std::size_t>((i * n + j) * n + k)];
  };
  double worst = 0.0;
  auto track = [&worst](double v) { worst = std::max(worst, std::abs(v)); };

  // b^mu G^0_{nu tau} = 0
  for (int mu = 0; mu < m; ++mu)
    for (int nu = 1; nu < n; ++nu)
      for (int ta = 1; ta < n; ++ta) track(el.b(mu) * G(0, nu, ta));

  // raw coupling row with its quadratic term and the trace form of the
  // normal-component 1-form value
  double trdb = el.db.trace();
  double gib = 0;  // G^i_{i nu} b^nu
  for (int i = 0; i < n; ++i)
    for (int nu = 1; nu < n; ++nu) gib += G(i, i, nu) * el.b(nu - 1);
  double ups0_trace = (2 * el.a + trdb + gib) / (n + 1);
  track(ups0_trace - el.upsilon0);
  for (int mu = 1; mu < n; ++mu)
    for (int nu = 1; nu < n; ++nu) {
      double v = el.db(mu - 1, nu - 1) - el.b(mu - 1) * G(0, nu, 0);
      for (int ta = 1; ta < n; ++ta)
        v += -el.b(mu - 1) * G(0, nu, ta) * el.b(ta - 1) + G(mu, nu, ta) * el.b(ta - 1);
      if (mu == nu) v -= ups0_trace;
      track(v);
    }

  // explicit c row
  for (int mu = 1; mu < n; ++mu) {
    double v = -2 * el.b(mu - 1) * el.a + 2 * el.c(mu - 1) - el.b(mu - 1) * G(0, 0, 0);
    for (int ta = 1; ta < n; ++ta) {
      v += -el.b(mu - 1) * G(0, 0, ta) * el.b(ta - 1);
      v += -el.b(mu - 1) * G(0, ta, 0) * el.b(ta - 1);
      v += G(mu, 0, ta) * el.b(ta - 1);
      v += G(mu, ta, 0) * el.b(ta - 1);
      for (int sg = 1; sg < n; ++sg) v += G(mu, sg, ta) * el.b(sg - 1) * el.b(ta - 1);
    }
    track(v);
  }
  return worst;
}

}  // namespace

JetSolution solve_boundary_jets(const ConnectionField& gamma, const std::vector<double>& point,
                                const std::map<std::string, double>& params, double tol) {
  JetSystem sys = jet_system_assemble(gamma, point, params);
  int n = sys.n, m = n - 1;
  int cols = sys.unknowns();
  JetSolution out;

  Eigen::MatrixXd null_basis;
  if (sys.A.rows() == 0) {
    null_basis = Eigen::MatrixXd::Identity(cols, cols);
    out.sv_gap = std::numeric_limits<double>::infinity();
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    double cutoff = std::max(tol, 1e-13 * std::max(1.0, smax));
    int rank = 0;
    double smallest_kept = 0, largest_dropped = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > cutoff) {
        ++rank;
        smallest_kept = sv(i);
      } else {
        largest_dropped = std::max(largest_dropped, sv(i));
      }
    }
    out.sv_gap = largest_dropped > 0 ? smallest_kept / largest_dropped
                                     : std::numeric_limits<double>::infinity();
    out.well_conditioned = out.sv_gap > 1e3;
    null_basis = svd.matrixV().rightCols(cols - rank);
  }

  auto G = [&](int i, int j, int k) {
    return sys.gamma_at_p[static_cast<std::size_t>((i * n + j) * n + k)];
  };
  for (Eigen::Index col = 0; col < null_basis.cols(); ++col) {
    Eigen::VectorXd w = null_basis.col(col);
    JetElement el;
    el.a = w(sys.idx_a());
    el.b = Eigen::VectorXd::Zero(m);
    el.db = Eigen::MatrixXd::Zero(m, m);
    for (int mu = 0; mu < m; ++mu) {
      el.b(mu) = w(sys.idx_b(mu));
      for (int nu = 0; nu < m; ++nu) el.db(mu, nu) = w(sys.idx_db(mu, nu));
    }
    el.c = Eigen::VectorXd::Zero(m);
    for (int mu = 1; mu < n; ++mu) {
      double v = 2 * el.b(mu - 1) * el.a + el.b(mu - 1) * G(0, 0, 0);
      for (int ta = 1; ta < n; ++ta) {
        v += el.b(mu - 1) * G(0, 0, ta) * el.b(ta - 1);
        v += el.b(mu - 1) * G(0, ta, 0) * el.b(ta - 1);
        v -= G(mu, 0, ta) * el.b(ta - 1);
        v -= G(mu, ta, 0) * el.b(ta - 1);
        for (int sg = 1; sg < n; ++sg) v -= G(mu, sg, ta) * el.b(sg - 1) * el.b(ta - 1);
      }
      el.c(mu - 1) = v / 2;
    }
    el.upsilon0 = el.a;
    for (int mu = 1; mu < n; ++mu) el.upsilon0 += G(0, 0, mu) * el.b(mu - 1);
    out.max_residual = std::max(out.max_residual, verify_jet_element(sys, el));
    out.basis.push_back(std::move(el));
  }
  out.dimension = static_cast<int>(out.basis.size());
  return out;
}

TaylorData boundary_taylor(const MapField& map, const std::vector<double>& point,
                           const std::map<std::string, double>& params) {
  const Chart& chart = map.source;
  if (map.source.name != map.target.name)
    throw GeomError("boundary Taylor data needs a self-map of one chart");
  require_boundary_point(chart, point);
  int n = chart.dim, m = n - 1;

  // boundary-identity precondition, sampled on the boundary slice
  SamplerOptions so;
  so.samples = 16;
  Sampler bs = boundary_sampler(chart, params, so);
  double residual = 0.0;
  for (const VarMap& p : bs.points()) {
    try {
      residual = std::max(residual, std::abs(eval(map.component(0), p)));
      for (int mu = 1; mu < n; ++mu)
        residual = std::max(
            residual, std::abs(eval(map.component(mu), p) - p.at(chart.coord(mu))));
    } catch (const EvalError&) {
      continue;
    }
  }
  if (residual > 1e-10)
    throw TaylorPreconditionError(
        "map does not restrict to the identity on the boundary (residual " +
            std::to_string(residual) + ")",
        residual);

  VarMap at = point_assignment(chart, point, params);
  double dr = eval(map.jacobian(0, 0), at);
  if (std::abs(dr - 1.0) > 1e-10)
    throw TaylorPreconditionError(
        "normal derivative is " + std::to_string(dr) +
            "; rescale the boundary-defining coordinate by 1/" + std::to_string(dr),
        std::abs(dr - 1.0));

  TaylorData out;
  out.a = eval(map.hessian(0, 0, 0), at) / 2;
  out.b = Eigen::VectorXd::Zero(m);
  out.c = Eigen::VectorXd::Zero(m);
  out.db = Eigen::MatrixXd::Zero(m, m);
  for (int mu = 1; mu < n; ++mu) {
    out.b(mu - 1) = eval(map.jacobian(mu, 0), at);
    out.c(mu - 1) = eval(map.hessian(mu, 0, 0), at) / 2;
    for (int nu = 1; nu < n; ++nu)
      out.db(mu - 1, nu - 1) = eval(map.hessian(mu, 0, nu), at);
  }
  return out;
}

namespace {

// small random polynomial 1-forms for the projective-invariance re-test
OneFormField random_one_form(const Chart& chart, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0xabcd1234u);
  auto coeff = [&rng]() {
    long long num = static_cast<long long>(rng() % 7) - 3;
    return Expr::number(num, 1 + static_cast<long long>(rng() % 3));
  };
  OneFormField u(chart);
  for (int i = 0; i < chart.dim; ++i) {
    std::vector<Expr> terms{coeff()};
    for (int j = 0; j < chart.dim; ++j)
      terms.push_back(Expr::mul({coeff(), Expr::var(chart.coord(j))}));
    u.comp[static_cast<std::size_t>(i)] = simplify(Expr::add(std::move(terms)));
  }
  return u;
}

// Undetermined dominates; otherwise disagreement (or any Mixed) is Mixed.
Verdict combine_verdicts(const std::vector<Verdict>& vs) {
  if (vs.empty()) return Verdict::Undetermined;
  bool any_rigid = false, any_candidate = false, any_undet = false, any_mixed = false;
  for (Verdict v : vs) {
    any_rigid |= v == Verdict::Rigid;
    any_candidate |= v == Verdict::NonrigidCandidate;
    any_undet |= v == Verdict::Undetermined;
    any_mixed |= v == Verdict::Mixed;
  }
  if (any_undet) return Verdict::Undetermined;
  if (any_mixed || (any_rigid && any_candidate)) return Verdict::Mixed;
  return any_rigid ? Verdict::Rigid : Verdict::NonrigidCandidate;
}

}  // namespace

RigidityReport rigidity_scan(const Scene& scene, const ScanOptions& opt) {
  RigidityReport report;
  std::vector<Verdict> scan_verdicts;

  for (const auto& [name, gamma] : scene.connections) {
    const Chart* chart = scene.find_chart(gamma.chart.name);
    if (!chart || !chart->boundary) continue;
    ConnectionScan scan;
    scan.connection = name;
    scan.chart = chart->name;

    std::vector<ConnectionField> shifted;
    for (int s = 0; s < opt.shift_checks; ++s)
      shifted.push_back(projective_shift(
          gamma, random_one_form(*chart, opt.seed + static_cast<std::uint64_t>(s))));

    // neighbouring boundary charts reachable by one transition
    std::vector<std::pair<const Transition*, ConnectionField>> neighbours;
    if (opt.chart_checks) {
      for (const Transition& t : chart->transitions) {
        const Chart* target = scene.find_chart(t.target);
        if (!target || !target->boundary) continue;
        neighbours.emplace_back(&t, christoffel_transform(gamma, t, *target));
      }
    }

    std::vector<Verdict> point_verdicts;
    for (const std::vector<double>& p : boundary_grid(*chart, opt.boundary_points)) {
      ScanPoint sp;
      sp.chart = chart->name;
      sp.point = p;
      ObstructionResult ob = boundary_obstruction(gamma, p, scene.params, opt.tol);
      sp.verdict = ob.verdict;
      sp.obstruction_max = ob.max_abs;

      for (const ConnectionField& sc : shifted) {
        ObstructionResult ob2 = boundary_obstruction(sc, p, scene.params, opt.tol);
        double delta = (ob2.values - ob.values).cwiseAbs().maxCoeff();
        if (delta > 1e-9) {
          sp.shift_agrees = false;
          report.cross_checks_consistent = false;
          report.inconsistency = "obstruction changed under a projective shift at a point of '" +
                                 chart->name + "' (delta " + std::to_string(delta) + ")";
        }
      }

      VarMap at = point_assignment(*chart, p, scene.params);
      for (const auto& [t, transformed] : neighbours) {
        std::vector<double> q(static_cast<std::size_t>(chart->dim));
        bool ok = true;
        try {
          for (int i = 0; i < chart->dim; ++i)
            q[static_cast<std::size_t>(i)] = eval(t->forward[static_cast<std::size_t>(i)], at);
        } catch (const EvalError&) {
          ok = false;
        }
        if (!ok) continue;
        if (std::abs(q[0]) < 1e-12) q[0] = 0.0;
        ObstructionResult ob2 = boundary_obstruction(transformed, q, scene.params, opt.tol);
        if (ob2.verdict != sp.verdict) {
          sp.chart_agrees = false;
          report.cross_checks_consistent = false;
          report.inconsistency = "verdict differs between charts '" + chart->name + "' and '" +
                                 t->target + "'";
        }
      }

      point_verdicts.push_back(sp.verdict);
      scan.points.push_back(std::move(sp));
    }

    scan.verdict = combine_verdicts(point_verdicts);
    scan_verdicts.push_back(scan.verdict);
    report.scans.push_back(std::move(scan));
  }

  if (report.scans.empty())
    throw GeomError("scene has no connection on a boundary chart to scan");
  report.global = combine_verdicts(scan_verdicts);
  return report;
}

}  // namespace projrigid
