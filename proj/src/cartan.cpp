#include "projrigid/cartan.hpp"

#include <Eigen/LU>

namespace projrigid {

FormMatrix::FormMatrix(const Chart& ch, int m)
    : chart(ch), msize(m), c(static_cast<std::size_t>(m) * m * ch.dim, Expr::number(0)) {}

const Expr& FormMatrix::coef(int A, int B, int i) const {
  return c[static_cast<std::size_t>((A * msize + B) * chart.dim + i)];
}

Expr& FormMatrix::coef(int A, int B, int i) {
  return c[static_cast<std::size_t>((A * msize + B) * chart.dim + i)];
}

std::vector<Expr> FormMatrix::trace() const {
  std::vector<Expr> tr(static_cast<std::size_t>(chart.dim), Expr::number(0));
  for (int i = 0; i < chart.dim; ++i) {
    std::vector<Expr> terms;
    for (int A = 0; A < msize; ++A) terms.push_back(coef(A, A, i));
    tr[static_cast<std::size_t>(i)] = simplify(Expr::add(std::move(terms)));
  }
  return tr;
}

TwoFormMatrix::TwoFormMatrix(const Chart& ch, int m)
    : chart(ch), msize(m),
      c(static_cast<std::size_t>(m) * m * ch.dim * ch.dim, Expr::number(0)) {}

const Expr& TwoFormMatrix::coef(int A, int B, int k, int l) const {
  int n = chart.dim;
  return c[static_cast<std::size_t>(((A * msize + B) * n + k) * n + l)];
}

Expr& TwoFormMatrix::coef(int A, int B, int k, int l) {
  int n = chart.dim;
  return c[static_cast<std::size_t>(((A * msize + B) * n + k) * n + l)];
}

FormMatrix normal_gauge(const ConnectionField& gamma) {
  const Chart& chart = gamma.chart;
  int n = chart.dim;
  FormMatrix w(chart, n + 1);

  std::vector<Expr> tr(static_cast<std::size_t>(n));  // alpha^l_l = Gamma^l_lk dx^k
  for (int k = 0; k < n; ++k) {
    std::vector<Expr> terms;
    for (int l = 0; l < n; ++l) terms.push_back(gamma.gamma(l, l, k));
    tr[static_cast<std::size_t>(k)] = simplify(Expr::add(std::move(terms)));
  }
  SchoutenField P = schouten(gamma);

  for (int A = 0; A < n; ++A) {
    for (int B = 0; B < n; ++B) {
      for (int k = 0; k < n; ++k) {
        Expr e = gamma.gamma(A, B, k);
        if (A == B) e = e - tr[static_cast<std::size_t>(k)] / (n + 1);
        w.coef(A, B, k) = simplify(e);
      }
    }
    w.coef(A, n, A) = Expr::number(1);  // translation column: dx^A
  }
  for (int B = 0; B < n; ++B)
    for (int i = 0; i < n; ++i) w.coef(n, B, i) = simplify(Expr::number(-1) * P.at(i, B));
  for (int i = 0; i < n; ++i)
    w.coef(n, n, i) = simplify(Expr::number(-1) * tr[static_cast<std::size_t>(i)] / (n + 1));
  return w;
}

TwoFormMatrix gauge_curvature(const FormMatrix& w) {
  const Chart& chart = w.chart;
  int n = chart.dim, m = w.msize;
  TwoFormMatrix out(chart, m);
  for (int A = 0; A < m; ++A) {
    for (int B = 0; B < m; ++B) {
      for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
          std::vector<Expr> terms;
          terms.push_back(diff(w.coef(A, B, l), chart.coord(k)));
          terms.push_back(Expr::number(-1) * diff(w.coef(A, B, k), chart.coord(l)));
          for (int C = 0; C < m; ++C) {
            const Expr &ack = w.coef(A, C, k), &acl = w.coef(A, C, l);
            const Expr &cbk = w.coef(C, B, k), &cbl = w.coef(C, B, l);
            if (!ack.is_zero_literal() && !cbl.is_zero_literal()) terms.push_back(ack * cbl);
            if (!acl.is_zero_literal() && !cbk.is_zero_literal())
              terms.push_back(Expr::number(-1) * acl * cbk);
          }
          Expr e = simplify(Expr::add(std::move(terms)));
          out.coef(A, B, k, l) = e;
          out.coef(A, B, l, k) = simplify(Expr::number(-1) * e);
        }
      }
    }
  }
  return out;
}

ZeroResult check_torsion_free(const TwoFormMatrix& w2, const Sampler& sampler) {
  int n = w2.chart.dim, m = w2.msize;
  std::vector<Expr> entries;
  for (int A = 0; A < m - 1; ++A)
    for (int k = 0; k < n; ++k)
      for (int l = k + 1; l < n; ++l) entries.push_back(w2.coef(A, m - 1, k, l));
  return is_zero_all(entries, sampler);
}

NormalityReport check_normality_traces(const TwoFormMatrix& w2, const Sampler& sampler) {
  NormalityReport rep;
  rep.torsion = check_torsion_free(w2, sampler);
  int n = w2.chart.dim;
  ZeroResult agg;
  agg.status = ZeroStatus::ProvablyZero;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      std::vector<Expr> terms;
      for (int i = 0; i < n; ++i) terms.push_back(w2.coef(i, j, i, k));
      ZeroResult r = is_zero(simplify(Expr::add(std::move(terms))), sampler);
      agg.max_abs = std::max(agg.max_abs, r.max_abs);
      if (r.status == ZeroStatus::NonzeroWitness) {
        agg = r;
        rep.failing_trace = std::to_string(j) + "," + std::to_string(k);
        rep.traces = agg;
        return rep;
      }
      if (r.status == ZeroStatus::Undetermined && agg.status == ZeroStatus::ProvablyZero)
        agg.status = ZeroStatus::Undetermined;
    }
  }
  rep.traces = agg;
  return rep;
}

namespace {

FormMatrix form_mat_mul(const ExprMat& x, const FormMatrix& w) {
  FormMatrix out(w.chart, w.msize);
  for (int A = 0; A < w.msize; ++A)
    for (int B = 0; B < w.msize; ++B)
      for (int i = 0; i < w.chart.dim; ++i) {
        std::vector<Expr> terms;
        for (int C = 0; C < w.msize; ++C) terms.push_back(x.at(A, C) * w.coef(C, B, i));
        out.coef(A, B, i) = simplify(Expr::add(std::move(terms)));
      }
  return out;
}

FormMatrix form_mat_mul(const FormMatrix& w, const ExprMat& x) {
  FormMatrix out(w.chart, w.msize);
  for (int A = 0; A < w.msize; ++A)
    for (int B = 0; B < w.msize; ++B)
      for (int i = 0; i < w.chart.dim; ++i) {
        std::vector<Expr> terms;
        for (int C = 0; C < w.msize; ++C) terms.push_back(w.coef(A, C, i) * x.at(C, B));
        out.coef(A, B, i) = simplify(Expr::add(std::move(terms)));
      }
  return out;
}

void trace_normalize(FormMatrix& w) {
  std::vector<Expr> tr = w.trace();
  for (int A = 0; A < w.msize; ++A)
    for (int i = 0; i < w.chart.dim; ++i)
      w.coef(A, A, i) =
          simplify(w.coef(A, A, i) - tr[static_cast<std::size_t>(i)] / w.msize);
}

}  // namespace

FormMatrix gauge_transform(const FormMatrix& w, const ExprMat& h) {
  int m = w.msize;
  if (h.rows != m || h.cols != m) throw GeomError("gauge change has the wrong shape");
  for (int i = 0; i < m - 1; ++i)
    if (!proves_zero(h.at(i, m - 1)))
      throw GeomError("gauge change is outside the structure-group pattern (entry " +
                      std::to_string(i) + "," + std::to_string(m - 1) + ")");
  ExprMat hinv = mat_inverse(h);

  FormMatrix dh(w.chart, m);
  for (int A = 0; A < m; ++A)
    for (int B = 0; B < m; ++B)
      for (int i = 0; i < w.chart.dim; ++i)
        dh.coef(A, B, i) = diff(h.at(A, B), w.chart.coord(i));

  FormMatrix out = form_mat_mul(hinv, dh);
  FormMatrix conj = form_mat_mul(hinv, form_mat_mul(w, h));
  for (std::size_t i = 0; i < out.c.size(); ++i) out.c[i] = simplify(out.c[i] + conj.c[i]);
  trace_normalize(out);
  return out;
}

FormMatrix transport_gauge(const FormMatrix& w, const Transition& t, const Chart& target) {
  const Chart& source = w.chart;
  int n = source.dim, m = w.msize;
  std::map<std::string, Expr> sub;
  for (int i = 0; i < n; ++i) sub[source.coord(i)] = t.inverse[static_cast<std::size_t>(i)];

  // dx^k = (d G^k / d xbar^m) dxbar^m
  ExprMat S(n, n);
  for (int k = 0; k < n; ++k)
    for (int mm = 0; mm < n; ++mm)
      S.at(k, mm) = diff(t.inverse[static_cast<std::size_t>(k)], target.coord(mm));

  FormMatrix out(target, m);
  for (int A = 0; A < m; ++A)
    for (int B = 0; B < m; ++B)
      for (int mm = 0; mm < n; ++mm) {
        std::vector<Expr> terms;
        for (int k = 0; k < n; ++k) {
          const Expr& co = w.coef(A, B, k);
          if (co.is_zero_literal()) continue;
          terms.push_back(substitute(co, sub) * S.at(k, mm));
        }
        out.coef(A, B, mm) = simplify(Expr::add(std::move(terms)));
      }
  return out;
}

ExprMat transition_gauge_frame(const Transition& t, const Chart& source, const Chart& target) {
  (void)source;
  int n = target.dim;
  ExprMat h(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) h.at(i, j) = Expr::number(i == j && i == n ? 1 : 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      h.at(i, j) = diff(t.inverse[static_cast<std::size_t>(i)], target.coord(j));
  return h;
}

Chart boundary_slice_chart(const Chart& chart) {
  if (!chart.boundary)
    throw GeomError("chart '" + chart.name + "' is not a boundary chart");
  Chart b;
  b.name = chart.name + "_boundary";
  b.dim = chart.dim - 1;
  b.coords.assign(chart.coords.begin() + 1, chart.coords.end());
  b.boundary = false;
  b.box.assign(chart.box.begin() + 1, chart.box.end());
  return b;
}

BoundaryPullback boundary_pullback(const FormMatrix& w, const Sampler& bsampler) {
  const Chart& chart = w.chart;
  int n = chart.dim, m = w.msize;
  Chart bchart = boundary_slice_chart(chart);
  std::map<std::string, Expr> sub{{chart.coord(0), Expr::number(0)}};

  BoundaryPullback out;
  out.gauge = FormMatrix(bchart, m);
  for (int A = 0; A < m; ++A)
    for (int B = 0; B < m; ++B)
      for (int i = 1; i < n; ++i)
        out.gauge.coef(A, B, i - 1) = simplify(substitute(w.coef(A, B, i), sub));

  // hyperplane-stabilizer membership: first row past the corner restricts to 0
  ZeroResult agg;
  agg.status = ZeroStatus::ProvablyZero;
  for (int B = 1; B < m; ++B) {
    for (int i = 0; i < bchart.dim; ++i) {
      ZeroResult r = is_zero(out.gauge.coef(0, B, i), bsampler);
      agg.max_abs = std::max(agg.max_abs, r.max_abs);
      if (r.status == ZeroStatus::NonzeroWitness) {
        r.max_abs = agg.max_abs;
        agg = r;
        out.witness = "omega^0_" + std::to_string(B) + " | d" + bchart.coord(i) + " = " +
                      to_string(out.gauge.coef(0, B, i));
        out.membership = agg;
        return out;
      }
      if (r.status == ZeroStatus::Undetermined && agg.status == ZeroStatus::ProvablyZero)
        agg.status = ZeroStatus::Undetermined;
    }
  }
  out.membership = agg;
  return out;
}

FormMatrix mod_k_project(const FormMatrix& bgauge) {
  int m = bgauge.msize;
  // membership precondition: the first-row tail must have restricted to zero
  for (int B = 1; B < m; ++B)
    for (int i = 0; i < bgauge.chart.dim; ++i) {
      Expr e = simplify(bgauge.coef(0, B, i));
      if (e.is_number() && !e.is_zero_literal())
        throw GeomError("kernel quotient of a gauge outside the stabilizer subalgebra: "
                        "entry 0," +
                        std::to_string(B) + " carries " + to_string(e) + " d" +
                        bgauge.chart.coord(i));
    }
  int nn = m - 1;  // projected gauge size
  FormMatrix out(bgauge.chart, nn);
  for (int A = 1; A < m; ++A)
    for (int B = 1; B < m; ++B)
      for (int i = 0; i < bgauge.chart.dim; ++i)
        out.coef(A - 1, B - 1, i) = bgauge.coef(A, B, i);
  trace_normalize(out);
  for (Expr& e : out.c) e = simplify(e);
  return out;
}

ConnectionField induce_boundary_connection(const ConnectionField& gamma,
                                           const Sampler& bsampler) {
  const Chart& chart = gamma.chart;
  int n = chart.dim;
  std::map<std::string, Expr> sub{{chart.coord(0), Expr::number(0)}};
  for (int mu = 1; mu < n; ++mu) {
    for (int nu = 1; nu < n; ++nu) {
      Expr ob = simplify(substitute(gamma.gamma(0, mu, nu), sub));
      ZeroResult r = is_zero(ob, bsampler);
      if (r.status == ZeroStatus::NonzeroWitness) {
        throw GeomError("boundary connection not induced: Gamma^0_" + std::to_string(mu) +
                        std::to_string(nu) + " restricts to " + to_string(ob) +
                        " (sample value " + std::to_string(r.value) + ")");
      }
    }
  }
  Chart bchart = boundary_slice_chart(chart);
  ConnectionField out(bchart);
  for (int mu = 1; mu < n; ++mu)
    for (int nu = 1; nu < n; ++nu)
      for (int ta = nu; ta < n; ++ta)
        out.set(mu - 1, nu - 1, ta - 1, simplify(substitute(gamma.gamma(mu, nu, ta), sub)));
  return out;
}

SchoutenComparison schouten_compare(const ConnectionField& gamma, const Sampler& bsampler) {
  const Chart& chart = gamma.chart;
  int n = chart.dim;
  if (n < 2) throw GeomError("schouten comparison needs dimension >= 2");
  int m = n - 1;
  SchoutenComparison out;
  out.boundary_chart = boundary_slice_chart(chart);
  std::map<std::string, Expr> sub{{chart.coord(0), Expr::number(0)}};

  CurvatureField rm = riemann(gamma);
  out.restricted.resize(static_cast<std::size_t>(m) * m);
  for (int s = 1; s < n; ++s) {
    for (int v = 1; v < n; ++v) {
      std::vector<Expr> terms;
      terms.push_back(rm.r(0, v, s, 0));
      for (int rho = 1; rho < n; ++rho) terms.push_back(rm.r(rho, v, s, rho));
      terms.push_back(Expr::number(-1, n + 1) * rm.r(0, 0, s, v));
      for (int rho = 1; rho < n; ++rho)
        terms.push_back(Expr::number(-1, n + 1) * rm.r(rho, rho, s, v));
      Expr e = Expr::number(-1, n - 1) * Expr::add(std::move(terms));
      out.restricted[static_cast<std::size_t>((s - 1) * m + (v - 1))] =
          simplify(substitute(e, sub));
    }
  }

  if (n >= 3) {
    ConnectionField induced = induce_boundary_connection(gamma, bsampler);
    CurvatureField rmi = riemann(induced);
    std::vector<Expr> ind(static_cast<std::size_t>(m) * m);
    for (int s = 0; s < m; ++s) {
      for (int v = 0; v < m; ++v) {
        std::vector<Expr> terms;
        for (int rho = 0; rho < m; ++rho) terms.push_back(rmi.r(rho, v, s, rho));
        for (int rho = 0; rho < m; ++rho)
          terms.push_back(Expr::number(-1, n) * rmi.r(rho, rho, s, v));
        ind[static_cast<std::size_t>(s * m + v)] =
            simplify(Expr::number(-1, n - 2) * Expr::add(std::move(terms)));
      }
    }
    std::vector<Expr> delta(static_cast<std::size_t>(m) * m);
    for (std::size_t i = 0; i < ind.size(); ++i)
      delta[i] = simplify(out.restricted[i] - ind[i]);
    out.induced = std::move(ind);
    out.difference = std::move(delta);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Second-order frame group

Jet2::Jet2(int dim)
    : n(dim), u(Eigen::MatrixXd::Identity(dim, dim)),
      q(static_cast<std::size_t>(dim) * dim * dim, 0.0) {}

double& Jet2::quad(int i, int j, int k) {
  return q[static_cast<std::size_t>((i * n + j) * n + k)];
}
double Jet2::quad(int i, int j, int k) const {
  return q[static_cast<std::size_t>((i * n + j) * n + k)];
}

Jet2 jet2_identity(int n) { return Jet2(n); }

Jet2 jet2_compose(const Jet2& a, const Jet2& b) {
  if (a.n != b.n) throw GeomError("2-frame dimensions differ");
  int n = a.n;
  Jet2 out(n);
  out.u = a.u * b.u;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0;
        for (int p = 0; p < n; ++p) {
          for (int qq = 0; qq < n; ++qq) s += a.quad(i, p, qq) * b.u(p, j) * b.u(qq, k);
          s += a.u(i, p) * b.quad(p, j, k);
        }
        out.quad(i, j, k) = s;
      }
  return out;
}

Jet2 jet2_inverse(const Jet2& a) {
  int n = a.n;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a.u);
  if (!lu.isInvertible()) throw GeomError("2-frame linear part is singular");
  Eigen::MatrixXd v = lu.inverse();
  Jet2 out(n);
  out.u = v;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0;
        for (int l = 0; l < n; ++l)
          for (int p = 0; p < n; ++p)
            for (int qq = 0; qq < n; ++qq)
              s += v(i, l) * a.quad(l, p, qq) * v(p, j) * v(qq, k);
        out.quad(i, j, k) = -s;
      }
  return out;
}

double jet2_distance(const Jet2& a, const Jet2& b) {
  double d = (a.u - b.u).cwiseAbs().maxCoeff();
  for (std::size_t i = 0; i < a.q.size(); ++i) d = std::max(d, std::abs(a.q[i] - b.q[i]));
  return d;
}

Jet2 h_embed(const Eigen::MatrixXd& A, const Eigen::VectorXd& upsilon) {
  int n = static_cast<int>(A.rows());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) throw GeomError("embedding requires an invertible linear part");
  Jet2 out(n);
  out.u = A;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out.quad(i, j, k) = -(A(i, j) * upsilon(k) + A(i, k) * upsilon(j));
  return out;
}

// ---------------------------------------------------------------------------
// Subalgebra masks

bool AlgebraMask::zero_required(int A, int B) const {
  int n = msize - 1;
  switch (alg) {
    case Subalgebra::StructureGroup:
      return A < n && B == n;
    case Subalgebra::HyperplaneStab:
      return A == 0 && B >= 1;
    case Subalgebra::BoundaryIsotropy:
      return (A == 0 && B >= 1) || (A >= 1 && A < n && B == n);
    case Subalgebra::Kernel:
      return (A == 0 && B >= 1) || (A >= 1 && B >= 1 && A != B);
  }
  return false;
}

bool AlgebraMask::admits(const Eigen::MatrixXd& m, double tol) const {
  for (int A = 0; A < msize; ++A)
    for (int B = 0; B < msize; ++B)
      if (zero_required(A, B) && std::abs(m(A, B)) > tol) return false;
  if (scalar_block()) {
    for (int A = 2; A < msize; ++A)
      if (std::abs(m(A, A) - m(1, 1)) > tol) return false;
  }
  return true;
}

ZeroResult AlgebraMask::admits(const FormMatrix& m, const Sampler& sampler) const {
  std::vector<Expr> entries;
  for (int A = 0; A < msize; ++A)
    for (int B = 0; B < msize; ++B)
      if (zero_required(A, B))
        for (int i = 0; i < m.chart.dim; ++i) entries.push_back(m.coef(A, B, i));
  if (scalar_block())
    for (int A = 2; A < msize; ++A)
      for (int i = 0; i < m.chart.dim; ++i)
        entries.push_back(m.coef(A, A, i) - m.coef(1, 1, i));
  return is_zero_all(entries, sampler);
}

}  // namespace projrigid
