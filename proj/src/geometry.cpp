#include "projrigid/geometry.hpp"

#include "projrigid/exprmat.hpp"

namespace projrigid {

namespace {

void require_same_chart(const ConnectionField& a, const ConnectionField& b) {
  if (a.chart.name != b.chart.name || a.chart.dim != b.chart.dim)
    throw GeomError("connection fields live on different charts ('" + a.chart.name + "' vs '" +
                    b.chart.name + "')");
}

void require_same_chart(const ConnectionField& a, const OneFormField& b) {
  if (a.chart.name != b.chart.name)
    throw GeomError("connection and 1-form live on different charts ('" + a.chart.name +
                    "' vs '" + b.chart.name + "')");
}

}  // namespace

ConnectionField christoffel_transform(const ConnectionField& gamma, const Transition& t,
                                      const Chart& target) {
  const Chart& source = gamma.chart;
  int n = source.dim;
  if (target.dim != n) throw GeomError("transition dimension mismatch");
  if (static_cast<int>(t.inverse.size()) != n || static_cast<int>(t.forward.size()) != n)
    throw GeomError("transition component count mismatch");

  // source coordinates as functions of the target's
  const std::vector<Expr>& G = t.inverse;

  ExprMat J(n, n);  // J^l_j = d G^l / d target.x^j
  std::vector<Expr> H(static_cast<std::size_t>(n) * n * n);
  for (int l = 0; l < n; ++l) {
    for (int j = 0; j < n; ++j) {
      Expr d = diff(G[static_cast<std::size_t>(l)], target.coord(j));
      J.at(l, j) = d;
      for (int k = j; k < n; ++k) {
        Expr dd = diff(d, target.coord(k));
        H[static_cast<std::size_t>((l * n + j) * n + k)] = dd;
        H[static_cast<std::size_t>((l * n + k) * n + j)] = dd;
      }
    }
  }
  ExprMat Jinv = mat_inverse(J);

  std::map<std::string, Expr> sub;
  for (int i = 0; i < n; ++i) sub[source.coord(i)] = G[static_cast<std::size_t>(i)];

  ConnectionField out(target);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        std::vector<Expr> terms;
        for (int l = 0; l < n; ++l) {
          terms.push_back(Jinv.at(i, l) * H[static_cast<std::size_t>((l * n + j) * n + k)]);
          for (int s = 0; s < n; ++s) {
            for (int m = 0; m < n; ++m) {
              const Expr& gsm = gamma.gamma(l, s, m);
              if (gsm.is_zero_literal()) continue;
              terms.push_back(Jinv.at(i, l) * substitute(gsm, sub) * J.at(s, j) * J.at(m, k));
            }
          }
        }
        out.set(i, j, k, simplify(Expr::add(std::move(terms))));
      }
    }
  }
  return out;
}

ConnectionField projective_shift(const ConnectionField& gamma, const OneFormField& upsilon) {
  require_same_chart(gamma, upsilon);
  int n = gamma.chart.dim;
  ConnectionField out(gamma.chart);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        Expr e = gamma.gamma(i, j, k);
        if (i == j) e = e + upsilon.comp[static_cast<std::size_t>(k)];
        if (i == k) e = e + upsilon.comp[static_cast<std::size_t>(j)];
        out.set(i, j, k, simplify(e));
      }
    }
  }
  return out;
}

OneFormField extract_upsilon(const ConnectionField& hat, const ConnectionField& base) {
  require_same_chart(hat, base);
  int n = hat.chart.dim;
  OneFormField out(hat.chart);
  for (int k = 0; k < n; ++k) {
    std::vector<Expr> tr;
    for (int i = 0; i < n; ++i) tr.push_back(hat.gamma(i, i, k) - base.gamma(i, i, k));
    out.comp[static_cast<std::size_t>(k)] = rational_simplify(Expr::add(std::move(tr)) / (n + 1));
  }
  return out;
}

EquivalenceReport is_projectively_equivalent(const ConnectionField& hat,
                                             const ConnectionField& base,
                                             const Sampler& sampler) {
  EquivalenceReport rep;
  rep.upsilon = extract_upsilon(hat, base);
  ConnectionField shifted = projective_shift(base, rep.upsilon);
  int n = hat.chart.dim;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k)
        rep.residual_entries.push_back(simplify(hat.gamma(i, j, k) - shifted.gamma(i, j, k)));
  rep.residual = is_zero_all(rep.residual_entries, sampler);
  return rep;
}

ConnectionField thomas_parameters(const ConnectionField& gamma) {
  int n = gamma.chart.dim;
  ConnectionField out(gamma.chart);
  std::vector<Expr> trace(static_cast<std::size_t>(n));  // Gamma^l_{l k}
  for (int k = 0; k < n; ++k) {
    std::vector<Expr> tr;
    for (int l = 0; l < n; ++l) tr.push_back(gamma.gamma(l, l, k));
    trace[static_cast<std::size_t>(k)] = simplify(Expr::add(std::move(tr)));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        Expr e = gamma.gamma(i, j, k);
        if (i == j) e = e - trace[static_cast<std::size_t>(k)] / (n + 1);
        if (i == k) e = e - trace[static_cast<std::size_t>(j)] / (n + 1);
        out.set(i, j, k, simplify(e));
      }
    }
  }
  return out;
}

ConnectionField pullback_connection(const ConnectionField& gamma, const MapField& map) {
  if (gamma.chart.name != map.target.name)
    throw GeomError("pullback: connection lives on '" + gamma.chart.name +
                    "', map targets '" + map.target.name + "'");
  int n = map.source.dim;
  ExprMat J(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) J.at(i, j) = map.jacobian(i, j);
  ExprMat A = mat_inverse(J);

  std::map<std::string, Expr> sub = map.as_substitution();

  ConnectionField out(map.source);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        std::vector<Expr> terms;
        for (int l = 0; l < n; ++l) {
          terms.push_back(A.at(i, l) * map.hessian(l, j, k));
          for (int s = 0; s < n; ++s) {
            for (int m = 0; m < n; ++m) {
              const Expr& gsm = gamma.gamma(l, s, m);
              if (gsm.is_zero_literal()) continue;
              terms.push_back(A.at(i, l) * substitute(gsm, sub) * map.jacobian(s, j) *
                              map.jacobian(m, k));
            }
          }
        }
        out.set(i, j, k, simplify(Expr::add(std::move(terms))));
      }
    }
  }
  return out;
}

MapVerdict is_projective_transformation(const MapField& map, const ConnectionField& gamma,
                                        const Sampler& sampler) {
  MapVerdict v;
  ConnectionField pulled = pullback_connection(gamma, map);
  // the pullback lives on map.source; compare against gamma there
  if (map.source.name != gamma.chart.name)
    throw GeomError("map verification requires a self-map of the connection's chart");
  v.upsilon = extract_upsilon(pulled, gamma);
  ConnectionField shifted = projective_shift(gamma, v.upsilon);
  int n = map.source.dim;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k)
        v.residual_entries.push_back(simplify(pulled.gamma(i, j, k) - shifted.gamma(i, j, k)));
  v.residual = is_zero_all(v.residual_entries, sampler);
  return v;
}

ConnectionField thomas_transform_law(const ConnectionField& pi, const MapField& map) {
  if (pi.chart.name != map.target.name)
    throw GeomError("transform law: symbols live on '" + pi.chart.name + "', map targets '" +
                    map.target.name + "'");
  int n = map.source.dim;
  ExprMat J(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) J.at(i, j) = map.jacobian(i, j);
  ExprMat A = mat_inverse(J);
  std::map<std::string, Expr> sub = map.as_substitution();

  // transported symbols plus the trace-free correction from the Hessian
  std::vector<Expr> hess_tr(static_cast<std::size_t>(n));  // A^s_l Hess^l_{s k}
  for (int k = 0; k < n; ++k) {
    std::vector<Expr> terms;
    for (int s = 0; s < n; ++s)
      for (int l = 0; l < n; ++l) terms.push_back(A.at(s, l) * map.hessian(l, s, k));
    hess_tr[static_cast<std::size_t>(k)] = simplify(Expr::add(std::move(terms)));
  }

  ConnectionField out(map.source);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        std::vector<Expr> terms;
        for (int l = 0; l < n; ++l) {
          terms.push_back(A.at(i, l) * map.hessian(l, j, k));
          for (int s = 0; s < n; ++s) {
            for (int m = 0; m < n; ++m) {
              const Expr& psm = pi.gamma(l, s, m);
              if (psm.is_zero_literal()) continue;
              terms.push_back(A.at(i, l) * substitute(psm, sub) * map.jacobian(s, j) *
                              map.jacobian(m, k));
            }
          }
        }
        Expr e = Expr::add(std::move(terms));
        if (i == j) e = e - hess_tr[static_cast<std::size_t>(k)] / (n + 1);
        if (i == k) e = e - hess_tr[static_cast<std::size_t>(j)] / (n + 1);
        out.set(i, j, k, simplify(e));
      }
    }
  }
  return out;
}

}  // namespace projrigid
