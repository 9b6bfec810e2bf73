#include "projrigid/fields.hpp"

#include <cmath>
#include <functional>

#include "projrigid/exprmat.hpp"

namespace projrigid {

ConnectionField::ConnectionField(const Chart& c)
    : chart(c), g(static_cast<std::size_t>(c.dim) * c.dim * c.dim) {}

const Expr& ConnectionField::gamma(int i, int j, int k) const {
  int n = chart.dim;
  return g[static_cast<std::size_t>((i * n + j) * n + k)];
}

void ConnectionField::set(int i, int j, int k, const Expr& e) {
  int n = chart.dim;
  g[static_cast<std::size_t>((i * n + j) * n + k)] = e;
  g[static_cast<std::size_t>((i * n + k) * n + j)] = e;
}

ConnectionField ConnectionField::map_entries(const std::function<Expr(const Expr&)>& f) const {
  ConnectionField out(chart);
  for (std::size_t i = 0; i < g.size(); ++i) out.g[i] = f(g[i]);
  return out;
}

bool ConnectionField::symmetric() const {
  int n = chart.dim;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        if (!struct_equal(gamma(i, j, k), gamma(i, k, j))) return false;
  return true;
}

std::vector<double> ConnectionField::eval_at(const VarMap& point) const {
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = eval(g[i], point);
  return out;
}

const Expr& MapField::jacobian(int i, int j) const {
  int n = source.dim;
  return jac[static_cast<std::size_t>(i * n + j)];
}

const Expr& MapField::hessian(int i, int j, int k) const {
  int n = source.dim;
  return hess[static_cast<std::size_t>((i * n + j) * n + k)];
}

std::map<std::string, Expr> MapField::as_substitution() const {
  std::map<std::string, Expr> m;
  for (int i = 0; i < target.dim; ++i) m[target.coord(i)] = comp[static_cast<std::size_t>(i)];
  return m;
}

MapField make_map(const Chart& source, const Chart& target, std::vector<Expr> components) {
  if (source.dim != target.dim)
    throw GeomError("map between charts of different dimension");
  if (static_cast<int>(components.size()) != source.dim)
    throw GeomError("map component count does not match the chart dimension");
  MapField m;
  m.source = source;
  m.target = target;
  m.comp = std::move(components);
  int n = source.dim;
  m.jac.resize(static_cast<std::size_t>(n) * n);
  m.hess.resize(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Expr d = diff(m.comp[static_cast<std::size_t>(i)], source.coord(j));
      m.jac[static_cast<std::size_t>(i * n + j)] = d;
      for (int k = j; k < n; ++k) {
        Expr dd = diff(d, source.coord(k));
        m.hess[static_cast<std::size_t>((i * n + j) * n + k)] = dd;
        m.hess[static_cast<std::size_t>((i * n + k) * n + j)] = dd;
      }
    }
  }
  return m;
}

MapField identity_map(const Chart& chart) {
  std::vector<Expr> comps;
  for (int i = 0; i < chart.dim; ++i) comps.push_back(Expr::var(chart.coord(i)));
  return make_map(chart, chart, std::move(comps));
}

double min_abs_jacobian(const MapField& map, const Sampler& sampler) {
  int n = map.source.dim;
  ExprMat j(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) j.at(a, b) = map.jacobian(a, b);
  Expr d = mat_det(j);
  double best = std::numeric_limits<double>::infinity();
  for (const VarMap& p : sampler.points()) {
    try {
      best = std::min(best, std::abs(eval(d, p)));
    } catch (const EvalError&) {
      continue;
    }
  }
  return best;
}

}  // namespace projrigid
