#pragma once

#include <functional>
#include <vector>

#include "projrigid/chart.hpp"
#include "projrigid/expr.hpp"

namespace projrigid {

/// Christoffel symbols of a torsion-free affine connection in one chart.
/// Symmetry in the lower index pair is structural: the symmetric setter
/// stores one expression in both slots.
struct ConnectionField {
  Chart chart;
  std::vector<Expr> g;  // dim^3 entries, [i][j][k]

  ConnectionField() = default;
  explicit ConnectionField(const Chart& c);

  static ConnectionField zero(const Chart& c) { return ConnectionField(c); }

  const Expr& gamma(int i, int j, int k) const;
  void set(int i, int j, int k, const Expr& e);  // writes (j,k) and (k,j)

  ConnectionField map_entries(const std::function<Expr(const Expr&)>& f) const;
  bool symmetric() const;

  /// All dim^3 entries evaluated at a point.
  std::vector<double> eval_at(const VarMap& point) const;
};

struct OneFormField {
  Chart chart;
  std::vector<Expr> comp;  // dim entries

  OneFormField() = default;
  explicit OneFormField(const Chart& c) : chart(c), comp(static_cast<std::size_t>(c.dim)) {}
};

/// A differentiable map between charts with cached first and second
/// derivatives of its components.
struct MapField {
  Chart source;
  Chart target;
  std::vector<Expr> comp;  // dim components, exprs in source coordinates
  std::vector<Expr> jac;   // dim^2, d comp[i] / d source.coord(j)
  std::vector<Expr> hess;  // dim^3, second derivatives, symmetric in (j,k)

  const Expr& component(int i) const { return comp[static_cast<std::size_t>(i)]; }
  const Expr& jacobian(int i, int j) const;
  const Expr& hessian(int i, int j, int k) const;

  /// Substitution map target-coordinate -> component expression.
  std::map<std::string, Expr> as_substitution() const;
};

MapField make_map(const Chart& source, const Chart& target, std::vector<Expr> components);
MapField identity_map(const Chart& chart);

/// Numeric diffeomorphism witness: |det Jacobian| is above `tol` at every
/// sampled point. Returns the smallest |det| seen.
double min_abs_jacobian(const MapField& map, const Sampler& sampler);

}  // namespace projrigid
