#pragma once

#include "projrigid/fields.hpp"
#include "projrigid/zero.hpp"

namespace projrigid {

/// Transform Christoffel symbols through a coordinate change. The result
/// lives on `target`; `t.inverse` (source coordinates as functions of the
/// target's) supplies everything, including the Jacobian that gets inverted
/// symbolically.
ConnectionField christoffel_transform(const ConnectionField& gamma, const Transition& t,
                                      const Chart& target);

/// Projective change of connection by a 1-form: adds the symmetrized
/// delta-Upsilon term (weight-1/2 round brackets, i.e. both orderings once).
ConnectionField projective_shift(const ConnectionField& gamma, const OneFormField& upsilon);

/// Recover the 1-form of a projective change from the trace of the
/// difference of two connections in the same chart.
OneFormField extract_upsilon(const ConnectionField& hat, const ConnectionField& base);

struct EquivalenceReport {
  ZeroResult residual;
  OneFormField upsilon;
  std::vector<Expr> residual_entries;
  bool equivalent() const { return residual.status == ZeroStatus::ProvablyZero; }
};

/// Tri-state projective-equivalence test: shift `base` by the extracted
/// 1-form and compare with `hat`.
EquivalenceReport is_projectively_equivalent(const ConnectionField& hat,
                                             const ConnectionField& base,
                                             const Sampler& sampler);

/// Trace-adjusted symbols, invariant under projective changes of connection.
/// The result is trace-free in (upper, first lower).
ConnectionField thomas_parameters(const ConnectionField& gamma);

/// Connection pulled back through a map (target-side symbols composed with
/// the map, corrected by the map's Hessian).
ConnectionField pullback_connection(const ConnectionField& gamma, const MapField& map);

struct MapVerdict {
  ZeroResult residual;
  OneFormField upsilon;
  std::vector<Expr> residual_entries;
  bool projective() const { return residual.status == ZeroStatus::ProvablyZero; }
};

/// Map verification: the pullback must differ from the connection by a pure
/// projective shift. Sampled fallback reports the residual magnitude.
MapVerdict is_projective_transformation(const MapField& map, const ConnectionField& gamma,
                                        const Sampler& sampler);

/// Transformation law of the trace-adjusted symbols under a diffeomorphism;
/// naturality means this agrees with thomas_parameters(pullback_connection).
ConnectionField thomas_transform_law(const ConnectionField& pi, const MapField& map);

}  // namespace projrigid
