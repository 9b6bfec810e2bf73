#pragma once

#include "projrigid/fields.hpp"

namespace projrigid {

struct GeodesicState {
  std::vector<double> x;
  std::vector<double> v;
};

struct Trajectory {
  double h = 0;
  std::vector<GeodesicState> states;  // includes the initial state
  bool exited = false;
  int exit_step = -1;
};

/// Classic fixed-step RK4 for the geodesic flow
///   x' = v,  v'^i = -Gamma^i_jk(x) v^j v^k.
/// Integration stops (with the exit flag) when the trajectory leaves the
/// chart box enlarged by `box_margin` of each extent, or when evaluation
/// hits a domain fault.
Trajectory geodesic_integrate(const ConnectionField& gamma, const std::vector<double>& x0,
                              const std::vector<double>& v0, double h, int steps,
                              const std::map<std::string, double>& params,
                              double box_margin = 0.0);

struct DriftResult {
  double max_drift = 0;   // max |x^0| along the run
  double quad_coeff = 0;  // Richardson estimate of the leading t^2 coefficient
  Trajectory trajectory;
};

/// Launch a boundary-tangent geodesic and measure how the boundary-defining
/// coordinate drifts. For a totally geodesic boundary the drift stays at
/// rounding level; otherwise it opens quadratically with coefficient
/// -1/2 Gamma^0_{mu nu} v^mu v^nu.
DriftResult tangency_drift(const ConnectionField& gamma, const std::vector<double>& y0,
                           const std::vector<double>& v, double h, int steps,
                           const std::map<std::string, double>& params);

}  // namespace projrigid
