#include "projrigid/geodesic.hpp"

#include <cmath>

namespace projrigid {

namespace {

struct Flow {
  const ConnectionField& gamma;
  const Chart& chart;
  VarMap point;  // reused assignment buffer (coords + params)

  Flow(const ConnectionField& g, const std::map<std::string, double>& params)
      : gamma(g), chart(g.chart) {
    for (const auto& [k, v] : params) point[k] = v;
  }

  // dx = v, dv^i = -Gamma^i_jk v^j v^k
  void eval_rhs(const std::vector<double>& x, const std::vector<double>& v,
                std::vector<double>& dx, std::vector<double>& dv) {
    int n = chart.dim;
    for (int i = 0; i < n; ++i) point[chart.coord(i)] = x[static_cast<std::size_t>(i)];
    for (int i = 0; i < n; ++i) {
      dx[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)];
      double acc = 0;
      for (int j = 0; j < n; ++j) {
        for (int k = j; k < n; ++k) {
          const Expr& e = gamma.gamma(i, j, k);
          if (e.is_zero_literal()) continue;
          double g = eval(e, point);
          double vv = v[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(k)];
          acc += (j == k ? 1.0 : 2.0) * g * vv;
        }
      }
      dv[static_cast<std::size_t>(i)] = -acc;
    }
  }
};

bool inside_box(const Chart& chart, const std::vector<double>& x, double margin) {
  for (int i = 0; i < chart.dim; ++i) {
    const auto& b = chart.box[static_cast<std::size_t>(i)];
    double pad = margin * (b[1] - b[0]);
    if (x[static_cast<std::size_t>(i)] < b[0] - pad || x[static_cast<std::size_t>(i)] > b[1] + pad)
      return false;
  }
  return true;
}

}  // namespace

Trajectory geodesic_integrate(const ConnectionField& gamma, const std::vector<double>& x0,
                              const std::vector<double>& v0, double h, int steps,
                              const std::map<std::string, double>& params, double box_margin) {
  const Chart& chart = gamma.chart;
  int n = chart.dim;
  if (x0.size() != static_cast<std::size_t>(n) || v0.size() != static_cast<std::size_t>(n))
    throw GeomError("initial data dimension mismatch");
  if (!inside_box(chart, x0, box_margin))
    throw GeomError("initial point is outside the chart box");

  Trajectory traj;
  traj.h = h;
  traj.states.push_back({x0, v0});

  Flow flow(gamma, params);
  std::vector<double> x = x0, v = v0;
  std::vector<double> k1x(n), k1v(n), k2x(n), k2v(n), k3x(n), k3v(n), k4x(n), k4v(n);
  std::vector<double> tx(n), tv(n);

  for (int s = 0; s < steps; ++s) {
    try {
      flow.eval_rhs(x, v, k1x, k1v);
      for (int i = 0; i < n; ++i) {
        tx[i] = x[i] + 0.5 * h * k1x[i];
        tv[i] = v[i] + 0.5 * h * k1v[i];
      }
      flow.eval_rhs(tx, tv, k2x, k2v);
      for (int i = 0; i < n; ++i) {
        tx[i] = x[i] + 0.5 * h * k2x[i];
        tv[i] = v[i] + 0.5 * h * k2v[i];
      }
      flow.eval_rhs(tx, tv, k3x, k3v);
      for (int i = 0; i < n; ++i) {
        tx[i] = x[i] + h * k3x[i];
        tv[i] = v[i] + h * k3v[i];
      }
      flow.eval_rhs(tx, tv, k4x, k4v);
    } catch (const EvalError&) {
      traj.exited = true;
      traj.exit_step = s;
      break;
    }
    for (int i = 0; i < n; ++i) {
      x[i] += h / 6.0 * (k1x[i] + 2 * k2x[i] + 2 * k3x[i] + k4x[i]);
      v[i] += h / 6.0 * (k1v[i] + 2 * k2v[i] + 2 * k3v[i] + k4v[i]);
    }
    bool finite = true;
    for (int i = 0; i < n; ++i) finite = finite && std::isfinite(x[i]) && std::isfinite(v[i]);
    if (!finite || !inside_box(chart, x, box_margin)) {
      traj.exited = true;
      traj.exit_step = s + 1;
      break;
    }
    traj.states.push_back({x, v});
  }
  return traj;
}

DriftResult tangency_drift(const ConnectionField& gamma, const std::vector<double>& y0,
                           const std::vector<double>& v, double h, int steps,
                           const std::map<std::string, double>& params) {
  const Chart& chart = gamma.chart;
  if (!chart.boundary) throw GeomError("tangency drift needs a boundary chart");
  if (std::abs(y0[0]) > 1e-12) throw GeomError("initial point is not on the boundary");
  if (std::abs(v[0]) > 1e-12) throw GeomError("initial velocity is not boundary-tangent");

  // allow a sliver outside the box: the run measures exactly how the
  // trajectory leaves the boundary slice
  DriftResult out;
  out.trajectory = geodesic_integrate(gamma, y0, v, h, steps, params, 0.1);
  for (const GeodesicState& st : out.trajectory.states)
    out.max_drift = std::max(out.max_drift, std::abs(st.x[0]));

  // Richardson estimate of the quadratic opening from the half and full times
  std::size_t last = out.trajectory.states.size() - 1;
  if (last >= 2) {
    if (last % 2 == 1) --last;
    std::size_t half = last / 2;
    double T = static_cast<double>(last) * h;
    double full = out.trajectory.states[last].x[0];
    double mid = out.trajectory.states[half].x[0];
    out.quad_coeff = (8 * mid - full) / (T * T);
  }
  return out;
}

}  // namespace projrigid
