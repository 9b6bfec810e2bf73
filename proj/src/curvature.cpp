#include "projrigid/curvature.hpp"

#include "projrigid/geometry.hpp"

namespace projrigid {

const Expr& CurvatureField::r(int i, int j, int k, int l) const {
  int n = chart.dim;
  return riem[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
}

const Expr& CurvatureField::ricci(int a, int b) const {
  return ric[static_cast<std::size_t>(a * chart.dim + b)];
}

CurvatureField riemann(const ConnectionField& gamma) {
  const Chart& chart = gamma.chart;
  int n = chart.dim;
  CurvatureField out;
  out.chart = chart;
  out.riem.assign(static_cast<std::size_t>(n) * n * n * n, Expr::number(0));

  // cache first derivatives d_k Gamma^i_lj
  std::vector<Expr> dg(static_cast<std::size_t>(n) * n * n * n);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          dg[static_cast<std::size_t>(((i * n + l) * n + j) * n + k)] =
              diff(gamma.gamma(i, l, j), chart.coord(k));

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = k + 1; l < n; ++l) {
          std::vector<Expr> terms;
          terms.push_back(dg[static_cast<std::size_t>(((i * n + l) * n + j) * n + k)]);
          terms.push_back(Expr::number(-1) *
                          dg[static_cast<std::size_t>(((i * n + k) * n + j) * n + l)]);
          for (int m = 0; m < n; ++m) {
            terms.push_back(gamma.gamma(i, k, m) * gamma.gamma(m, l, j));
            terms.push_back(Expr::number(-1) * gamma.gamma(i, l, m) * gamma.gamma(m, k, j));
          }
          Expr e = simplify(Expr::add(std::move(terms)));
          out.riem[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)] = e;
          out.riem[static_cast<std::size_t>(((i * n + j) * n + l) * n + k)] =
              simplify(Expr::number(-1) * e);
        }
      }
    }
  }
  out.ric = ricci(out);
  return out;
}

std::vector<Expr> ricci(const CurvatureField& rm) {
  int n = rm.chart.dim;
  std::vector<Expr> out(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      std::vector<Expr> terms;
      for (int c = 0; c < n; ++c) terms.push_back(rm.r(c, b, c, a));
      out[static_cast<std::size_t>(a * n + b)] = simplify(Expr::add(std::move(terms)));
    }
  }
  return out;
}

const Expr& SchoutenField::at(int a, int b) const {
  return p[static_cast<std::size_t>(a * chart.dim + b)];
}

SchoutenField schouten(const ConnectionField& gamma) {
  const Chart& chart = gamma.chart;
  int n = chart.dim;
  if (n < 2) throw GeomError("schouten tensor needs dimension >= 2");
  CurvatureField rm = riemann(gamma);
  SchoutenField out;
  out.chart = chart;
  out.p.resize(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      Expr antis = (rm.ricci(a, b) - rm.ricci(b, a)) / 2;
      Expr e = rm.ricci(a, b) - Expr::number(2, n + 1) * antis;
      out.p[static_cast<std::size_t>(a * n + b)] = simplify(e / (n - 1));
    }
  }
  return out;
}

std::vector<Expr> schouten_shift_residual(const ConnectionField& gamma,
                                          const OneFormField& upsilon) {
  const Chart& chart = gamma.chart;
  int n = chart.dim;
  SchoutenField base = schouten(gamma);
  SchoutenField shifted = schouten(projective_shift(gamma, upsilon));
  std::vector<Expr> out;
  out.reserve(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      // covariant derivative of the 1-form in the base connection
      std::vector<Expr> terms;
      terms.push_back(diff(upsilon.comp[static_cast<std::size_t>(b)], chart.coord(a)));
      for (int m = 0; m < n; ++m)
        terms.push_back(Expr::number(-1) * gamma.gamma(m, a, b) *
                        upsilon.comp[static_cast<std::size_t>(m)]);
      Expr nabla_ab = Expr::add(std::move(terms));
      Expr law = base.at(a, b) - nabla_ab +
                 upsilon.comp[static_cast<std::size_t>(a)] * upsilon.comp[static_cast<std::size_t>(b)];
      out.push_back(simplify(shifted.at(a, b) - law));
    }
  }
  return out;
}

}  // namespace projrigid
