#pragma once

#include <random>
#include <string>
#include <vector>

#include "projrigid/fields.hpp"
#include "projrigid/fixtures.hpp"
#include "projrigid/zero.hpp"

namespace projrigid::testing {

// deterministic random polynomials in the chart coordinates, degree <= deg,
// small rational coefficients
struct PolyGen {
  std::mt19937_64 rng;

  explicit PolyGen(std::uint64_t seed) : rng(seed) {}

  Rational coefficient() {
    long long num = static_cast<long long>(rng() % 9) - 4;  // -4 .. 4
    long long den = 1 + static_cast<long long>(rng() % 3);
    return Rational(num, den);
  }

  Expr poly(const Chart& chart, int deg) {
    std::vector<Expr> terms{Expr::number(coefficient())};
    for (int d = 1; d <= deg; ++d) {
      for (int reps = 0; reps < chart.dim; ++reps) {
        std::vector<Expr> factors{Expr::number(coefficient())};
        for (int k = 0; k < d; ++k) {
          int i = static_cast<int>(rng() % static_cast<std::uint64_t>(chart.dim));
          factors.push_back(Expr::var(chart.coord(i)));
        }
        terms.push_back(Expr::mul(std::move(factors)));
      }
    }
    return simplify(Expr::add(std::move(terms)));
  }

  OneFormField one_form(const Chart& chart, int deg) {
    OneFormField u(chart);
    for (int i = 0; i < chart.dim; ++i) u.comp[static_cast<std::size_t>(i)] = poly(chart, deg);
    return u;
  }

  ConnectionField connection(const Chart& chart, int deg) {
    ConnectionField g(chart);
    for (int i = 0; i < chart.dim; ++i)
      for (int j = 0; j < chart.dim; ++j)
        for (int k = j; k < chart.dim; ++k) g.set(i, j, k, poly(chart, deg));
    return g;
  }
};

inline Sampler sampler_for(const Scene& scene, const Chart& chart, std::uint64_t seed = 0,
                           double tol = 1e-9) {
  SamplerOptions opt;
  opt.seed = seed;
  opt.tolerance = tol;
  return chart_sampler(chart, scene.params, opt);
}

}  // namespace projrigid::testing
