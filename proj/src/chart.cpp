#include "projrigid/chart.hpp"

#include <cmath>

#include "projrigid/fields.hpp"

namespace projrigid {

int Chart::coord_index(const std::string& cname) const {
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (coords[i] == cname) return static_cast<int>(i);
  throw GeomError("chart '" + name + "' has no coordinate '" + cname + "'");
}

const Transition* Chart::find_transition(const std::string& t) const {
  for (const Transition& tr : transitions)
    if (tr.target == t) return &tr;
  return nullptr;
}

VarMap Chart::assignment(const std::vector<double>& x) const {
  if (x.size() != coords.size())
    throw GeomError("point dimension mismatch in chart '" + name + "'");
  VarMap m;
  for (std::size_t i = 0; i < coords.size(); ++i) m[coords[i]] = x[i];
  return m;
}

const Chart* Scene::find_chart(const std::string& name) const {
  for (const Chart& c : charts)
    if (c.name == name) return &c;
  return nullptr;
}

const ConnectionField* Scene::find_connection(const std::string& name) const {
  for (const auto& [n, c] : connections)
    if (n == name) return &c;
  return nullptr;
}

const MapField* Scene::find_map(const std::string& name) const {
  for (const auto& [n, m] : maps)
    if (n == name) return &m;
  return nullptr;
}

Sampler chart_sampler(const Chart& chart, const std::map<std::string, double>& params,
                      const SamplerOptions& opt) {
  Sampler s;
  s.samples = opt.samples;
  s.seed = opt.seed;
  s.tolerance = opt.tolerance;
  for (int i = 0; i < chart.dim; ++i) {
    const auto& b = chart.box[static_cast<std::size_t>(i)];
    s.box.range(chart.coord(i), b[0], b[1]);
  }
  for (const auto& [k, v] : params) s.box.pin(k, v);
  return s;
}

Sampler boundary_sampler(const Chart& chart, const std::map<std::string, double>& params,
                         const SamplerOptions& opt) {
  if (!chart.boundary)
    throw GeomError("chart '" + chart.name + "' is not a boundary chart");
  Sampler s = chart_sampler(chart, params, opt);
  s.box.ranges.erase(s.box.ranges.begin());
  s.box.pin(chart.coord(0), 0.0);
  return s;
}

std::vector<std::vector<double>> boundary_grid(const Chart& chart, int count) {
  if (!chart.boundary)
    throw GeomError("chart '" + chart.name + "' is not a boundary chart");
  int m = chart.dim - 1;
  std::vector<std::vector<double>> out;
  if (count <= 0) return out;
  // per-axis resolution: smallest k with k^m >= count, then take the first
  // `count` lattice points in lexicographic order
  int k = 1;
  while (std::pow(k, m) < count) ++k;
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  for (int c = 0; c < count; ++c) {
    std::vector<double> p(static_cast<std::size_t>(chart.dim), 0.0);
    for (int a = 0; a < m; ++a) {
      const auto& b = chart.box[static_cast<std::size_t>(a + 1)];
      double t = (k == 1) ? 0.5 : static_cast<double>(idx[static_cast<std::size_t>(a)]) / (k - 1);
      p[static_cast<std::size_t>(a + 1)] = b[0] + t * (b[1] - b[0]);
    }
    out.push_back(std::move(p));
    for (int a = m - 1; a >= 0; --a) {
      if (++idx[static_cast<std::size_t>(a)] < k) break;
      idx[static_cast<std::size_t>(a)] = 0;
    }
  }
  return out;
}

}  // namespace projrigid
