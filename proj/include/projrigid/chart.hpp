#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "projrigid/expr.hpp"
#include "projrigid/zero.hpp"

namespace projrigid {

class GeomError : public std::runtime_error {
 public:
  explicit GeomError(const std::string& what) : std::runtime_error(what) {}
};

/// Coordinate change between two charts. `forward` expresses the target
/// coordinates in the source chart's coordinates, `inverse` the other way
/// round; both directions are kept explicit so transforms never need to
/// invert maps symbolically beyond Jacobians.
struct Transition {
  std::string target;
  std::vector<Expr> forward;
  std::vector<Expr> inverse;

  Transition reversed(const std::string& source_name) const {
    return Transition{source_name, inverse, forward};
  }
};

/// A coordinate chart. In boundary charts the first coordinate is the
/// boundary-defining one: the boundary is {coords[0] == 0} and the box keeps
/// coords[0] >= 0.
struct Chart {
  std::string name;
  int dim = 0;
  std::vector<std::string> coords;
  bool boundary = false;
  std::vector<std::array<double, 2>> box;
  std::vector<Transition> transitions;

  const std::string& coord(int i) const { return coords[static_cast<std::size_t>(i)]; }
  int coord_index(const std::string& name) const;
  const Transition* find_transition(const std::string& target) const;

  /// Point-as-assignment for evaluation; values ordered like `coords`.
  VarMap assignment(const std::vector<double>& x) const;
};

struct ConnectionField;
struct MapField;

/// A scene: dimension, named parameters with values, charts, connection
/// fields and maps. The projective data under study.
struct Scene {
  int dim = 0;
  std::map<std::string, double> params;
  std::vector<Chart> charts;
  std::vector<std::pair<std::string, ConnectionField>> connections;
  std::vector<std::pair<std::string, MapField>> maps;

  const Chart* find_chart(const std::string& name) const;
  const ConnectionField* find_connection(const std::string& name) const;
  const MapField* find_map(const std::string& name) const;
};

struct SamplerOptions {
  int samples = 64;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
};

/// Sampler over a chart's box with scene parameters pinned.
Sampler chart_sampler(const Chart& chart, const std::map<std::string, double>& params,
                      const SamplerOptions& opt = {});

/// Same, restricted to the boundary slice {coords[0] == 0}.
Sampler boundary_sampler(const Chart& chart, const std::map<std::string, double>& params,
                         const SamplerOptions& opt = {});

/// Deterministic boundary grid: `count` points with the tangential
/// coordinates on a regular lattice inside the box, coords[0] pinned to 0.
std::vector<std::vector<double>> boundary_grid(const Chart& chart, int count);

}  // namespace projrigid
