#pragma once

#include <map>
#include <string>

#include "projrigid/chart.hpp"
#include "projrigid/fields.hpp"

namespace projrigid {

/// Built-in scene with its expected behavior recorded as semantic notes
/// (verdicts, key values) for reports and the acceptance suite.
struct Fixture {
  std::string name;
  Scene scene;
  std::map<std::string, std::string> expectations;
};

/// Flat connection on the half-space {r >= 0}, dimension n >= 2. Carries a
/// second boundary chart related by (r, y) -> (r*exp(y1), y) for
/// chart-independence cross-checks. Expected: non-rigid candidate everywhere.
Fixture flat_half_space(int n);

/// Fractional-linear self-map of the flat half-plane fixing the boundary
/// line to second order; beta/gamma enter as named scene parameters.
MapField mobius_map(const Scene& flat2);

/// The inside of a non-degenerate conic, in the angular boundary chart
/// (r, t) with x = (1-r)cos t, y = (1-r)sin t. Expected: rigid boundary,
/// obstruction entry equal to 1-r.
Fixture projective_disk();

/// Conic-preserving projective self-map of the disk chart, parametrised by
/// the rotation-boost-rotation angles (theta, psi, phi) as scene parameters.
MapField o21_map(const Scene& disk);

/// Flat half-space presented as one side of a degenerate conic; same
/// connection data, kept as a separate named scene. Expected: non-rigid.
Fixture degenerate_conic_halfspace(int n);

/// All built-in fixtures (n in {2,3} where applicable).
std::vector<Fixture> all_fixtures();

}  // namespace projrigid
