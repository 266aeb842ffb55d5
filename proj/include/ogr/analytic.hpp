#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ogr/field.hpp"

namespace ogr {

/// Parameters shared by the built-in analytic fields; each id reads the
/// subset it needs.
struct AnalyticParams {
  Point q{1.0, 0.0};   // slope of linear parts
  double b = 0.0;      // constant offset
  double c = 1.0;      // perturbation amplitude
  double s = 0.5;      // perturbation exponent
  double p = 3.0;      // growth exponent for radial g-harmonic profiles
  double r_in = 0.5;
  double r_out = 1.0;
  std::uint64_t seed = 0;
  int modes = 4;       // smooth_random
};

/// Known ids:
///   zero, constant (b), linear (q.x + b), sqrt_abs (|x|^{1/2}),
///   abs_power (|x|^s), one_phase (max(x_1, 0)),
///   perturbed_linear (q.x + c|x|^{1+s}),
///   tilted_power (q.x + c|x|^s (|x| + x_1/2)),
///   annulus_radial (radial p-harmonic profile, 0 at r_in and 1 at r_out),
///   annulus_step (0 for |x| < (r_in + r_out)/2, else 1),
///   smooth_random (seeded trigonometric sum).
std::function<double(const Point&)> analytic_function(const std::string& id, int dim,
                                                      const AnalyticParams& params = {});

ScalarField analytic_field(const std::string& id, const Grid& g, const AnalyticParams& params = {});

std::vector<std::string> analytic_ids();

}  // namespace ogr
