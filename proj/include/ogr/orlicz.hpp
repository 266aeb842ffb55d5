#pragma once

#include <span>

#include "ogr/field.hpp"
#include "ogr/young.hpp"

namespace ogr {

struct ModularReport {
  double modular = 0.0;
  double norm = 0.0;
  /// max{modular^{1/(g0+1)}, modular^{1/(delta+1)}}
  double bound = 0.0;
  bool holds = true;  // norm <= bound + 1e-9
};

/// int_region G(|f|) over cell magnitudes `cell_abs` (midpoint rule).
double modular(const YoungFunction& F, const Grid& g, std::span<const double> cell_abs,
               const Region& region);
/// Scalar fields enter through their cell-center values.
double modular(const YoungFunction& F, const ScalarField& u, const Region& region);
double modular(const YoungFunction& F, const VectorField& v, const Region& region);

/// inf{lambda > 0 : modular(f / lambda) <= 1}, relative tolerance ~1e-13. Zero for f = 0.
double luxemburg_norm(const YoungFunction& F, const Grid& g, std::span<const double> cell_abs,
                      const Region& region);
double luxemburg_norm(const YoungFunction& F, const ScalarField& u, const Region& region);
double luxemburg_norm(const YoungFunction& F, const VectorField& v, const Region& region);

ModularReport norm_modular_bound(const YoungFunction& F, const Grid& g,
                                 std::span<const double> cell_abs, const Region& region);
ModularReport norm_modular_bound(const YoungFunction& F, const ScalarField& u, const Region& region);
ModularReport norm_modular_bound(const YoungFunction& F, const VectorField& v, const Region& region);

}  // namespace ogr
