#include "ogr/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ogr/detail/numeric.hpp"
#include "ogr/error.hpp"

namespace ogr {

namespace {

std::vector<double> abs_values(std::vector<double> v) {
  for (double& x : v) x = std::abs(x);
  return v;
}

double scaled_modular(const YoungFunction& F, const Grid& g, std::span<const double> cell_abs,
                      const Region& region, double inv_lambda) {
  detail::CompensatedSum s;
  const auto cells = region.cells();
  const auto w = region.weights();
  for (std::size_t k = 0; k < cells.size(); ++k) s += w[k] * F.G(cell_abs[cells[k]] * inv_lambda);
  return s.value() * g.cell_volume();
}

}  // namespace

double modular(const YoungFunction& F, const Grid& g, std::span<const double> cell_abs,
               const Region& region) {
  if (region.empty()) throw PreconditionError("modular over an empty region");
  if (cell_abs.size() != g.cell_count()) throw PreconditionError("modular: size mismatch");
  return scaled_modular(F, g, cell_abs, region, 1.0);
}

double modular(const YoungFunction& F, const ScalarField& u, const Region& region) {
  const auto v = abs_values(u.cell_values());
  return modular(F, u.grid(), v, region);
}

double modular(const YoungFunction& F, const VectorField& v, const Region& region) {
  const auto m = v.magnitudes();
  return modular(F, v.grid(), m, region);
}

double luxemburg_norm(const YoungFunction& F, const Grid& g, std::span<const double> cell_abs,
                      const Region& region) {
  if (region.empty()) throw PreconditionError("luxemburg_norm over an empty region");
  if (cell_abs.size() != g.cell_count()) throw PreconditionError("luxemburg_norm: size mismatch");
  double peak = 0.0;
  for (std::size_t c : region.cells()) peak = std::max(peak, cell_abs[c]);
  if (peak == 0.0) return 0.0;
  auto phi = [&](double lambda) { return scaled_modular(F, g, cell_abs, region, 1.0 / lambda); };
  // Bracket from the power sandwich; widened until it straddles 1.
  const double m = measure(g, region);
  double hi = 2.0 * peak * std::max(1.0, std::pow(m, 1.0 / (F.delta() + 1.0)));
  double lo = hi;
  while (phi(hi) > 1.0) hi *= 2.0;
  while (phi(lo) <= 1.0 && lo > std::numeric_limits<double>::min()) lo *= 0.5;
  for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

double luxemburg_norm(const YoungFunction& F, const ScalarField& u, const Region& region) {
  const auto v = abs_values(u.cell_values());
  return luxemburg_norm(F, u.grid(), v, region);
}

double luxemburg_norm(const YoungFunction& F, const VectorField& v, const Region& region) {
  const auto m = v.magnitudes();
  return luxemburg_norm(F, v.grid(), m, region);
}

ModularReport norm_modular_bound(const YoungFunction& F, const Grid& g,
                                 std::span<const double> cell_abs, const Region& region) {
  ModularReport r;
  r.modular = modular(F, g, cell_abs, region);
  r.norm = luxemburg_norm(F, g, cell_abs, region);
  r.bound = std::max(std::pow(r.modular, 1.0 / (F.g0() + 1.0)),
                     std::pow(r.modular, 1.0 / (F.delta() + 1.0)));
  r.holds = r.norm <= r.bound + 1e-9;
  return r;
}

ModularReport norm_modular_bound(const YoungFunction& F, const ScalarField& u, const Region& region) {
  const auto v = abs_values(u.cell_values());
  return norm_modular_bound(F, u.grid(), v, region);
}

ModularReport norm_modular_bound(const YoungFunction& F, const VectorField& v, const Region& region) {
  const auto m = v.magnitudes();
  return norm_modular_bound(F, v.grid(), m, region);
}

}  // namespace ogr
