#include "ogr/bernoulli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ogr/detail/numeric.hpp"
#include "ogr/error.hpp"

namespace ogr {

double default_tol_pos(const ScalarField& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return 1e-12 * m;
}

EnergyReport j_g(const YoungFunction& F, const ScalarField& u, const Region& region,
                 std::optional<double> tol_pos) {
  if (region.empty()) throw PreconditionError("j_g over an empty region");
  const double tp = tol_pos.value_or(default_tol_pos(u));
  if (tp < 0.0) throw PreconditionError("tol_pos must be >= 0");
  const Grid& g = u.grid();
  const int k = g.corners_per_cell();
  detail::CompensatedSum energy;
  detail::CompensatedSum pos;
  EnergyReport rep;
  const auto cells = region.cells();
  const auto w = region.weights();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::size_t c = cells[i];
    energy += w[i] * F.G(norm(cell_gradient(g, u.values(), c), g.dim()));
    const auto n = g.cell_corners(c);
    double top = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < k; ++a) {
      const double v = u[n[static_cast<std::size_t>(a)]];
      top = std::max(top, v);
      if (v < -tp) rep.negative_values = true;
    }
    if (top > tp) pos += w[i];
  }
  rep.g_energy = energy.value() * g.cell_volume();
  rep.pos_measure = pos.value() * g.cell_volume();
  rep.j_value = rep.g_energy + rep.pos_measure;
  return rep;
}

ScalarField truncation_competitor(const ScalarField& u, const Region& ball, double c) {
  if (ball.kind() != RegionKind::Ball) throw PreconditionError("truncation needs a Ball region");
  const Grid& g = u.grid();
  const double r = ball.radius();
  const Point x0 = ball.center();
  ScalarField v = u;
  const auto bnd = boundary_nodes(g, ball);
  std::vector<std::uint8_t> on_boundary(g.node_count(), 0);
  for (std::size_t n : bnd) on_boundary[n] = 1;
  for (std::size_t n : region_nodes(g, ball)) {
    if (on_boundary[n]) continue;
    const Point x = g.node_point(n);
    const double d = std::hypot(x[0] - x0[0], g.dim() == 2 ? x[1] - x0[1] : 0.0);
    const double phi = std::clamp(2.0 * (1.0 - d / r), 0.0, 1.0);
    v[n] = std::max(u[n] - c * phi, 0.0);
  }
  return v;
}

AlmostMinReport almost_min_check(const YoungFunction& F, const ScalarField& u, const Region& ball,
                                 const AlmostMinParams& params,
                                 const std::vector<ScalarField>& competitors) {
  if (!(params.beta > 0.0)) throw PreconditionError("almost_min_check requires beta > 0");
  if (params.kappa < 0.0) throw PreconditionError("almost_min_check requires kappa >= 0");
  if (ball.kind() != RegionKind::Ball) throw PreconditionError("almost_min_check needs a Ball region");
  const Grid& g = u.grid();
  AlmostMinReport rep;
  rep.radius = ball.radius();
  rep.factor = 1.0 + params.kappa * std::pow(rep.radius, params.beta);
  const double tp = params.tol_pos.value_or(default_tol_pos(u));
  const double ju = j_g(F, u, ball, tp).j_value;
  const auto bnd = boundary_nodes(g, ball);

  auto evaluate = [&](const std::string& id, const ScalarField& v) {
    if (!(v.grid() == g)) {
      rep.rejected.push_back(id + ": grid differs from u");
      return;
    }
    for (std::size_t n : bnd) {
      if (std::abs(v[n] - u[n]) > 1e-12) {
        rep.rejected.push_back(id + ": differs from u on the ball boundary at node " +
                               std::to_string(n));
        return;
      }
    }
    CompetitorResult row;
    row.id = id;
    row.j_u = ju;
    row.j_v = j_g(F, v, ball, tp).j_value;
    row.slack = rep.factor * row.j_v - ju;
    row.pass = row.slack >= -params.slack_tol;
    if (!row.pass) rep.falsified = true;
    rep.rows.push_back(row);
  };

  if (params.include_replacement) {
    evaluate("replacement", harmonic_replacement(F, u, ball, params.replacement).u);
  }
  double top = 0.0;
  for (std::size_t n : region_nodes(g, ball)) top = std::max(top, u[n]);
  for (double level : params.truncation_levels) {
    evaluate("truncation_" + std::to_string(level), truncation_competitor(u, ball, level * top));
  }
  for (std::size_t i = 0; i < competitors.size(); ++i) {
    evaluate("user_" + std::to_string(i), competitors[i]);
  }
  return rep;
}

ScalingReport scaling_check(const YoungFunction& F, const ScalarField& u, double r,
                            const std::vector<Point>& centers, const std::vector<double>& radii) {
  if (!(r > 0.0) || r > 1.0) throw PreconditionError("scaling_check requires r in (0, 1]");
  const Grid& g = u.grid();
  ScalingReport rep;
  rep.r = r;
  const Grid gi = image_grid(g, r);
  std::vector<double> vi(u.values().begin(), u.values().end());
  for (double& x : vi) x /= r;
  const ScalarField ur_image(gi, std::move(vi));
  const ScalarField ur_same = rescale(u, r);
  const double rn = g.dim() == 2 ? r * r : r;
  const double tp = default_tol_pos(u);

  for (const Point& xb : centers) {
    for (double rho : radii) {
      ScalingRow row;
      row.x_bar = xb;
      row.rho = rho;
      const Region left = Region::ball(g, {r * xb[0], r * xb[1]}, r * rho);
      const Region right = Region::ball(gi, xb, rho);
      if (left.empty() || right.empty()) continue;
      row.lhs = j_g(F, u, left, tp).j_value;
      row.rhs = rn * j_g(F, ur_image, right, tp / r).j_value;
      const double denom = std::max(std::abs(row.lhs), 1e-300);
      row.rel_error = std::abs(row.lhs - row.rhs) / denom;
      const Region same = Region::ball(g, xb, rho);
      if (!same.empty()) {
        row.resampled_rhs = rn * j_g(F, ur_same, same, tp / r).j_value;
        row.resampled_rel_error = std::abs(row.lhs - row.resampled_rhs) / denom;
      }
      rep.max_rel_error = std::max(rep.max_rel_error, row.rel_error);
      rep.max_resampled_rel_error = std::max(rep.max_resampled_rel_error, row.resampled_rel_error);
      rep.rows.push_back(row);
    }
  }
  return rep;
}

}  // namespace ogr
