#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ogr/field.hpp"
#include "ogr/gsolver.hpp"
#include "ogr/young.hpp"

namespace ogr {

struct EnergyReport {
  double g_energy = 0.0;     // int G(|grad u|)
  double pos_measure = 0.0;  // |{u > 0} ∩ region|
  double j_value = 0.0;      // g_energy + pos_measure
  bool negative_values = false;  // some node in the region below -tol_pos
};

/// Default positivity threshold 1e-12 * max|u|.
double default_tol_pos(const ScalarField& u);

/// J_G(u, region). A cell counts as positive when its largest corner value
/// exceeds tol_pos (default: default_tol_pos(u)).
EnergyReport j_g(const YoungFunction& F, const ScalarField& u, const Region& region,
                 std::optional<double> tol_pos = std::nullopt);

struct AlmostMinParams {
  double kappa = 0.0;
  double beta = 1.0;
  std::optional<double> tol_pos;
  double slack_tol = 1e-10;
  /// Truncation levels as fractions of max_ball(u).
  std::vector<double> truncation_levels{0.1, 0.25, 0.5};
  bool include_replacement = true;
  ReplacementOptions replacement{};
};

struct CompetitorResult {
  std::string id;
  double j_u = 0.0;
  double j_v = 0.0;
  double slack = 0.0;  // (1 + kappa r^beta) J(v) - J(u)
  bool pass = true;
};

struct AlmostMinReport {
  double radius = 0.0;
  double factor = 1.0;  // 1 + kappa r^beta
  std::vector<CompetitorResult> rows;
  std::vector<std::string> rejected;  // competitors violating the boundary constraint
  bool falsified = false;
  /// "not falsified" or "FAIL"; a finite competitor family can only refute.
  std::string verdict() const { return falsified ? "FAIL" : "not falsified"; }
};

/// Truncation competitor max(u - c phi, 0) with phi a cutoff equal to 1 on
/// B_{r/2}, decaying linearly to 0 at radius r and forced to 0 on the ball's
/// boundary nodes, so that the trace of u is kept.
ScalarField truncation_competitor(const ScalarField& u, const Region& ball, double c);

/// `ball` must be a Ball region (its radius enters the slack factor).
AlmostMinReport almost_min_check(const YoungFunction& F, const ScalarField& u, const Region& ball,
                                 const AlmostMinParams& params,
                                 const std::vector<ScalarField>& competitors = {});

struct ScalingRow {
  Point x_bar{0.0, 0.0};
  double rho = 0.0;
  double lhs = 0.0;  // J_G(u, B_{r rho}(r x_bar))
  double rhs = 0.0;  // r^n J_G(u_r, B_rho(x_bar))
  double rel_error = 0.0;
  double resampled_rhs = 0.0;  // u_r resampled on u's own grid (diagnostic)
  double resampled_rel_error = 0.0;
};

struct ScalingReport {
  double r = 1.0;
  double max_rel_error = 0.0;            // image lattice
  double max_resampled_rel_error = 0.0;  // same lattice, interpolated
  std::vector<ScalingRow> rows;
};

/// Change of variables J_G(u, B_{r rho}(r x)) = r^n J_G(u_r, B_rho(x)). The
/// right side is evaluated for u_r on the image lattice of u's grid (spacing
/// h / r), where the two balls select corresponding cells; the same-grid
/// resampled value is reported alongside.
ScalingReport scaling_check(const YoungFunction& F, const ScalarField& u, double r,
                            const std::vector<Point>& centers, const std::vector<double>& radii);

}  // namespace ogr
