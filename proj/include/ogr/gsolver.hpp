#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "ogr/error.hpp"
#include "ogr/field.hpp"
#include "ogr/young.hpp"

namespace ogr {

/// Flux F(z) = g(m) z / m with m = sqrt(|z|^2 + eps_reg^2); zero at z = 0.
Point flux(const YoungFunction& F, const Point& z, int dim, double eps_reg = 0.0);

/// Dirichlet problem for the g-Laplacian on `region`. `data` supplies the
/// boundary values (read at boundary_nodes(region)) and every value outside
/// the region; its interior values are ignored unless `warm_start` is set.
struct DirichletProblem {
  YoungFunction F;
  Region region;
  ScalarField data;
  /// Regularization length; defaults to h / 10.
  std::optional<double> eps_reg;
  double tol = 1e-10;           // relative energy decrease per step
  double residual_tol = 1e-6;   // scaled Euler-Lagrange residual
  int max_iters = 200;          // Newton steps per stage
  bool warm_start = false;      // start from data instead of the Laplace solve
};

struct IterationLog {
  int iter = 0;
  int stage = 0;  // 1: regularized, 2: eps_reg = 0 polish
  double energy = 0.0;
  double residual = 0.0;
  double step = 0.0;
};

struct SolveResult {
  ScalarField u;
  double energy = 0.0;    // unregularized discrete energy on the region
  double residual = 0.0;  // scaled, at eps_reg = 0
  int iterations = 0;
  bool converged = false;
  int fallback_steps = 0;  // nonlinear CG steps taken instead of Newton
  std::vector<IterationLog> log;
};

class SolverError : public NumericError {
 public:
  SolverError(const std::string& what, ScalarField last, double residual)
      : NumericError(what, residual), last_(std::move(last)) {}
  const ScalarField& last_iterate() const noexcept { return last_; }

 private:
  ScalarField last_;
};

/// Boundary values of a problem in boundary_nodes order.
std::vector<double> boundary_values(const DirichletProblem& P);

/// Discrete energy sum_cells w G(|grad u|) h^n over the region.
double dirichlet_energy(const YoungFunction& F, const ScalarField& u, const Region& region);

/// Damped Newton on the convex discrete energy (regularized stage, then an
/// eps_reg = 0 stage with a floored Hessian). Throws SolverError when a stage
/// exceeds max_iters.
SolveResult solve(const DirichletProblem& P);

struct ReplacementOptions {
  std::optional<double> eps_reg;
  double tol = 1e-10;
  double residual_tol = 1e-6;
  int max_iters = 200;
};

/// u outside the ball, the g-harmonic function with u's trace inside.
SolveResult harmonic_replacement(const YoungFunction& F, const ScalarField& u, const Region& ball,
                                 const ReplacementOptions& opt = {});

struct EnergyGap {
  double lhs = 0.0;    // int G(|grad u - grad v|)
  double rhs = 0.0;    // int G(|grad u|) - G(|grad v|)
  double ratio = 0.0;  // lhs / rhs, NaN when rhs <= tol
  bool minimal = true; // rhs >= -tol
  ScalarField replacement;
};

EnergyGap energy_gap_check(const YoungFunction& F, const ScalarField& u, const Region& ball,
                           const ReplacementOptions& opt = {}, double tol = 1e-10);

struct EllipticityProbe {
  int dim = 2;
  Point q{0.0, 0.0};
  std::function<Point(const Point&)> h_field;
  double lambda_lower = 0.0;  // 2^{1-g0} delta
  double Lambda_upper = 0.0;  // (3/2)^{g0-1} g0

  static EllipticityProbe make(const YoungFunction& F, int dim, Point q,
                               std::function<Point(const Point&)> h_field);
};

/// int_0^1 DF(q + t h(x)) dt by Gauss-Legendre (8, 16 or 32 points).
Eigen::MatrixXd ellipticity_matrix(const YoungFunction& F, const EllipticityProbe& probe,
                                   const Point& x, int quad_points = 16);
/// Same with the perturbation value given directly.
Eigen::MatrixXd ellipticity_matrix(const YoungFunction& F, int dim, const Point& q,
                                   const Point& hx, int quad_points = 16);

struct InteriorEstimates {
  double sup_avg_ratio = 1.0;  // sup_{B_R/4} G(|grad v|) / avg_{B_R/2} G(|grad v|)
  double alpha_hat = 0.0;      // slope of log osc |grad v| against log rho
  double r_squared = 0.0;
  bool degenerate = false;     // zero average energy or zero oscillation
  std::vector<std::pair<double, double>> osc_trace;  // (rho, osc)
};

InteriorEstimates interior_estimates_probe(const YoungFunction& F, const ScalarField& v,
                                           const Point& center, double R);

}  // namespace ogr
