#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ogr/field.hpp"
#include "ogr/young.hpp"

namespace ogr {

struct Ball {
  Point center{0.0, 0.0};
  double radius = 1.0;
};

/// Region for a ball: cell-center rule, or fractional weights once the
/// radius drops below 4h (so balls of sub-cell size still average something).
Region probe_ball(const Grid& g, const Ball& b);

struct EnergyLevel {
  double G_of_a = 0.0;  // average of G(|grad u|) over the ball
  double a = 0.0;       // G^{-1}(G_of_a)
};

EnergyLevel avg_energy_level(const YoungFunction& F, const ScalarField& u, const Region& ball);
/// Average of G(|grad u - q|) over the ball.
double flatness(const YoungFunction& F, const ScalarField& u, const Point& q, const Region& ball);
/// argmin_q flatness, from the average gradient; objective converged to 1e-8 relative.
Point best_slope(const YoungFunction& F, const ScalarField& u, const Region& ball);

struct DichotomyParams {
  double epsilon = 0.05;
  double eta = 0.25;
  double M_threshold = 1.0;  // level a below which the dichotomy hypothesis fails
  double sigma = 0.0;        // almost-minimality slack at scale 1 (slack_sigma)
  double C_flat = 2.0;
  double C0 = 2.0;
  Ball ball{};  // plays the role of B_1

  /// sigma = eta^{n+1}; M from a >= G^{-1}(C eta^{-n} / (eps^{g0+1} - C eta - C eta^{alpha(delta+1)}))
  /// when that denominator is positive, otherwise 1 (and `m_from_formula` false).
  static DichotomyParams from_constants(const YoungFunction& F, int n, double epsilon, double eta,
                                    double C, double alpha, Ball ball = {});
  bool m_from_formula = false;
};

enum class DichotomyVerdict { A, B, Both, Neither };
std::string to_string(DichotomyVerdict v);

struct DichotomyReport {
  DichotomyVerdict verdict = DichotomyVerdict::Neither;
  bool degenerate = false;        // a = 0
  bool below_threshold = false;   // a <= M_threshold (hypothesis not met)
  double G_of_a = 0.0;
  double a = 0.0;
  double avg_eta = 0.0;           // average of G(|grad u|) over B_eta
  double half_level = 0.0;        // G(a / 2)
  Point q{0.0, 0.0};
  double q_norm = 0.0;
  double flatness = 0.0;          // over B_eta at q
  double flat_bound = 0.0;        // G(eps a)
  double flat_bound_remark = 0.0; // eps^{delta+1} G(a)
  double window_lo = 0.0;         // G^{-1}(C_flat^{-1} G(a/4))
  double window_hi = 0.0;         // C0 a
  bool alt_a = false;
  bool alt_b = false;
};

DichotomyReport dichotomy_probe(const YoungFunction& F, const ScalarField& u,
                                const DichotomyParams& params);

struct IterationState {
  int k = 0;
  double radius = 0.0;  // rho^k (times the ball radius)
  double rho = 0.0;
  double alpha = 0.0;
  double tau = 0.0;     // (delta+1)/(g0+1)
  Point q_k{0.0, 0.0};
  double flatness_k = 0.0;
  double flat_bound = 0.0;        // rho^{k alpha (delta+1)} eps^{delta+1} G(a)
  double a_level = 0.0;           // a on B_1
  double level_sigma = 0.0;       // G(a)^{1/(g0+1)}
  double drift = 0.0;             // |q_{k+1} - q_k|
  double drift_scale = 0.0;       // a eps^tau rho^{k alpha tau}
  double avg_energy = 0.0;        // average G(|grad u|) on B_{rho^k}
  bool sandwich_ok = false;       // G(|q_k|/2) <= avg_energy <= 2 G(|q_k|)
};

struct IterationTrace {
  std::vector<IterationState> states;
  bool truncated = false;   // stopped because the ball fell below 4 cells
  double alpha_hat = 0.0;   // slope of log flatness_k vs log rho^k, divided by delta+1
  double alpha_fit_r2 = 0.0;
  double drift_ratio = 0.0; // geometric-mean ratio of successive drifts
  double C_tilde = 0.0;     // max drift / drift_scale
  double drift_sum = 0.0;
  double drift_series_bound = 0.0;  // C_tilde a eps^tau / (1 - rho^{alpha tau})
  double b_intercept = 0.0; // average of u over B_1 (the affine profile's constant)
};

/// Iteration of the flatness improvement on B_1 = `ball`. q0 defaults to best_slope on B_1.
IterationTrace improvement_iterate(const YoungFunction& F, const ScalarField& u,
                                   std::optional<Point> q0, double rho, double alpha,
                                   double epsilon, int K, Ball ball = {});

enum class CampanatoMode { AvgCentered, InfOverXi };

struct CampanatoRow {
  Point x0{0.0, 0.0};
  double radius = 0.0;
  double avg_value = 0.0;  // rho^{-lambda} int G(|u - u_avg|)
  double inf_value = 0.0;  // rho^{-lambda} inf_xi int G(|u - xi|)
  double measure = 0.0;
};

struct CampanatoReport {
  double lambda = 0.0;
  double gamma = 0.0;  // (lambda - n) / (g0 + 1)
  double seminorm = 0.0;      // in the requested mode
  double seminorm_avg = 0.0;
  double seminorm_inf = 0.0;
  double holder_seminorm = 0.0;
  double fitted_C = 0.0;      // holder_seminorm / G^{-1}(seminorm_inf)
  double upd_constant = 1.0;  // empirical c0 over the sampled balls
  double min_ratio = 1.0;     // AvgCentered / InfOverXi over pairs with inf > 0
  double max_ratio = 1.0;
  std::size_t skipped = 0;
  std::vector<CampanatoRow> rows;
};

/// Default sampling: every 4th node of the domain as centers, dyadic radii
/// from 8h up to half the domain's smaller side.
std::vector<Point> default_centers(const Grid& g, const Region& domain, int stride = 4);
std::vector<double> default_radii(const Grid& g, const Region& domain);

CampanatoReport campanato_seminorm(const YoungFunction& F, const ScalarField& u,
                                   const Region& domain, double lambda,
                                   const std::vector<Point>& centers,
                                   const std::vector<double>& radii, CampanatoMode mode);

/// Campanato seminorm with default sampling plus the discrete Hoelder
/// seminorm of exponent gamma (Lipschitz when lambda = n + g0 + 1).
CampanatoReport holder_certificate(const YoungFunction& F, const ScalarField& u,
                                   const Region& domain, double lambda);

/// Hoelder seminorm over node pairs of the domain (all pairs up to 1e4 nodes,
/// a strided subset beyond).
double holder_seminorm(const ScalarField& u, const Region& domain, double gamma);

struct BmoRow {
  Point x0{0.0, 0.0};
  double radius = 0.0;
  double mean_osc = 0.0;  // average of |u - u_avg|
  double density = 0.0;   // |Omega ∩ B| / (omega_n rho^n)
  double phi_n = 0.0;     // rho^{-n} int G(|u - u_avg|)
  double bound = 0.0;     // G^{-1}(c0^{-1} omega_n^{-1} phi_n)
  bool holds = true;
};

struct BmoReport {
  double bmo = 0.0;          // sup of mean_osc
  double upd_constant = 0.0; // c0 used
  double empirical_c0 = 0.0; // min density over samples
  double phi_n = 0.0;        // sup of phi_n
  double bound = 0.0;        // G^{-1}(c0^{-1} omega_n^{-1} sup phi_n)
  bool holds = true;         // every row and the global bound
  std::vector<std::string> upd_violations;
  std::vector<BmoRow> rows;
};

/// Borderline lambda = n. upd_constant defaults to the empirical c0; a given
/// value is checked against every sample.
BmoReport bmo_star_seminorm(const YoungFunction& F, const ScalarField& u, const Region& domain,
                            std::optional<double> upd_constant = std::nullopt,
                            const std::vector<Point>& centers = {},
                            const std::vector<double>& radii = {});

struct LipschitzStep {
  int k = 0;
  double radius = 0.0;
  double G_of_a = 0.0;     // G(a(eta^k))
  double recurrence_rhs = 0.0;  // eta^{-n} M + 2^{-k} G(a(1))
  bool recurrence_ok = true;
  bool above_M = false;
  std::optional<DichotomyVerdict> dichotomy;
};

struct LipschitzReport {
  std::vector<LipschitzStep> steps;
  double grad_sup_half = 0.0;   // ||grad u||_{L^inf(B_{1/2})}
  double energy_B1 = 0.0;       // int_{B_1} G(|grad u|)
  double ratio = 0.0;           // grad_sup_half / G^{-1}(1 + energy_B1)
  bool recurrence_ok = true;
  bool completed = false;
};

LipschitzReport lipschitz_certificate(const YoungFunction& F, const ScalarField& u, double eta,
                                      double M_threshold, int K, Ball ball = {},
                                      double epsilon = 0.05);

}  // namespace ogr
