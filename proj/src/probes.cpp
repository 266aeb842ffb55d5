#include "ogr/probes.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ogr/detail/numeric.hpp"
#include "ogr/error.hpp"

namespace ogr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double unit_ball_volume(int dim) { return dim == 2 ? std::numbers::pi : 2.0; }

std::vector<Point> region_gradients(const ScalarField& u, const Region& region) {
  std::vector<Point> out;
  out.reserve(region.size());
  for (std::size_t c : region.cells()) out.push_back(cell_gradient(u.grid(), u.values(), c));
  return out;
}

double weighted_mean(const Region& region, const std::vector<double>& per_cell_in_region) {
  detail::CompensatedSum s;
  double wsum = 0.0;
  const auto w = region.weights();
  for (std::size_t k = 0; k < per_cell_in_region.size(); ++k) {
    s += w[k] * per_cell_in_region[k];
    wsum += w[k];
  }
  return s.value() / wsum;
}

double flatness_of(const YoungFunction& F, const std::vector<Point>& grads, const Region& region,
                   const Point& q, int dim) {
  std::vector<double> vals(grads.size());
  for (std::size_t k = 0; k < grads.size(); ++k) {
    vals[k] = F.G(norm({grads[k][0] - q[0], grads[k][1] - q[1]}, dim));
  }
  return weighted_mean(region, vals);
}

}  // namespace

Region probe_ball(const Grid& g, const Ball& b) {
  if (b.radius >= 4.0 * g.h()) return Region::ball(g, b.center, b.radius);
  const int sub = static_cast<int>(std::clamp(std::ceil(16.0 * g.h() / b.radius), 8.0, 512.0));
  return Region::ball_fractional(g, b.center, b.radius, sub);
}

EnergyLevel avg_energy_level(const YoungFunction& F, const ScalarField& u, const Region& ball) {
  if (ball.empty()) throw PreconditionError("avg_energy_level over an empty ball");
  EnergyLevel out;
  out.G_of_a = flatness(F, u, {0.0, 0.0}, ball);
  out.a = F.inverse_G(out.G_of_a);
  return out;
}

double flatness(const YoungFunction& F, const ScalarField& u, const Point& q, const Region& ball) {
  if (ball.empty()) throw PreconditionError("flatness over an empty ball");
  return flatness_of(F, region_gradients(u, ball), ball, q, u.grid().dim());
}

Point best_slope(const YoungFunction& F, const ScalarField& u, const Region& ball) {
  if (ball.empty()) throw PreconditionError("best_slope over an empty ball");
  const int dim = u.grid().dim();
  const auto grads = region_gradients(u, ball);
  const auto w = ball.weights();
  double wsum = 0.0;
  Point q{0.0, 0.0};
  double scale = 0.0;
  for (std::size_t k = 0; k < grads.size(); ++k) {
    q[0] += w[k] * grads[k][0];
    q[1] += w[k] * grads[k][1];
    wsum += w[k];
    scale = std::max(scale, norm(grads[k], dim));
  }
  q[0] /= wsum;
  q[1] /= wsum;
  if (scale == 0.0) return {0.0, 0.0};

  // Damped Newton in q (n <= 2 unknowns). The objective is convex; the
  // curvature is floored where |grad u - q| vanishes.
  double f = flatness_of(F, grads, ball, q, dim);
  const double m_floor = 1e-8 * scale;
  for (int it = 0; it < 200; ++it) {
    Eigen::Vector2d grad = Eigen::Vector2d::Zero();
    Eigen::Matrix2d H = Eigen::Matrix2d::Zero();
    for (std::size_t k = 0; k < grads.size(); ++k) {
      Eigen::Vector2d z(grads[k][0] - q[0], dim == 2 ? grads[k][1] - q[1] : 0.0);
      const double m = z.norm();
      const double mh = std::max(m, m_floor);
      const double gm = F.g(mh);
      if (m > 0.0) grad -= w[k] * (F.g(m) / m) * z;
      H += w[k] * ((gm / mh) * Eigen::Matrix2d::Identity() +
                   (F.dg(mh) / (mh * mh) - gm / (mh * mh * mh)) * z * z.transpose());
    }
    grad /= wsum;
    H /= wsum;
    if (dim == 1) {
      grad[1] = 0.0;
      H(0, 1) = H(1, 0) = 0.0;
      H(1, 1) = 1.0;
    }
    if (grad.norm() == 0.0) break;
    Eigen::Vector2d d = H.ldlt().solve(-grad);
    if (!d.allFinite() || d.dot(grad) >= 0.0) d = -grad;
    double t = 1.0;
    bool accepted = false;
    Point trial = q;
    double f_new = f;
    for (int ls = 0; ls < 60; ++ls) {
      trial = {q[0] + t * d[0], q[1] + t * d[1]};
      f_new = flatness_of(F, grads, ball, trial, dim);
      if (f_new <= f + 1e-4 * t * d.dot(grad)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    const double dec = f - f_new;
    q = trial;
    f = f_new;
    if (dec <= 1e-15 * std::max(f, 1e-300)) break;
  }
  return q;
}

DichotomyParams DichotomyParams::from_constants(const YoungFunction& F, int n, double epsilon,
                                            double eta, double C, double alpha, Ball ball) {
  if (!(epsilon > 0.0 && epsilon < 1.0) || !(eta > 0.0 && eta < 1.0)) {
    throw PreconditionError("dichotomy parameters need epsilon, eta in (0, 1)");
  }
  DichotomyParams p;
  p.epsilon = epsilon;
  p.eta = eta;
  p.sigma = std::pow(eta, n + 1);
  p.ball = ball;
  const double denom = std::pow(epsilon, F.g0() + 1.0) - C * eta -
                       C * std::pow(eta, alpha * (F.delta() + 1.0));
  if (denom > 0.0) {
    p.M_threshold = F.inverse_G(C * std::pow(eta, -n) / denom);
    p.m_from_formula = true;
  } else {
    p.M_threshold = 1.0;
    p.m_from_formula = false;
  }
  return p;
}

std::string to_string(DichotomyVerdict v) {
  switch (v) {
    case DichotomyVerdict::A: return "A";
    case DichotomyVerdict::B: return "B";
    case DichotomyVerdict::Both: return "BOTH";
    case DichotomyVerdict::Neither: return "NEITHER";
  }
  return "unknown";
}

DichotomyReport dichotomy_probe(const YoungFunction& F, const ScalarField& u,
                                const DichotomyParams& params) {
  const Grid& g = u.grid();
  DichotomyReport r;
  const Region b1 = probe_ball(g, params.ball);
  const Region beta = probe_ball(g, {params.ball.center, params.eta * params.ball.radius});
  const auto level = avg_energy_level(F, u, b1);
  r.G_of_a = level.G_of_a;
  r.a = level.a;
  r.degenerate = r.a == 0.0;
  r.below_threshold = r.a <= params.M_threshold;
  r.avg_eta = flatness(F, u, {0.0, 0.0}, beta);
  r.half_level = F.G(0.5 * r.a);
  r.alt_a = r.avg_eta <= r.half_level * (1.0 + 1e-12);

  r.q = best_slope(F, u, beta);
  r.q_norm = norm(r.q, g.dim());
  r.flatness = flatness(F, u, r.q, beta);
  r.flat_bound = F.G(params.epsilon * r.a);
  r.flat_bound_remark = std::pow(params.epsilon, F.delta() + 1.0) * r.G_of_a;
  r.window_lo = F.inverse_G(F.G(0.25 * r.a) / params.C_flat);
  r.window_hi = params.C0 * r.a;
  r.alt_b = r.flatness <= r.flat_bound && r.q_norm > r.window_lo && r.q_norm < r.window_hi;

  if (r.alt_a && r.alt_b) {
    r.verdict = DichotomyVerdict::Both;
  } else if (r.alt_a) {
    r.verdict = DichotomyVerdict::A;
  } else if (r.alt_b) {
    r.verdict = DichotomyVerdict::B;
  } else {
    r.verdict = DichotomyVerdict::Neither;
  }
  return r;
}

IterationTrace improvement_iterate(const YoungFunction& F, const ScalarField& u,
                                   std::optional<Point> q0, double rho, double alpha,
                                   double epsilon, int K, Ball ball) {
  if (!(rho > 0.0 && rho < 1.0)) throw PreconditionError("improvement_iterate needs rho in (0, 1)");
  if (!(alpha > 0.0)) throw PreconditionError("improvement_iterate needs alpha > 0");
  const Grid& g = u.grid();
  const int dim = g.dim();
  IterationTrace tr;
  const double tau = (F.delta() + 1.0) / (F.g0() + 1.0);
  const Region b1 = probe_ball(g, ball);
  const auto level = avg_energy_level(F, u, b1);
  const auto cv = u.cell_values();
  tr.b_intercept = average(g, cv, b1);
  const double Ga = level.G_of_a;
  const double a = level.a;

  Point q = q0.value_or(best_slope(F, u, b1));
  for (int k = 0; k <= K; ++k) {
    const double radius = ball.radius * std::pow(rho, k);
    if (radius < 4.0 * g.h()) {
      tr.truncated = true;
      break;
    }
    IterationState s;
    s.k = k;
    s.radius = radius;
    s.rho = rho;
    s.alpha = alpha;
    s.tau = tau;
    s.q_k = q;
    s.a_level = a;
    s.level_sigma = std::pow(Ga, 1.0 / (F.g0() + 1.0));
    const Region bk = Region::ball(g, ball.center, radius);
    s.flatness_k = flatness(F, u, q, bk);
    s.flat_bound = std::pow(rho, k * alpha * (F.delta() + 1.0)) *
                   std::pow(epsilon, F.delta() + 1.0) * Ga;
    s.avg_energy = flatness(F, u, {0.0, 0.0}, bk);
    const double qn = norm(q, dim);
    s.sandwich_ok = F.G(0.5 * qn) <= s.avg_energy && s.avg_energy <= 2.0 * F.G(qn);
    s.drift_scale = a * std::pow(epsilon, tau) * std::pow(rho, k * alpha * tau);
    const double next_radius = radius * rho;
    if (next_radius >= 4.0 * g.h() && k < K) {
      const Point qn1 = best_slope(F, u, Region::ball(g, ball.center, next_radius));
      s.drift = norm({qn1[0] - q[0], qn1[1] - q[1]}, dim);
      q = qn1;
    } else {
      s.drift = kNaN;
    }
    tr.states.push_back(s);
  }

  std::vector<double> lx, ly, dk, dl;
  for (const auto& s : tr.states) {
    if (s.flatness_k > 0.0) {
      lx.push_back(std::log(s.radius));
      ly.push_back(std::log(s.flatness_k));
    }
    if (std::isfinite(s.drift)) {
      tr.drift_sum += s.drift;
      if (s.drift_scale > 0.0) tr.C_tilde = std::max(tr.C_tilde, s.drift / s.drift_scale);
      if (s.drift > 0.0) {
        dk.push_back(static_cast<double>(s.k));
        dl.push_back(std::log(s.drift));
      }
    }
  }
  if (lx.size() >= 2) {
    const auto fit = detail::linear_fit(lx, ly);
    tr.alpha_hat = fit.slope / (F.delta() + 1.0);
    tr.alpha_fit_r2 = fit.r_squared;
  }
  if (dk.size() >= 2) tr.drift_ratio = std::exp(detail::linear_fit(dk, dl).slope);
  const double geo = std::pow(rho, alpha * tau);
  tr.drift_series_bound = tr.C_tilde * a * std::pow(epsilon, tau) / (1.0 - geo);
  return tr;
}

std::vector<Point> default_centers(const Grid& g, const Region& domain, int stride) {
  std::vector<Point> out;
  const std::size_t nx = g.nodes(0);
  for (std::size_t n : region_nodes(g, domain)) {
    const std::size_t i = n % nx;
    const std::size_t j = n / nx;
    if (i % static_cast<std::size_t>(stride) == 0 && j % static_cast<std::size_t>(stride) == 0) {
      out.push_back(g.node_point(n));
    }
  }
  return out;
}

std::vector<double> default_radii(const Grid& g, const Region& domain) {
  Point lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Point hi{-lo[0], -lo[1]};
  for (std::size_t c : domain.cells()) {
    const Point x = g.cell_center(c);
    for (int a = 0; a < g.dim(); ++a) {
      const auto k = static_cast<std::size_t>(a);
      lo[k] = std::min(lo[k], x[k] - 0.5 * g.h());
      hi[k] = std::max(hi[k], x[k] + 0.5 * g.h());
    }
  }
  double side = hi[0] - lo[0];
  if (g.dim() == 2) side = std::min(side, hi[1] - lo[1]);
  std::vector<double> out;
  for (double r = 8.0 * g.h(); r <= 0.5 * side * (1.0 + 1e-12); r *= 2.0) out.push_back(r);
  return out;
}

namespace {

struct LocalSample {
  std::vector<double> values;  // u at cell centers
  std::vector<double> weights;
  double wsum = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

LocalSample gather(const Region& b, const std::vector<double>& cv) {
  LocalSample s;
  s.lo = std::numeric_limits<double>::infinity();
  s.hi = -s.lo;
  const auto w = b.weights();
  for (std::size_t k = 0; k < b.size(); ++k) {
    const double v = cv[b.cells()[k]];
    s.values.push_back(v);
    s.weights.push_back(w[k]);
    s.wsum += w[k];
    s.lo = std::min(s.lo, v);
    s.hi = std::max(s.hi, v);
  }
  return s;
}

// shifted by the first value so that constants average to themselves exactly
double mean(const LocalSample& s) {
  if (s.values.empty()) return 0.0;
  const double v0 = s.values.front();
  detail::CompensatedSum acc;
  for (std::size_t k = 0; k < s.values.size(); ++k) acc += s.weights[k] * (s.values[k] - v0);
  return v0 + acc.value() / s.wsum;
}

// sum w G(|v - xi|) (without the cell volume)
double modular_about(const YoungFunction& F, const LocalSample& s, double xi) {
  detail::CompensatedSum acc;
  for (std::size_t k = 0; k < s.values.size(); ++k) acc += s.weights[k] * F.G(std::abs(s.values[k] - xi));
  return acc.value();
}

}  // namespace

CampanatoReport campanato_seminorm(const YoungFunction& F, const ScalarField& u,
                                   const Region& domain, double lambda,
                                   const std::vector<Point>& centers,
                                   const std::vector<double>& radii, CampanatoMode mode) {
  const Grid& g = u.grid();
  const int n = g.dim();
  if (lambda < n) throw PreconditionError("campanato_seminorm requires lambda >= n");
  CampanatoReport rep;
  rep.lambda = lambda;
  rep.gamma = (lambda - n) / (F.g0() + 1.0);
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;
  rep.upd_constant = std::numeric_limits<double>::infinity();
  const auto cv = u.cell_values();
  const double vol = g.cell_volume();
  for (const Point& x0 : centers) {
    for (double r : radii) {
      const Region b = Region::ball(g, x0, r).intersect(domain);
      if (b.empty()) {
        ++rep.skipped;
        continue;
      }
      const LocalSample s = gather(b, cv);
      CampanatoRow row;
      row.x0 = x0;
      row.radius = r;
      row.measure = s.wsum * vol;
      const double scale = std::pow(r, -lambda) * vol;
      const double avg_int = modular_about(F, s, mean(s));
      row.avg_value = scale * avg_int;
      double inf_int = avg_int;
      if (s.hi > s.lo) {
        const auto [xi, val] = detail::golden_section(
            [&](double xi) { return modular_about(F, s, xi); }, s.lo, s.hi,
            1e-10 * (s.hi - s.lo));
        (void)xi;
        inf_int = std::min(val, avg_int);
      }
      row.inf_value = scale * inf_int;
      rep.seminorm_avg = std::max(rep.seminorm_avg, row.avg_value);
      rep.seminorm_inf = std::max(rep.seminorm_inf, row.inf_value);
      if (row.inf_value > 0.0) {
        const double ratio = row.avg_value / row.inf_value;
        rep.min_ratio = std::min(rep.min_ratio, ratio);
        rep.max_ratio = std::max(rep.max_ratio, ratio);
      }
      rep.upd_constant = std::min(rep.upd_constant, row.measure / (unit_ball_volume(n) * std::pow(r, n)));
      rep.rows.push_back(row);
    }
  }
  if (rep.max_ratio == 0.0) rep.min_ratio = rep.max_ratio = 1.0;
  if (!std::isfinite(rep.upd_constant)) rep.upd_constant = 0.0;
  rep.upd_constant = std::min(rep.upd_constant, 1.0);
  rep.seminorm = mode == CampanatoMode::AvgCentered ? rep.seminorm_avg : rep.seminorm_inf;
  return rep;
}

double holder_seminorm(const ScalarField& u, const Region& domain, double gamma) {
  const Grid& g = u.grid();
  auto nodes = region_nodes(g, domain);
  if (nodes.size() > 10000) {
    const std::size_t stride = (nodes.size() + 9999) / 10000;
    std::vector<std::size_t> sub;
    for (std::size_t i = 0; i < nodes.size(); i += stride) sub.push_back(nodes[i]);
    nodes.swap(sub);
  }
  std::vector<Point> x(nodes.size());
  std::vector<double> v(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    x[i] = g.node_point(nodes[i]);
    v[i] = u[nodes[i]];
  }
  double best = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double d = norm({x[i][0] - x[j][0], x[i][1] - x[j][1]}, g.dim());
      best = std::max(best, std::abs(v[i] - v[j]) / std::pow(d, gamma));
    }
  }
  return best;
}

CampanatoReport holder_certificate(const YoungFunction& F, const ScalarField& u,
                                   const Region& domain, double lambda) {
  const Grid& g = u.grid();
  if (!(lambda > g.dim())) throw PreconditionError("holder_certificate requires lambda > n");
  auto rep = campanato_seminorm(F, u, domain, lambda, default_centers(g, domain),
                                default_radii(g, domain), CampanatoMode::InfOverXi);
  rep.holder_seminorm = holder_seminorm(u, domain, rep.gamma);
  if (rep.seminorm_inf > 0.0) {
    rep.fitted_C = rep.holder_seminorm / F.inverse_G(rep.seminorm_inf);
  } else {
    rep.fitted_C = rep.holder_seminorm == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return rep;
}

BmoReport bmo_star_seminorm(const YoungFunction& F, const ScalarField& u, const Region& domain,
                            std::optional<double> upd_constant, const std::vector<Point>& centers_in,
                            const std::vector<double>& radii_in) {
  const Grid& g = u.grid();
  const int n = g.dim();
  const double wn = unit_ball_volume(n);
  const auto centers = centers_in.empty() ? default_centers(g, domain) : centers_in;
  const auto radii = radii_in.empty() ? default_radii(g, domain) : radii_in;
  const auto cv = u.cell_values();
  const double vol = g.cell_volume();
  BmoReport rep;
  rep.empirical_c0 = std::numeric_limits<double>::infinity();
  for (const Point& x0 : centers) {
    for (double r : radii) {
      const Region b = Region::ball(g, x0, r).intersect(domain);
      if (b.empty()) continue;
      const LocalSample s = gather(b, cv);
      const double avg = mean(s);
      BmoRow row;
      row.x0 = x0;
      row.radius = r;
      detail::CompensatedSum osc;
      for (std::size_t k = 0; k < s.values.size(); ++k) osc += s.weights[k] * std::abs(s.values[k] - avg);
      row.mean_osc = osc.value() / s.wsum;
      row.density = s.wsum * vol / (wn * std::pow(r, n));
      row.phi_n = std::pow(r, -n) * vol * modular_about(F, s, avg);
      rep.empirical_c0 = std::min(rep.empirical_c0, row.density);
      rep.rows.push_back(row);
    }
  }
  if (rep.rows.empty()) throw PreconditionError("bmo_star_seminorm: no sampled ball meets the domain");
  rep.upd_constant = upd_constant.value_or(rep.empirical_c0);
  if (!(rep.upd_constant > 0.0)) throw PreconditionError("bmo_star_seminorm: c0 must be positive");
  for (auto& row : rep.rows) {
    if (row.density < rep.upd_constant * (1.0 - 1e-12)) {
      rep.upd_violations.push_back("density " + std::to_string(row.density) + " at (" +
                                   std::to_string(row.x0[0]) + ", " + std::to_string(row.x0[1]) +
                                   "), radius " + std::to_string(row.radius));
    }
    row.bound = F.inverse_G(row.phi_n / (rep.upd_constant * wn));
    row.holds = row.mean_osc <= row.bound * (1.0 + 1e-12) + 1e-15;
    rep.bmo = std::max(rep.bmo, row.mean_osc);
    rep.phi_n = std::max(rep.phi_n, row.phi_n);
    if (!row.holds) rep.holds = false;
  }
  rep.bound = F.inverse_G(rep.phi_n / (rep.upd_constant * wn));
  if (rep.bmo > rep.bound * (1.0 + 1e-12) + 1e-15) rep.holds = false;
  return rep;
}

LipschitzReport lipschitz_certificate(const YoungFunction& F, const ScalarField& u, double eta,
                                      double M_threshold, int K, Ball ball, double epsilon) {
  if (!(eta > 0.0 && eta < 1.0)) throw PreconditionError("lipschitz_certificate needs eta in (0, 1)");
  const Grid& g = u.grid();
  const int n = g.dim();
  LipschitzReport rep;
  double G1 = 0.0;
  for (int k = 0; k <= K; ++k) {
    LipschitzStep s;
    s.k = k;
    s.radius = ball.radius * std::pow(eta, k);
    const Region bk = probe_ball(g, {ball.center, s.radius});
    s.G_of_a = flatness(F, u, {0.0, 0.0}, bk);
    if (k == 0) G1 = s.G_of_a;
    s.recurrence_rhs = std::pow(eta, -n) * M_threshold + std::pow(2.0, -k) * G1;
    s.recurrence_ok = s.G_of_a <= s.recurrence_rhs * (1.0 + 1e-12);
    s.above_M = s.G_of_a > M_threshold;
    if (s.above_M) {
      DichotomyParams p;
      p.epsilon = epsilon;
      p.eta = eta;
      p.M_threshold = M_threshold;
      p.sigma = std::pow(eta, n + 1);
      p.ball = {ball.center, s.radius};
      s.dichotomy = dichotomy_probe(F, u, p).verdict;
    }
    if (!s.recurrence_ok) rep.recurrence_ok = false;
    rep.steps.push_back(s);
  }
  const Region half = probe_ball(g, {ball.center, 0.5 * ball.radius});
  for (std::size_t c : half.cells()) {
    rep.grad_sup_half = std::max(rep.grad_sup_half, norm(cell_gradient(g, u.values(), c), n));
  }
  const Region b1 = probe_ball(g, ball);
  std::vector<double> e(g.cell_count(), 0.0);
  for (std::size_t c : b1.cells()) e[c] = F.G(norm(cell_gradient(g, u.values(), c), n));
  rep.energy_B1 = integrate(g, e, b1);
  rep.ratio = rep.grad_sup_half / F.inverse_G(1.0 + rep.energy_B1);
  rep.completed = true;
  return rep;
}

}  // namespace ogr
