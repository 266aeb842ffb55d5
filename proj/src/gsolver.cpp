#include "ogr/gsolver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>

#include "ogr/detail/numeric.hpp"

namespace ogr {

Point flux(const YoungFunction& F, const Point& z, int dim, double eps_reg) {
  const double zz = dim == 2 ? z[0] * z[0] + z[1] * z[1] : z[0] * z[0];
  if (zz == 0.0) return {0.0, 0.0};
  const double m = std::sqrt(zz + eps_reg * eps_reg);
  const double s = F.g(m) / m;
  return {s * z[0], dim == 2 ? s * z[1] : 0.0};
}

namespace {

constexpr double kTiny = 1e-300;

// Energy, gradient and Hessian of sum_c w_c h^n G(sqrt(|B_c u|^2 + eps^2)) in
// the interior node values. Cell gradients B_c are the same operator as
// field's cell_gradient, so the solver minimizes exactly the energy that the
// rest of the library measures.
class Assembly {
 public:
  Assembly(const YoungFunction& F, const Grid& g, const Region& region)
      : F_(F), g_(g), region_(region), k_(g.corners_per_cell()), vol_(g.cell_volume()) {
    const double h = g.h();
    if (g.dim() == 1) {
      bx_ = {-1.0 / h, 1.0 / h, 0.0, 0.0};
      by_ = {0.0, 0.0, 0.0, 0.0};
    } else {
      bx_ = {-0.5 / h, 0.5 / h, -0.5 / h, 0.5 / h};
      by_ = {-0.5 / h, -0.5 / h, 0.5 / h, 0.5 / h};
    }
    const auto bnodes = boundary_nodes(g, region);
    const auto rnodes = region_nodes(g, region);
    unknown_.assign(g.node_count(), -1);
    std::vector<std::uint8_t> is_boundary(g.node_count(), 0);
    for (std::size_t n : bnodes) is_boundary[n] = 1;
    for (std::size_t n : rnodes) {
      if (!is_boundary[n]) {
        unknown_[n] = static_cast<int>(nodes_.size());
        nodes_.push_back(n);
      }
    }
    boundary_ = bnodes;
    build_pattern();
  }

  std::size_t size() const { return nodes_.size(); }
  const std::vector<std::size_t>& nodes() const { return nodes_; }
  const std::vector<std::size_t>& boundary() const { return boundary_; }
  Eigen::SparseMatrix<double>& hessian() { return H_; }

  Point cell_z(const std::vector<double>& u, std::size_t cell) const {
    const auto n = g_.cell_corners(cell);
    Point z{0.0, 0.0};
    for (int a = 0; a < k_; ++a) {
      const double v = u[n[static_cast<std::size_t>(a)]];
      z[0] += bx_[static_cast<std::size_t>(a)] * v;
      z[1] += by_[static_cast<std::size_t>(a)] * v;
    }
    return z;
  }

  // quadratic: G(t) = t^2 / 2 (Laplace initialization).
  double energy(const std::vector<double>& u, double eps, bool quadratic = false) const {
    detail::CompensatedSum s;
    const auto cells = region_.cells();
    const auto w = region_.weights();
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const Point z = cell_z(u, cells[k]);
      const double m2 = z[0] * z[0] + z[1] * z[1] + eps * eps;
      s += w[k] * (quadratic ? 0.5 * m2 : F_.G(std::sqrt(m2)));
    }
    return s.value() * vol_;
  }

  // Gradient (always) and Hessian values (when `hess`), with the curvature
  // coefficients evaluated at max(m, m_floor).
  void derivatives(const std::vector<double>& u, double eps, double m_floor, bool quadratic,
                   Eigen::VectorXd& grad, bool hess) {
    grad.setZero(static_cast<Eigen::Index>(nodes_.size()));
    if (hess) std::fill(H_.valuePtr(), H_.valuePtr() + H_.nonZeros(), 0.0);
    const auto cells = region_.cells();
    const auto w = region_.weights();
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const std::size_t c = cells[k];
      const auto n = g_.cell_corners(c);
      const Point z = cell_z(u, c);
      const double zz = z[0] * z[0] + z[1] * z[1];
      double flux_coef = 0.0;  // F(z) = flux_coef * z
      double a = 0.0;          // curvature: a z z^T + b I
      double b = 0.0;
      if (quadratic) {
        flux_coef = 1.0;
        b = 1.0;
      } else {
        const double m = std::sqrt(zz + eps * eps);
        flux_coef = m > 0.0 ? F_.g(m) / m : 0.0;
        if (hess) {
          const double mh = std::max(m, m_floor);
          const double gm = F_.g(mh);
          b = gm / mh;
          a = mh > 0.0 ? (F_.dg(mh) / (mh * mh) - gm / (mh * mh * mh)) : 0.0;
        }
      }
      const double scale = w[k] * vol_;
      for (int p = 0; p < k_; ++p) {
        const int ip = unknown_[n[static_cast<std::size_t>(p)]];
        if (ip < 0) continue;
        const double bxp = bx_[static_cast<std::size_t>(p)];
        const double byp = by_[static_cast<std::size_t>(p)];
        grad[ip] += scale * flux_coef * (bxp * z[0] + byp * z[1]);
      }
      if (!hess) continue;
      // M = a z z^T + b I; local entry B_p^T M B_q.
      const double m00 = a * z[0] * z[0] + b;
      const double m01 = a * z[0] * z[1];
      const double m11 = a * z[1] * z[1] + b;
      const std::size_t base = k * static_cast<std::size_t>(k_ * k_);
      for (int p = 0; p < k_; ++p) {
        const double bxp = bx_[static_cast<std::size_t>(p)];
        const double byp = by_[static_cast<std::size_t>(p)];
        const double mp0 = m00 * bxp + m01 * byp;
        const double mp1 = m01 * bxp + m11 * byp;
        for (int q = 0; q < k_; ++q) {
          const std::ptrdiff_t pos = slot_[base + static_cast<std::size_t>(p * k_ + q)];
          if (pos < 0) continue;
          H_.valuePtr()[pos] +=
              scale * (mp0 * bx_[static_cast<std::size_t>(q)] + mp1 * by_[static_cast<std::size_t>(q)]);
        }
      }
    }
  }

 private:
  void build_pattern() {
    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> trips;
    const auto cells = region_.cells();
    trips.reserve(cells.size() * static_cast<std::size_t>(k_ * k_));
    for (std::size_t c : cells) {
      const auto n = g_.cell_corners(c);
      for (int p = 0; p < k_; ++p) {
        for (int q = 0; q < k_; ++q) {
          const int ip = unknown_[n[static_cast<std::size_t>(p)]];
          const int iq = unknown_[n[static_cast<std::size_t>(q)]];
          if (ip >= 0 && iq >= 0) trips.emplace_back(ip, iq, 1.0);
        }
      }
    }
    const auto N = static_cast<Eigen::Index>(nodes_.size());
    H_.resize(N, N);
    H_.setFromTriplets(trips.begin(), trips.end());
    H_.makeCompressed();
    slot_.assign(cells.size() * static_cast<std::size_t>(k_ * k_), -1);
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const auto n = g_.cell_corners(cells[k]);
      for (int p = 0; p < k_; ++p) {
        for (int q = 0; q < k_; ++q) {
          const int ip = unknown_[n[static_cast<std::size_t>(p)]];
          const int iq = unknown_[n[static_cast<std::size_t>(q)]];
          if (ip < 0 || iq < 0) continue;
          // column-major: find row ip inside column iq
          const auto* outer = H_.outerIndexPtr();
          const auto* inner = H_.innerIndexPtr();
          const auto* first = inner + outer[iq];
          const auto* last = inner + outer[iq + 1];
          const auto* it = std::lower_bound(first, last, ip);
          slot_[k * static_cast<std::size_t>(k_ * k_) + static_cast<std::size_t>(p * k_ + q)] =
              it - inner;
        }
      }
    }
  }

  const YoungFunction& F_;
  const Grid& g_;
  const Region& region_;
  int k_;
  double vol_;
  std::array<double, 4> bx_{};
  std::array<double, 4> by_{};
  std::vector<int> unknown_;
  std::vector<std::size_t> nodes_;
  std::vector<std::size_t> boundary_;
  Eigen::SparseMatrix<double> H_;
  std::vector<std::ptrdiff_t> slot_;
};

double rms_gradient(const Assembly& A, const std::vector<double>& u, const Region& region) {
  detail::CompensatedSum s;
  double wsum = 0.0;
  const auto cells = region.cells();
  const auto w = region.weights();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const Point z = A.cell_z(u, cells[k]);
    s += w[k] * (z[0] * z[0] + z[1] * z[1]);
    wsum += w[k];
  }
  return wsum > 0.0 ? std::sqrt(s.value() / wsum) : 0.0;
}

// max |dE/du_i| relative to the size h^{n-1} g(a_ref) of a single cell's flux
// contribution at the current gradient level.
double scaled_residual(const YoungFunction& F, const Grid& g, const Eigen::VectorXd& grad,
                       double a_ref) {
  const double gmax = grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0;
  if (gmax == 0.0) return 0.0;
  const double hn1 = g.dim() == 2 ? g.h() : 1.0;
  const double scale = a_ref > 0.0 ? hn1 * F.g(a_ref) : 1.0;
  return gmax / scale;
}

}  // namespace

std::vector<double> boundary_values(const DirichletProblem& P) {
  const auto b = boundary_nodes(P.data.grid(), P.region);
  std::vector<double> out;
  out.reserve(b.size());
  for (std::size_t n : b) out.push_back(P.data[n]);
  return out;
}

double dirichlet_energy(const YoungFunction& F, const ScalarField& u, const Region& region) {
  Assembly A(F, u.grid(), region);
  std::vector<double> v(u.values().begin(), u.values().end());
  return A.energy(v, 0.0);
}

SolveResult solve(const DirichletProblem& P) {
  const Grid& g = P.data.grid();
  if (P.region.empty()) throw PreconditionError("solve: empty region");
  const double eps1 = P.eps_reg.value_or(g.h() / 10.0);
  if (eps1 < 0.0) throw PreconditionError("solve: eps_reg must be >= 0");
  Assembly A(P.F, g, P.region);
  if (A.boundary().empty()) throw PreconditionError("solve: region has no boundary nodes");

  SolveResult res;
  std::vector<double> u(P.data.values().begin(), P.data.values().end());
  const auto N = static_cast<Eigen::Index>(A.size());
  if (N == 0) {
    res.u = P.data;
    res.energy = A.energy(u, 0.0);
    res.converged = true;
    return res;
  }

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  ldlt.analyzePattern(A.hessian());
  Eigen::VectorXd grad(N);
  Eigen::VectorXd dir(N);

  auto apply = [&](const std::vector<double>& base, const Eigen::VectorXd& d, double t,
                   std::vector<double>& out) {
    out = base;
    for (Eigen::Index i = 0; i < N; ++i) out[A.nodes()[static_cast<std::size_t>(i)]] += t * d[i];
  };

  if (!P.warm_start) {
    for (std::size_t n : A.nodes()) u[n] = 0.0;
    A.derivatives(u, 0.0, 0.0, true, grad, true);
    ldlt.factorize(A.hessian());
    if (ldlt.info() == Eigen::Success) {
      dir = ldlt.solve(-grad);
      std::vector<double> tmp;
      apply(u, dir, 1.0, tmp);
      u.swap(tmp);
    }
  }

  std::vector<double> trial;
  int total = 0;
  for (int stage = 1; stage <= 2; ++stage) {
    const double eps = stage == 1 ? eps1 : 0.0;
    if (stage == 1 && eps == 0.0) continue;
    double E = A.energy(u, eps);
    Eigen::VectorXd prev_grad;
    Eigen::VectorXd prev_dir;
    bool prev_fallback = false;
    bool done = false;
    for (int it = 0; it < P.max_iters; ++it) {
      const double a_ref = rms_gradient(A, u, P.region);
      const double m_floor = stage == 2 ? 1e-3 * a_ref : 0.0;
      A.derivatives(u, eps, m_floor, false, grad, true);
      const double resid = scaled_residual(P.F, g, grad, a_ref);
      if (resid == 0.0) {
        done = true;
        break;
      }
      ldlt.factorize(A.hessian());
      bool newton = false;
      if (ldlt.info() == Eigen::Success) {
        dir = ldlt.solve(-grad);
        newton = dir.allFinite() && dir.dot(grad) < 0.0;
      }
      if (!newton) {
        // Polak-Ribiere+ nonlinear CG when the Hessian is unusable.
        dir = -grad;
        if (prev_fallback && prev_grad.size() == grad.size()) {
          const double beta =
              std::max(0.0, grad.dot(grad - prev_grad) / std::max(prev_grad.squaredNorm(), kTiny));
          dir += beta * prev_dir;
          if (dir.dot(grad) >= 0.0) dir = -grad;
        }
        ++res.fallback_steps;
      }
      const double slope = dir.dot(grad);
      double t = 1.0;
      double E_new = E;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        apply(u, dir, t, trial);
        E_new = A.energy(trial, eps);
        if (E_new <= E + 1e-4 * t * slope && E_new <= E) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      prev_grad = grad;
      prev_dir = dir;
      prev_fallback = !newton;
      if (!accepted) {
        // No representable decrease left along the best available direction.
        res.log.push_back({++total, stage, E, resid, 0.0});
        done = true;
        break;
      }
      u.swap(trial);
      const double rel = (E - E_new) / std::max(std::abs(E_new), kTiny);
      E = E_new;
      A.derivatives(u, eps, m_floor, false, grad, false);
      const double resid_new = scaled_residual(P.F, g, grad, rms_gradient(A, u, P.region));
      res.log.push_back({++total, stage, E, resid_new, t * dir.cwiseAbs().maxCoeff()});
      if (rel < P.tol && resid_new < P.residual_tol) {
        done = true;
        break;
      }
    }
    if (!done) {
      A.derivatives(u, eps, 0.0, false, grad, false);
      const double r = scaled_residual(P.F, g, grad, rms_gradient(A, u, P.region));
      throw SolverError("g-Laplacian solve exceeded max_iters in stage " + std::to_string(stage),
                        ScalarField(g, u), r);
    }
  }
  A.derivatives(u, 0.0, 0.0, false, grad, false);
  res.residual = scaled_residual(P.F, g, grad, rms_gradient(A, u, P.region));
  res.energy = A.energy(u, 0.0);
  res.iterations = total;
  res.converged = true;
  res.u = ScalarField(g, std::move(u));
  return res;
}

SolveResult harmonic_replacement(const YoungFunction& F, const ScalarField& u, const Region& ball,
                                 const ReplacementOptions& opt) {
  DirichletProblem P{F, ball, u, opt.eps_reg, opt.tol, opt.residual_tol, opt.max_iters, false};
  return solve(P);
}

EnergyGap energy_gap_check(const YoungFunction& F, const ScalarField& u, const Region& ball,
                           const ReplacementOptions& opt, double tol) {
  EnergyGap out;
  auto rep = harmonic_replacement(F, u, ball, opt);
  const Grid& g = u.grid();
  std::vector<double> diff(u.values().begin(), u.values().end());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= rep.u[i];
  const auto gd = gradient(ScalarField(g, std::move(diff))).magnitudes();
  detail::CompensatedSum lhs;
  for (std::size_t k = 0; k < ball.size(); ++k) lhs += ball.weights()[k] * F.G(gd[ball.cells()[k]]);
  out.lhs = lhs.value() * g.cell_volume();
  out.rhs = dirichlet_energy(F, u, ball) - rep.energy;
  out.minimal = out.rhs >= -tol;
  out.ratio = out.rhs > tol ? out.lhs / out.rhs : std::numeric_limits<double>::quiet_NaN();
  out.replacement = std::move(rep.u);
  return out;
}

EllipticityProbe EllipticityProbe::make(const YoungFunction& F, int dim, Point q,
                                        std::function<Point(const Point&)> h_field) {
  if (norm(q, dim) == 0.0) throw PreconditionError("ellipticity probe needs |q| > 0");
  EllipticityProbe p;
  p.dim = dim;
  p.q = q;
  p.h_field = std::move(h_field);
  p.lambda_lower = std::pow(2.0, 1.0 - F.g0()) * F.delta();
  p.Lambda_upper = std::pow(1.5, F.g0() - 1.0) * F.g0();
  return p;
}

namespace {

template <unsigned N>
std::vector<std::pair<double, double>> unit_rule() {
  using Rule = boost::math::quadrature::gauss<double, N>;
  std::vector<std::pair<double, double>> out;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.emplace_back(0.5 * (1.0 + x[i]), 0.5 * w[i]);
    if (x[i] != 0.0) out.emplace_back(0.5 * (1.0 - x[i]), 0.5 * w[i]);
  }
  return out;
}

}  // namespace

Eigen::MatrixXd ellipticity_matrix(const YoungFunction& F, int dim, const Point& q, const Point& hx,
                                   int quad_points) {
  const double nq = norm(q, dim);
  if (!(norm(hx, dim) < 0.5 * nq)) {
    throw PreconditionError("ellipticity_matrix requires |h(x)| < |q| / 2");
  }
  std::vector<std::pair<double, double>> rule;
  switch (quad_points) {
    case 8: rule = unit_rule<8>(); break;
    case 16: {
      const auto r = detail::gauss_legendre16_unit();
      rule.assign(r.begin(), r.end());
      break;
    }
    case 32: rule = unit_rule<32>(); break;
    default: throw PreconditionError("ellipticity_matrix supports 8, 16 or 32 quadrature points");
  }
  Eigen::MatrixXd Am = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& [t, w] : rule) {
    Eigen::Vector2d z(q[0] + t * hx[0], dim == 2 ? q[1] + t * hx[1] : 0.0);
    const double m = z.head(dim).norm();
    const double gm = F.g(m);
    const double a = F.dg(m) - gm / m;  // (z.xi)^2 / |z|^2 coefficient
    Eigen::MatrixXd D = (gm / m) * Eigen::MatrixXd::Identity(dim, dim);
    D += (a / (m * m)) * z.head(dim) * z.head(dim).transpose();
    Am += w * D;
  }
  return 0.5 * (Am + Am.transpose());
}

Eigen::MatrixXd ellipticity_matrix(const YoungFunction& F, const EllipticityProbe& probe,
                                   const Point& x, int quad_points) {
  const Point hx = probe.h_field ? probe.h_field(x) : Point{0.0, 0.0};
  return ellipticity_matrix(F, probe.dim, probe.q, hx, quad_points);
}

InteriorEstimates interior_estimates_probe(const YoungFunction& F, const ScalarField& v,
                                           const Point& center, double R) {
  InteriorEstimates out;
  const Grid& g = v.grid();
  const auto grad = gradient(v).magnitudes();
  std::vector<double> energy(grad.size());
  for (std::size_t c = 0; c < grad.size(); ++c) energy[c] = F.G(grad[c]);

  const Region quarter = Region::ball(g, center, R / 4.0);
  const Region half = Region::ball(g, center, R / 2.0);
  if (quarter.empty() || half.empty()) throw PreconditionError("interior_estimates_probe: ball too small");
  double sup = 0.0;
  for (std::size_t c : quarter.cells()) sup = std::max(sup, energy[c]);
  const double avg = average(g, energy, half);
  if (avg == 0.0) {
    out.sup_avg_ratio = 1.0;
    out.degenerate = true;
  } else {
    out.sup_avg_ratio = sup / avg;
  }

  std::vector<double> lx;
  std::vector<double> ly;
  for (double rho = R / 2.0; rho >= 4.0 * g.h(); rho *= 0.5) {
    const Region b = Region::ball(g, center, rho);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t c : b.cells()) {
      lo = std::min(lo, grad[c]);
      hi = std::max(hi, grad[c]);
    }
    const double osc = hi - lo;
    out.osc_trace.emplace_back(rho, osc);
    if (osc > 0.0) {
      lx.push_back(std::log(rho));
      ly.push_back(std::log(osc));
    }
  }
  if (lx.size() >= 2) {
    const auto fit = detail::linear_fit(lx, ly);
    out.alpha_hat = fit.slope;
    out.r_squared = fit.r_squared;
  } else {
    out.degenerate = true;
  }
  return out;
}

}  // namespace ogr
