#include "ogr/analytic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "ogr/error.hpp"

namespace ogr {

std::vector<std::string> analytic_ids() {
  return {"zero",         "constant",     "linear",         "sqrt_abs",
          "abs_power",    "one_phase",    "perturbed_linear", "tilted_power",
          "annulus_radial", "annulus_step", "smooth_random"};
}

std::function<double(const Point&)> analytic_function(const std::string& id, int dim,
                                                      const AnalyticParams& P) {
  const auto r = [dim](const Point& x) { return norm(x, dim); };
  const auto lin = [dim, P](const Point& x) {
    return P.q[0] * x[0] + (dim == 2 ? P.q[1] * x[1] : 0.0) + P.b;
  };
  if (id == "zero") return [](const Point&) { return 0.0; };
  if (id == "constant") return [P](const Point&) { return P.b; };
  if (id == "linear") return lin;
  if (id == "sqrt_abs") return [r](const Point& x) { return std::sqrt(r(x)); };
  if (id == "abs_power") return [r, P](const Point& x) { return std::pow(r(x), P.s); };
  if (id == "one_phase") return [](const Point& x) { return std::max(x[0], 0.0); };
  if (id == "perturbed_linear") {
    return [r, lin, P](const Point& x) { return lin(x) + P.c * std::pow(r(x), 1.0 + P.s); };
  }
  if (id == "tilted_power") {
    // The radial perturbation is symmetric, so best slopes of concentric balls
    // never move; the x_1 term makes the slope drift observable.
    return [r, lin, P](const Point& x) {
      const double d = r(x);
      return lin(x) + P.c * std::pow(d, P.s) * (d + 0.5 * x[0]);
    };
  }
  if (id == "annulus_radial") {
    if (!(P.r_in > 0.0 && P.r_out > P.r_in)) throw PreconditionError("annulus_radial needs 0 < r_in < r_out");
    if (!(P.p > 1.0)) throw PreconditionError("annulus_radial needs p > 1");
    // Radial solutions of the p-Laplacian: r^{(p-n)/(p-1)}, or log r when p = n.
    const double e = (P.p - dim) / (P.p - 1.0);
    const auto prof = [e](double d) { return std::abs(e) < 1e-14 ? std::log(d) : std::pow(d, e); };
    const double lo = prof(P.r_in);
    const double hi = prof(P.r_out);
    return [r, prof, lo, hi](const Point& x) {
      const double d = r(x);
      return d > 0.0 ? (prof(d) - lo) / (hi - lo) : 0.0;
    };
  }
  if (id == "annulus_step") {
    const double mid = 0.5 * (P.r_in + P.r_out);
    return [r, mid](const Point& x) { return r(x) < mid ? 0.0 : 1.0; };
  }
  if (id == "smooth_random") {
    std::mt19937_64 rng(P.seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_real_distribution<double> freq(0.5, 3.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    struct Mode {
      double a, wx, wy, phi;
    };
    std::vector<Mode> modes;
    for (int k = 0; k < P.modes; ++k) {
      const double a = amp(rng);
      const double wx = freq(rng);
      const double wy = dim == 2 ? freq(rng) * (amp(rng) < 0 ? -1.0 : 1.0) : 0.0;
      modes.push_back({a, wx, wy, phase(rng)});
    }
    return [modes, P, dim](const Point& x) {
      double v = P.q[0] * x[0] + (dim == 2 ? P.q[1] * x[1] : 0.0);
      for (const auto& m : modes) v += m.a * std::sin(m.wx * x[0] + m.wy * x[1] + m.phi);
      return v;
    };
  }
  throw PreconditionError("unknown analytic field '" + id + "'");
}

ScalarField analytic_field(const std::string& id, const Grid& g, const AnalyticParams& params) {
  return ScalarField::from_function(g, analytic_function(id, g.dim(), params));
}

}  // namespace ogr
