// Acceptance driver: `acceptance N` checks criterion N and prints one line.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "ogr/analytic.hpp"
#include "ogr/bernoulli.hpp"
#include "ogr/gsolver.hpp"
#include "ogr/probes.hpp"
#include "ogr/young.hpp"

using namespace ogr;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Grid square(double h) { return Grid::box(2, h, {-1.0, -1.0}, {1.0, 1.0}); }

Outcome young_calculus() {
  bool ok = true;
  double worst_index = 0.0, worst_trip = 0.0;
  std::size_t doubling_violations = 0;
  for (double p : {2.5, 3.0, 4.0}) {
    const auto F = YoungFunction::power(p);
    const auto idx = lieberman_indices(F, 1e-3, 1e3, 1000);
    worst_index = std::max({worst_index, std::abs(idx.delta_hat - (p - 1)), std::abs(idx.g0_hat - (p - 1))});
    for (int i = 0; i <= 1000; ++i) {
      const double t = std::pow(10.0, -3.0 + 6.0 * i / 1000.0);
      worst_trip = std::max(worst_trip, std::abs(F.inverse_G(F.G(t)) - t) / t);
    }
    const auto d = check_doubling(F, 1000);
    doubling_violations += d.violations.size();
    ok = ok && d.ok;
  }
  ok = ok && worst_index <= 1e-6 && worst_trip <= 1e-8;
  return {ok, fmt("index error %.2e, round trip %.2e, doubling violations %zu", worst_index, worst_trip,
                  doubling_violations)};
}

Outcome complementary_oracle() {
  const auto F = YoungFunction::power(3.0);
  const double v = F.complementary(3.0);
  // brute force sup_a 3a - a^3 on a uniform grid
  double brute = 0.0;
  for (int i = 0; i <= 300000; ++i) {
    const double a = 3.0 * i / 300000.0;
    brute = std::max(brute, 3.0 * a - a * a * a);
  }
  const bool ok = std::abs(v - 2.0) <= 1e-6 && std::abs(v - brute) <= 1e-4;
  return {ok, fmt("G~(3) = %.12f, brute force %.12f", v, brute)};
}

Outcome replacement_1d() {
  const auto g = Grid::box(1, 1.0 / 1023, {0.0, 0.0}, {1.0, 0.0});
  const auto full = Region::full(g);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> end(-2.0, 2.0);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  double worst = 0.0;
  for (const auto& F : {YoungFunction::power(3.0), YoungFunction::plog(3.0)}) {
    for (int pair = 0; pair < 20; ++pair) {
      const double a = end(rng), b = end(rng);
      std::vector<double> v(g.node_count());
      for (double& x : v) x = noise(rng);
      v.front() = a;
      v.back() = b;
      const auto r = harmonic_replacement(F, ScalarField(g, std::move(v)), full);
      for (std::size_t n = 0; n < g.node_count(); ++n) {
        const double x = g.node_point(n)[0];
        worst = std::max(worst, std::abs(r.u[n] - (a + (b - a) * x)));
      }
    }
  }
  return {worst <= 1e-6, fmt("max L-inf error %.2e over 40 replacements", worst)};
}

double annulus_error(double h, const std::string& data_id) {
  const auto F = YoungFunction::power(3.0);
  const auto g = square(h);
  const auto exact = analytic_field("annulus_radial", g);
  const auto region = Region::annulus(g, {0.0, 0.0}, 0.5, 1.0);
  const auto res = solve({F, region, analytic_field(data_id, g)});
  double err = 0.0;
  for (std::size_t n : region_nodes(g, region)) err = std::max(err, std::abs(res.u[n] - exact[n]));
  return err;
}

Outcome radial_oracle() {
  const double e128 = annulus_error(1.0 / 128, "annulus_radial");
  const double e256 = annulus_error(1.0 / 256, "annulus_radial");
  // the 0/1 staircase trace on the lattice, for reference only
  const double s128 = annulus_error(1.0 / 128, "annulus_step");
  const double s256 = annulus_error(1.0 / 256, "annulus_step");
  const bool ok = e128 <= 1e-2 && e256 < e128;
  return {ok, fmt("error %.3e at h=1/128, %.3e at h=1/256 (staircase trace: %.3e, %.3e)", e128, e256, s128, s256)};
}

Outcome energy_gap() {
  const auto F = YoungFunction::power(3.0);
  const auto g64 = square(1.0 / 64);
  const auto g128 = square(1.0 / 128);
  const auto b64 = Region::ball(g64, {0.0, 0.0}, 0.5);
  const auto b128 = Region::ball(g128, {0.0, 0.0}, 0.5);
  double min_rhs = std::numeric_limits<double>::infinity();
  double worst_var = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    AnalyticParams P;
    P.seed = seed;
    const auto a = energy_gap_check(F, analytic_field("smooth_random", g64, P), b64);
    const auto b = energy_gap_check(F, analytic_field("smooth_random", g128, P), b128);
    min_rhs = std::min({min_rhs, a.rhs, b.rhs});
    worst_var = std::max(worst_var, std::abs(b.ratio / a.ratio - 1.0));
  }
  const bool ok = min_rhs >= -1e-10 && worst_var <= 0.3;
  return {ok, fmt("min rhs %.3e, max ratio variation %.1f%%", min_rhs, 100 * worst_var)};
}

Outcome ellipticity() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t below = 0, above = 0;
  double worst_lo = std::numeric_limits<double>::infinity(), worst_hi = 0.0;
  for (int s = 0; s < 10000; ++s) {
    const auto F = YoungFunction::power(s % 2 == 0 ? 3.0 : 4.0);
    const double qn = std::pow(10.0, -1.0 + 2.0 * unit(rng));
    const double qa = 2 * M_PI * unit(rng);
    const Point q{qn * std::cos(qa), qn * std::sin(qa)};
    const double hn = 0.5 * qn * std::sqrt(unit(rng)) * (1.0 - 1e-9);
    const double ha = 2 * M_PI * unit(rng);
    const Point hx{hn * std::cos(ha), hn * std::sin(ha)};
    const double xa = 2 * M_PI * unit(rng);
    const Eigen::Vector2d xi(std::cos(xa), std::sin(xa));

    const auto probe = EllipticityProbe::make(F, 2, q, nullptr);
    const auto A = ellipticity_matrix(F, 2, q, hx);
    const double scale = F.g(qn) / qn;
    const double v = xi.dot(A * xi) / scale;
    worst_lo = std::min(worst_lo, v / probe.lambda_lower);
    worst_hi = std::max(worst_hi, v / probe.Lambda_upper);
    if (v < probe.lambda_lower * (1 - 1e-8)) ++below;
    if (v > probe.Lambda_upper * (1 + 1e-8)) ++above;
  }
  return {below == 0 && above == 0,
          fmt("%zu of 10000 below the lower constant (worst ratio %.4f), %zu above the upper (worst %.4f)", below,
              worst_lo, above, worst_hi)};
}

Outcome scaling() {
  const auto F = YoungFunction::power(3.0);
  const auto g = square(1.0 / 256);
  const std::vector<Point> centers{{0.0, 0.0}, {0.3, -0.2}, {-0.4, 0.5}};
  const std::vector<double> radii{0.2, 0.5};
  const auto smooth = scaling_check(F, analytic_field("smooth_random", g), 0.5, centers, radii);
  const auto lin = ScalarField::from_function(g, [](const Point& x) { return 0.7 * x[0] - 0.4 * x[1] + 0.3; });
  const auto affine = scaling_check(F, lin, 0.5, centers, radii);
  const bool ok = smooth.max_rel_error <= 1e-3 && affine.max_rel_error <= 1e-10;
  return {ok, fmt("smooth %.2e (resampled %.2e), affine %.2e", smooth.max_rel_error,
                  smooth.max_resampled_rel_error, affine.max_rel_error)};
}

Outcome dichotomy() {
  const auto F = YoungFunction::power(3.0);
  const auto g = square(1.0 / 64);
  bool ok = true;
  double worst_flat = 0.0;
  for (const Point& q : {Point{2.0, 1.0}, Point{-3.0, 0.5}, Point{0.0, 4.0}, Point{1.5, -1.5}}) {
    const auto u = ScalarField::from_function(g, [&](const Point& x) { return q[0] * x[0] + q[1] * x[1] + 0.25; });
    const auto r = dichotomy_probe(F, u, {});
    worst_flat = std::max(worst_flat, r.flatness);
    ok = ok && r.verdict == DichotomyVerdict::B && r.flatness <= 1e-12;
  }
  const auto c = dichotomy_probe(F, ScalarField(g, 1.3), {});
  ok = ok && c.degenerate;
  return {ok, fmt("linear flatness %.2e, constant degenerate=%s", worst_flat, c.degenerate ? "yes" : "no")};
}

Outcome iteration() {
  const auto F = YoungFunction::power(3.0);
  const auto g = square(1.0 / 256);
  const double rho = 0.5;
  const double tau = (F.delta() + 1) / (F.g0() + 1);
  bool ok = true;
  std::string detail;
  for (double s : {0.25, 0.5}) {
    AnalyticParams P;
    P.q = {1.0, 0.5};
    P.c = 1.0;
    P.s = s;
    const auto tr = improvement_iterate(F, analytic_field("tilted_power", g, P), std::nullopt, rho, s, 0.05, 8);
    const double target = std::pow(rho, s * tau);
    const bool a_ok = std::abs(tr.alpha_hat - s) <= 0.3 * s;
    const bool d_ok = std::abs(tr.drift_ratio - target) <= 0.2 * target;
    ok = ok && a_ok && d_ok;
    detail += fmt("s=%.2f: alpha %.4f, drift ratio %.4f vs %.4f; ", s, tr.alpha_hat, tr.drift_ratio, target);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome campanato() {
  const auto F = YoungFunction::power(3.0);
  const double lambda = 1 + 1.5;
  double C[2];
  bool ok = true;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, gamma = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double h = i == 0 ? 1.0 / 128 : 1.0 / 256;
    const auto g = Grid::box(1, h, {-1.0, 0.0}, {1.0, 0.0});
    const auto r = holder_certificate(F, analytic_field("sqrt_abs", g), Region::full(g), lambda);
    C[i] = r.fitted_C;
    gamma = r.gamma;
    lo = std::min(lo, r.min_ratio);
    hi = std::max(hi, r.max_ratio);
    ok = ok && std::isfinite(r.seminorm) && r.seminorm > 0.0;
  }
  const double bound = std::pow(2.0, F.g0() + 1);
  ok = ok && std::abs(C[1] / C[0] - 1.0) <= 0.2 && lo >= 1.0 && hi <= bound;

  const auto g = Grid::box(1, 1.0 / 128, {-1.0, 0.0}, {1.0, 0.0});
  const auto c = holder_certificate(F, ScalarField(g, 0.7), Region::full(g), lambda);
  const bool const_ok = c.seminorm_avg == 0.0 && c.seminorm_inf == 0.0 && c.holder_seminorm == 0.0;
  ok = ok && const_ok;
  return {ok, fmt("gamma %.3f, fitted_C %.4f / %.4f, ratio range [%.4f, %.4f] within [1, %g], constants %s", gamma,
                  C[0], C[1], lo, hi, bound, const_ok ? "zero" : "nonzero")};
}

Outcome bmo() {
  const auto F = YoungFunction::power(3.0);
  const auto g = Grid::box(2, 1.0 / 64, {-1.0, -0.5}, {1.0, 0.5});
  const auto box = Region::full(g);
  bool ok = true;
  std::size_t rows = 0;
  double c0 = 1.0;
  for (const char* id : {"sqrt_abs", "smooth_random", "one_phase"}) {
    const auto r = bmo_star_seminorm(F, analytic_field(id, g), box);
    rows += r.rows.size();
    c0 = std::min(c0, r.empirical_c0);
    ok = ok && r.holds && !r.rows.empty();
  }
  return {ok, fmt("%zu sampled pairs, empirical c0 %.4f", rows, c0)};
}

Outcome lipschitz() {
  const auto F = YoungFunction::power(3.0);
  double ratio[2];
  bool ok = true;
  for (int i = 0; i < 2; ++i) {
    const auto g = square(i == 0 ? 1.0 / 64 : 1.0 / 128);
    const auto ball = Region::ball(g, {0.0, 0.0}, 1.0);
    const auto u = harmonic_replacement(F, analytic_field("one_phase", g), ball).u;
    const auto r = lipschitz_certificate(F, u, 0.25, 1.0, 6);
    ratio[i] = r.ratio;
    ok = ok && r.completed && r.steps.size() == 7 && std::isfinite(r.ratio);
  }
  ok = ok && std::abs(ratio[1] / ratio[0] - 1.0) <= 0.25;
  return {ok, fmt("ratio %.4f at h=1/64, %.4f at h=1/128", ratio[0], ratio[1])};
}

}  // namespace

int main(int argc, char** argv) {
  const std::function<Outcome()> criteria[] = {young_calculus, complementary_oracle, replacement_1d, radial_oracle,
                                               energy_gap,     ellipticity,          scaling,        dichotomy,
                                               iteration,      campanato,            bmo,            lipschitz};
  const int n = argc == 2 ? std::atoi(argv[1]) : 0;
  if (n < 1 || n > 12) {
    std::fprintf(stderr, "usage: acceptance <criterion 1-12>\n");
    return 2;
  }
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = criteria[n - 1]();
  } catch (const std::exception& e) {
    out = {false, std::string("error: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("criterion %d: %s %s [%.1f s]\n", n, out.pass ? "PASS" : "FAIL", out.detail.c_str(), secs);
  return out.pass ? 0 : 1;
}
