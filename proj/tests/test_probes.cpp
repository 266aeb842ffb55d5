#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "ogr/analytic.hpp"
#include "ogr/error.hpp"
#include "ogr/probes.hpp"

using namespace ogr;

namespace {

Grid square(double h) { return Grid::box(2, h, {-1.0, -1.0}, {1.0, 1.0}); }

ScalarField affine(const Grid& g, Point q, double b = 0.0) {
  return ScalarField::from_function(g, [=](const Point& x) { return q[0] * x[0] + q[1] * x[1] + b; });
}

}  // namespace

TEST_CASE("average energy level") {
  const auto F = YoungFunction::power(3.0);
  const auto g = square(1.0 / 32);
  const auto ball = Region::ball(g, {0.0, 0.0}, 0.7);
  const auto l = avg_energy_level(F, affine(g, {1.2, -1.6}), ball);
  CHECK(l.G_of_a == doctest::Approx(8.0));
  CHECK(l.a == doctest::Approx(2.0));
  const auto z = avg_energy_level(F, ScalarField(g, 3.0), ball);
  CHECK(z.G_of_a == 0.0);
  CHECK(z.a == 0.0);

  // average of |2 x_1|^3 over the unit disk: 64 / (15 pi)
  const auto gf = square(1.0 / 128);
  const auto u = ScalarField::from_function(gf, [](const Point& x) { return x[0] * x[0]; });
  const auto q = avg_energy_level(F, u, Region::ball(gf, {0.0, 0.0}, 1.0));
  CHECK(std::abs(q.G_of_a - 64.0 / (15.0 * std::numbers::pi)) <= 1e-2);
}

TEST_CASE("flatness") {
  const auto F = YoungFunction::power(3.0);
  const auto g = square(1.0 / 32);
  const auto ball = Region::ball(g, {0.1, 0.0}, 0.6);
  const Point q{0.5, 1.0};
  const auto u = affine(g, q, 0.2);
  CHECK(flatness(F, u, q, ball) <= 1e-24);
  CHECK(flatness(F, u, {1.0, -1.0}, ball) == doctest::Approx(F.G(std::hypot(0.5, 2.0))).epsilon(1e-12));

  // brute-force cell sum in reverse order
  const auto r = analytic_field("smooth_random", g);
  const Point p{0.3, -0.2};
  double s = 0.0, w = 0.0;
  for (std::size_t k = ball.size(); k-- > 0;) {
    const auto z = cell_gradient(g, r.values(), ball.cells()[k]);
    s += ball.weights()[k] * F.G(std::hypot(z[0] - p[0], z[1] - p[1]));
    w += ball.weights()[k];
  }
  CHECK(flatness(F, r, p, ball) == doctest::Approx(s / w).epsilon(1e-12));
}

TEST_CASE("best slope") {
  const auto F = YoungFunction::power(3.0);
  const auto g = square(1.0 / 32);
  const auto ball = Region::ball(g, {0.0, 0.0}, 0.8);
  const Point q{-0.7, 1.3};
  const auto s = best_slope(F, affine(g, q, 1.0), ball);
  CHECK(std::abs(s[0] - q[0]) <= 1e-8);
  CHECK(std::abs(s[1] - q[1]) <= 1e-8);
  const auto c = best_slope(F, ScalarField(g, 2.0), ball);
  CHECK(c[0] == 0.0);
  CHECK(c[1] == 0.0);

  // argmin property against random slopes
  const auto r = analytic_field("smooth_random", g);
  const auto qs = best_slope(F, r, ball);
  const double f0 = flatness(F, r, qs, ball);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) CHECK(f0 <= flatness(F, r, {qs[0] + d(rng), qs[1] + d(rng)}, ball) * (1 + 1e-12));

  // linear + small bump against a dense grid search
  const auto b = ScalarField::from_function(
      g, [](const Point& x) { return x[0] - 0.5 * x[1] + 0.05 * std::exp(-8.0 * (x[0] * x[0] + x[1] * x[1])); });
  const auto qb = best_slope(F, b, ball);
  Point best{0.0, 0.0};
  double fbest = 1e300;
  for (int i = -100; i <= 100; ++i) {
    for (int j = -100; j <= 100; ++j) {
      const Point t{1.0 + 0.002 * i, -0.5 + 0.002 * j};
      const double f = flatness(F, b, t, ball);
      if (f < fbest) {
        fbest = f;
        best = t;
      }
    }
  }
  CHECK(std::abs(qb[0] - best[0]) <= 2e-3);
  CHECK(std::abs(qb[1] - best[1]) <= 2e-3);
  CHECK(flatness(F, b, qb, ball) <= fbest);
}

TEST_CASE("dichotomy") {
  const auto F = YoungFunction::power(3.0);
  const auto g = square(1.0 / 64);
  DichotomyParams P;
  const auto lin = dichotomy_probe(F, affine(g, {2.0, -1.0}), P);
  CHECK((lin.verdict == DichotomyVerdict::B || lin.verdict == DichotomyVerdict::Both));
  CHECK(lin.flatness <= 1e-12);
  CHECK(lin.a == doctest::Approx(std::sqrt(5.0)));

  const auto c = dichotomy_probe(F, ScalarField(g, 1.0), P);
  CHECK(c.degenerate);
  CHECK(c.alt_a);
  CHECK((c.verdict == DichotomyVerdict::A || c.verdict == DichotomyVerdict::Both));

  // threshold rule: the denominator is negative for eps = 0.05, eta = 1/4
  const auto rule = DichotomyParams::from_constants(F, 2, 0.05, 0.25, 1.0, 0.5);
  CHECK_FALSE(rule.m_from_formula);
  CHECK(rule.M_threshold == 1.0);
  CHECK(rule.sigma == doctest::Approx(std::pow(0.25, 3)));
  const auto ok = DichotomyParams::from_constants(F, 2, 0.9, 1e-3, 0.1, 1.0);
  CHECK(ok.m_from_formula);
  const double denom = std::pow(0.9, 3.0) - 0.1 * 1e-3 - 0.1 * std::pow(1e-3, 3.0);
  CHECK(ok.M_threshold == doctest::Approx(F.inverse_G(0.1 * 1e6 / denom)));
}

TEST_CASE("improvement iteration") {
  const auto F = YoungFunction::power(3.0);
  const auto g = square(1.0 / 64);
  const auto lin = affine(g, {1.0, 0.5}, 0.25);
  const auto tr = improvement_iterate(F, lin, std::nullopt, 0.5, 0.5, 0.05, 10);
  REQUIRE_FALSE(tr.states.empty());
  for (const auto& s : tr.states) {
    CHECK(s.flatness_k <= 1e-20);
    if (std::isfinite(s.drift)) CHECK(s.drift <= 1e-8);
  }
  CHECK(tr.truncated);  // 0.5^10 < 4h
  CHECK(tr.b_intercept == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(tr.drift_sum <= tr.drift_series_bound + 1e-12);

  const auto u = analytic_field("tilted_power", g);
  const auto t2 = improvement_iterate(F, u, std::nullopt, 0.5, 0.5, 0.05, 4);
  CHECK_FALSE(t2.truncated);
  CHECK(t2.states.size() == 5);
  CHECK(t2.drift_sum <= t2.drift_series_bound * (1 + 1e-12));
  CHECK_THROWS_AS(improvement_iterate(F, u, std::nullopt, 1.5, 0.5, 0.05, 4), PreconditionError);
}

TEST_CASE("campanato seminorms") {
  const auto F = YoungFunction::power(3.0);
  const auto g = Grid::box(1, 1.0 / 128, {-1.0, 0.0}, {1.0, 0.0});
  const auto dom = Region::full(g);
  const auto centers = default_centers(g, dom);
  const auto radii = default_radii(g, dom);
  REQUIRE_FALSE(radii.empty());
  CHECK(radii.front() == doctest::Approx(8.0 / 128));
  CHECK(radii.back() <= 1.0);

  const auto c = campanato_seminorm(F, ScalarField(g, 1.5), dom, 2.5, centers, radii, CampanatoMode::InfOverXi);
  CHECK(c.seminorm_avg == 0.0);
  CHECK(c.seminorm_inf == 0.0);

  const auto u = analytic_field("sqrt_abs", g);
  const auto lo = campanato_seminorm(F, u, dom, 1.5, centers, radii, CampanatoMode::InfOverXi);
  const auto hi = campanato_seminorm(F, u, dom, 2.5, centers, radii, CampanatoMode::InfOverXi);
  CHECK(hi.seminorm >= lo.seminorm);
  CHECK(hi.gamma == doctest::Approx(0.5));
  for (const auto& row : hi.rows) {
    if (row.inf_value > 0.0) {
      CHECK(row.avg_value >= row.inf_value * (1 - 1e-12));
      CHECK(row.avg_value <= std::pow(2.0, F.g0() + 1.0) * row.inf_value);
    }
  }
}

TEST_CASE("hoelder certificate") {
  const auto F = YoungFunction::power(3.0);
  const auto g = Grid::box(1, 1.0 / 128, {-1.0, 0.0}, {1.0, 0.0});
  const auto dom = Region::full(g);
  // Lipschitz end of the scale: lambda = n + g0 + 1
  const auto lin = ScalarField::from_function(g, [](const Point& x) { return -2.0 * x[0]; });
  const auto rep = holder_certificate(F, lin, dom, 1.0 + F.g0() + 1.0);
  CHECK(rep.gamma == doctest::Approx(1.0));
  CHECK(rep.holder_seminorm == doctest::Approx(2.0));
  CHECK(std::isfinite(rep.seminorm));
  CHECK(rep.fitted_C > 0.0);

  const auto c = holder_certificate(F, ScalarField(g, 1.0), dom, 2.5);
  CHECK(c.seminorm == 0.0);
  CHECK(c.holder_seminorm == 0.0);
  CHECK(c.fitted_C == 0.0);

  // sup |x|^{1/2} - |y|^{1/2} over |x - y|^{1/2} is 1, reached with y = 0
  double oracle = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    for (std::size_t j = i + 1; j < g.node_count(); ++j) {
      const double x = g.node_point(i)[0], y = g.node_point(j)[0];
      oracle = std::max(oracle, std::abs(std::sqrt(std::abs(x)) - std::sqrt(std::abs(y))) / std::sqrt(y - x));
    }
  }
  CHECK(holder_seminorm(analytic_field("sqrt_abs", g), dom, 0.5) == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(oracle == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("BMO*") {
  const auto F = YoungFunction::power(3.0);
  const auto g = square(1.0 / 32);
  const auto box = Region::full(g);
  const auto c = bmo_star_seminorm(F, ScalarField(g, 4.0), box);
  CHECK(c.bmo == 0.0);
  CHECK(c.holds);
  // a quarter disk at least around corner centers
  CHECK(c.empirical_c0 >= 0.24);

  const auto ag = square(1.0 / 64);
  const auto ann = Region::annulus(ag, {0.0, 0.0}, 0.2, 1.0);
  const auto u = ScalarField::from_function(ag, [](const Point& x) {
    return std::log(std::max(std::hypot(x[0], x[1]), 0.2));
  });
  const auto r = bmo_star_seminorm(F, u, ann);
  CHECK(std::isfinite(r.bmo));
  CHECK(r.holds);
  for (const auto& row : r.rows) CHECK(row.holds);

  const auto strict = bmo_star_seminorm(F, u, ann, 0.9);
  CHECK_FALSE(strict.upd_violations.empty());
}

TEST_CASE("lipschitz certificate") {
  const auto F = YoungFunction::power(3.0);
  const auto g = square(1.0 / 64);
  const auto z = lipschitz_certificate(F, ScalarField(g, 0.0), 0.25, 1.0, 4);
  CHECK(z.completed);
  CHECK(z.ratio == 0.0);

  // u = q.x + c, nonnegative on B_1
  const Point q{0.6, 0.8};
  const auto u = affine(g, q, 1.5);
  const auto r = lipschitz_certificate(F, u, 0.25, 1.0, 4);
  const double m = measure(g, Region::ball(g, {0.0, 0.0}, 1.0));
  CHECK(r.ratio == doctest::Approx(1.0 / F.inverse_G(1.0 + F.G(1.0) * m)).epsilon(1e-10));
  CHECK(r.recurrence_ok);
  for (const auto& s : r.steps) CHECK(s.recurrence_ok);
}
