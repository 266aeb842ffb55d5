#include <cmath>
#include <random>

#include "doctest.h"
#include "ogr/orlicz.hpp"

using namespace ogr;

namespace {

Grid unit_square(double h) { return Grid::box(2, h, {0.0, 0.0}, {1.0, 1.0}); }

}  // namespace

TEST_CASE("modular of constants and of x") {
  const auto F = YoungFunction::power(3.0);
  const auto g = unit_square(1.0 / 32);
  const auto full = Region::full(g);
  CHECK(modular(F, ScalarField(g, 2.0), full) == doctest::Approx(8.0));
  CHECK(modular(F, ScalarField(g, 0.0), full) == 0.0);

  const auto g1 = Grid::box(1, 1e-3, {0.0, 0.0}, {1.0, 0.0});
  const auto x = ScalarField::from_function(g1, [](const Point& p) { return p[0]; });
  CHECK(std::abs(modular(F, x, Region::full(g1)) - 0.25) <= 1e-3);
}

TEST_CASE("luxemburg norm closed forms") {
  const auto F = YoungFunction::power(3.0);
  const auto g = unit_square(1.0 / 32);
  CHECK(luxemburg_norm(F, ScalarField(g, 2.0), Region::full(g)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(luxemburg_norm(F, ScalarField(g, 0.0), Region::full(g)) == 0.0);

  // (c / lambda)^3 m = 1
  const auto gb = Grid::box(2, 1.0 / 64, {-1.0, -1.0}, {1.0, 1.0});
  const auto ball = Region::ball(gb, {0.1, 0.0}, 0.6);
  const double m = measure(gb, ball);
  CHECK(luxemburg_norm(F, ScalarField(gb, 1.7), ball) == doctest::Approx(1.7 * std::cbrt(m)).epsilon(1e-7));
}

TEST_CASE("norm-modular bound") {
  const auto F = YoungFunction::power(3.0);
  const auto g = unit_square(1.0 / 16);
  const auto r = norm_modular_bound(F, ScalarField(g, 2.0), Region::full(g));
  CHECK(r.modular == doctest::Approx(8.0));
  CHECK(r.bound == doctest::Approx(2.0));
  CHECK(r.norm == doctest::Approx(2.0));
  CHECK(r.holds);
  const auto one = norm_modular_bound(F, ScalarField(g, 1.0), Region::full(g));
  CHECK(one.bound == doctest::Approx(1.0));

  const auto P = YoungFunction::plog(3.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> amp(0.0, 3.0);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = amp(rng);
    std::vector<double> v(g.node_count());
    for (double& x : v) x = a * val(rng);
    const auto rep = norm_modular_bound(P, ScalarField(g, std::move(v)), Region::full(g));
    CHECK(rep.holds);
  }
}

TEST_CASE("vector-field modular uses magnitudes") {
  const auto F = YoungFunction::power(3.0);
  const auto g = unit_square(0.25);
  VectorField v(g, std::vector<Point>(g.cell_count(), Point{0.6, 0.8}));
  CHECK(modular(F, v, Region::full(g)) == doctest::Approx(1.0));
  CHECK(luxemburg_norm(F, v, Region::full(g)) == doctest::Approx(1.0));
}
