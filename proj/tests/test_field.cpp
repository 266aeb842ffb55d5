#include <cmath>
#include <numbers>
#include <queue>
#include <set>

#include "doctest.h"
#include "ogr/error.hpp"
#include "ogr/field.hpp"

using namespace ogr;

TEST_CASE("grid geometry") {
  const auto g = Grid::box(2, 0.25, {-1.0, 0.0}, {1.0, 1.0});
  CHECK(g.nodes(0) == 9);
  CHECK(g.nodes(1) == 5);
  CHECK(g.cell_count() == 32);
  CHECK(g.node_point(g.node_index(8, 4))[0] == doctest::Approx(1.0));
  CHECK(g.node_point(g.node_index(8, 4))[1] == doctest::Approx(1.0));
  CHECK(g.cell_center(0)[0] == doctest::Approx(-0.875));
  CHECK(g.contains({0.0, 0.5}));
  CHECK_FALSE(g.contains({1.5, 0.5}));
  CHECK_THROWS_AS(Grid::box(2, 0.3, {0.0, 0.0}, {1.0, 1.0}), PreconditionError);
  CHECK_THROWS_AS(Grid(3, 0.1, {0.0, 0.0}, {3, 3}), PreconditionError);
}

TEST_CASE("gradients are exact on affine fields") {
  const auto g = Grid::box(2, 1.0 / 16, {-1.0, -1.0}, {1.0, 1.0});
  const auto u = ScalarField::from_function(g, [](const Point& x) { return 3.0 * x[0] + 2.0; });
  for (const auto& z : gradient(u).values()) {
    CHECK(z[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(z[1]) <= 1e-12);
  }
  const ScalarField c(g, 4.0);
  for (const auto& z : gradient(c).values()) {
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 0.0);
  }
}

TEST_CASE("1D gradient of x^2 matches 2x at cell centers") {
  const auto g = Grid::box(1, 0.01, {0.0, 0.0}, {1.0, 0.0});
  const auto u = ScalarField::from_function(g, [](const Point& x) { return x[0] * x[0]; });
  const auto grad = gradient(u);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    CHECK(std::abs(grad[c][0] - 2.0 * g.cell_center(c)[0]) <= 1e-2);
  }
}

TEST_CASE("integrals and averages") {
  const auto g = Grid::box(2, 1.0 / 64, {0.0, 0.0}, {1.0, 1.0});
  std::vector<double> one(g.cell_count(), 1.0);
  CHECK(integrate(g, one, Region::full(g)) == 1.0);

  const auto gb = Grid::box(2, 1.0 / 128, {-1.0, -1.0}, {1.0, 1.0});
  std::vector<double> ones(gb.cell_count(), 1.0);
  const auto ball = Region::ball(gb, {0.0, 0.0}, 1.0);
  CHECK(std::abs(integrate(gb, ones, ball) - std::numbers::pi) <= 2e-2);
  CHECK(measure(gb, ball) == doctest::Approx(integrate(gb, ones, ball)));

  std::vector<double> lin(gb.cell_count());
  for (std::size_t c = 0; c < lin.size(); ++c) lin[c] = 2.0 * gb.cell_center(c)[0] - gb.cell_center(c)[1];
  CHECK(std::abs(integrate(gb, lin, ball)) <= 1e-12);

  const auto empty = Region::bitmap(gb, {});
  CHECK(integrate(gb, ones, empty) == 0.0);
  CHECK_THROWS_AS(average(gb, ones, empty), PreconditionError);
}

TEST_CASE("fractional balls approach the exact area") {
  const auto g = Grid::box(2, 1.0 / 16, {-1.0, -1.0}, {1.0, 1.0});
  for (double r : {0.03, 0.1, 0.4}) {
    const auto b = Region::ball_fractional(g, {0.01, -0.02}, r, 64);
    CHECK(measure(g, b) == doctest::Approx(std::numbers::pi * r * r).epsilon(2e-3));
  }
}

TEST_CASE("masks follow the cell-center rule") {
  const auto g = Grid::box(2, 0.1, {-1.0, -1.0}, {1.0, 1.0});
  const auto b = Region::ball(g, {0.0, 0.0}, 0.5);
  const auto mask = b.dense_mask(g);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const auto x = g.cell_center(c);
    CHECK(static_cast<bool>(mask[c]) == (std::hypot(x[0], x[1]) <= 0.5));
  }
  const auto a = Region::annulus(g, {0.0, 0.0}, 0.3, 0.6);
  for (std::size_t c : a.cells()) {
    const double d = std::hypot(g.cell_center(c)[0], g.cell_center(c)[1]);
    CHECK(d >= 0.3);
    CHECK(d < 0.6);
  }
  const auto both = b.intersect(a);
  for (std::size_t c : both.cells()) CHECK(mask[c]);
}

TEST_CASE("boundary nodes") {
  const auto g = Grid::box(1, 0.1, {0.0, 0.0}, {1.0, 0.0});
  REQUIRE(g.nodes(0) == 11);
  const auto bn = boundary_nodes(g, Region::full(g));
  CHECK(bn == std::vector<std::size_t>{0, 10});

  const auto g2 = Grid::box(2, 0.25, {0.0, 0.0}, {1.0, 1.0});
  CHECK(boundary_nodes(g2, Region::full(g2)).size() == 16);

  // ring of a ball: nonempty and 8-connected
  const auto g3 = Grid::box(2, 1.0 / 32, {-1.0, -1.0}, {1.0, 1.0});
  const auto ring = boundary_nodes(g3, Region::ball(g3, {0.0, 0.0}, 0.5));
  REQUIRE_FALSE(ring.empty());
  std::set<std::size_t> left(ring.begin(), ring.end());
  std::queue<std::size_t> todo;
  todo.push(ring.front());
  left.erase(ring.front());
  const std::size_t nx = g3.nodes(0);
  while (!todo.empty()) {
    const std::size_t n = todo.front();
    todo.pop();
    const long i = static_cast<long>(n % nx), j = static_cast<long>(n / nx);
    for (long dj = -1; dj <= 1; ++dj) {
      for (long di = -1; di <= 1; ++di) {
        const auto m = static_cast<std::size_t>((j + dj) * static_cast<long>(nx) + i + di);
        if (left.erase(m)) todo.push(m);
      }
    }
  }
  CHECK(left.empty());
}

TEST_CASE("rescaling") {
  const auto g = Grid::box(2, 1.0 / 16, {-1.0, -1.0}, {1.0, 1.0});
  const auto lin = ScalarField::from_function(g, [](const Point& x) { return 2.0 * x[0] - x[1]; });
  const auto lr = rescale(lin, 0.5);
  for (std::size_t n = 0; n < g.node_count(); ++n) CHECK(lr[n] == doctest::Approx(lin[n]).epsilon(1e-12));
  const ScalarField c(g, 3.0);
  const auto cr = rescale(c, 0.5);
  for (std::size_t n = 0; n < g.node_count(); ++n) CHECK(cr[n] == doctest::Approx(6.0));
  CHECK_THROWS_AS(rescale(c, 0.0), PreconditionError);

  const auto gi = image_grid(g, 0.5);
  CHECK(gi.h() == doctest::Approx(g.h() / 0.5));
  CHECK(gi.origin()[0] == doctest::Approx(-2.0));
}

TEST_CASE("sampling") {
  const auto g = Grid::box(2, 0.25, {0.0, 0.0}, {1.0, 1.0});
  const auto u = ScalarField::from_function(g, [](const Point& x) { return x[0] + 2.0 * x[1]; });
  CHECK(u.sample({0.3, 0.7}) == doctest::Approx(1.7));
  CHECK_THROWS_AS(u.sample({1.5, 0.2}), DomainError);
  CHECK_THROWS_AS(ScalarField(g, std::vector<double>(3, 0.0)), PreconditionError);
}
