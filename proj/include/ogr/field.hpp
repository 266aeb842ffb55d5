#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ogr {

using Point = std::array<double, 2>;

/// Uniform grid in dimension 1 or 2. Nodes are indexed lexicographically with
/// the first axis fastest; cells likewise. In 1D the second axis is a dummy
/// of one node (zero cells are never used on it).
class Grid {
 public:
  Grid() = default;
  Grid(int dim, double h, Point origin, std::array<std::size_t, 2> nodes);

  /// Grid covering [lo, hi] (per axis) with spacing h; hi - lo must be a multiple of h.
  static Grid box(int dim, double h, Point lo, Point hi);

  int dim() const noexcept { return dim_; }
  double h() const noexcept { return h_; }
  const Point& origin() const noexcept { return origin_; }
  std::size_t nodes(int axis) const noexcept { return nodes_[static_cast<std::size_t>(axis)]; }
  std::size_t cells(int axis) const noexcept;
  std::size_t node_count() const noexcept { return nodes_[0] * nodes_[1]; }
  std::size_t cell_count() const noexcept { return cells(0) * (dim_ == 2 ? cells(1) : 1); }
  /// h^n
  double cell_volume() const noexcept { return dim_ == 2 ? h_ * h_ : h_; }

  std::size_t node_index(std::size_t i, std::size_t j = 0) const noexcept { return j * nodes_[0] + i; }
  std::size_t cell_index(std::size_t i, std::size_t j = 0) const noexcept { return j * cells(0) + i; }
  Point node_point(std::size_t node) const noexcept;
  Point cell_center(std::size_t cell) const noexcept;
  /// Corner node indices of a cell (2 in 1D, 4 in 2D, ordered 00, 10, 01, 11).
  std::array<std::size_t, 4> cell_corners(std::size_t cell) const noexcept;
  int corners_per_cell() const noexcept { return dim_ == 2 ? 4 : 2; }
  Point upper() const noexcept;
  bool contains(const Point& x, double slack = 0.0) const noexcept;

  bool operator==(const Grid& o) const noexcept = default;

 private:
  int dim_ = 1;
  double h_ = 1.0;
  Point origin_{0.0, 0.0};
  std::array<std::size_t, 2> nodes_{2, 1};
};

enum class RegionKind { Full, Ball, Annulus, Box, Bitmap };

std::string to_string(RegionKind kind);

/// A set of grid cells with per-cell weights in (0, 1]. Shapes built with the
/// cell-center rule have unit weights; `ball_fractional` weights boundary
/// cells by the covered fraction, which keeps balls of sub-cell radius usable.
/// Cells are kept sorted, so every reduction over a region has a fixed order.
class Region {
 public:
  static Region full(const Grid& g);
  static Region ball(const Grid& g, Point center, double r);
  static Region annulus(const Grid& g, Point center, double r_in, double r_out);
  static Region box(const Grid& g, Point lo, Point hi);
  static Region bitmap(const Grid& g, std::vector<std::size_t> cells);
  /// Ball with fractional weights from subsamples^n points per cell.
  static Region ball_fractional(const Grid& g, Point center, double r, int subsamples);

  RegionKind kind() const noexcept { return kind_; }
  const Point& center() const noexcept { return center_; }
  double radius() const noexcept { return r_; }
  double inner_radius() const noexcept { return r_in_; }
  const Point& lo() const noexcept { return lo_; }
  const Point& hi() const noexcept { return hi_; }

  std::span<const std::size_t> cells() const noexcept { return cells_; }
  std::span<const double> weights() const noexcept { return weights_; }
  bool empty() const noexcept { return cells_.empty(); }
  std::size_t size() const noexcept { return cells_.size(); }
  /// Dense per-cell membership (1 if the cell has positive weight).
  std::vector<std::uint8_t> dense_mask(const Grid& g) const;

  /// Cells present in both, with weights multiplied.
  Region intersect(const Region& other) const;

 private:
  RegionKind kind_ = RegionKind::Full;
  Point center_{0.0, 0.0};
  double r_ = 0.0;
  double r_in_ = 0.0;
  Point lo_{0.0, 0.0};
  Point hi_{0.0, 0.0};
  std::vector<std::size_t> cells_;
  std::vector<double> weights_;
};

/// Node values on a grid.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(Grid grid, std::vector<double> values);
  ScalarField(Grid grid, double fill);

  template <class F>
  static ScalarField from_function(const Grid& g, F&& f) {
    std::vector<double> v(g.node_count());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(g.node_point(k));
    return ScalarField(g, std::move(v));
  }

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& mutable_values() noexcept { return values_; }
  double operator[](std::size_t node) const noexcept { return values_[node]; }
  double& operator[](std::size_t node) noexcept { return values_[node]; }

  /// Average of the corner values of each cell.
  std::vector<double> cell_values() const;
  /// Multilinear interpolation; throws DomainError outside the grid box.
  double sample(const Point& x) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Per-cell n-vectors (second component unused in 1D).
class VectorField {
 public:
  VectorField() = default;
  VectorField(Grid grid, std::vector<Point> values);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const Point> values() const noexcept { return values_; }
  const Point& operator[](std::size_t cell) const noexcept { return values_[cell]; }

  /// |v| per cell.
  std::vector<double> magnitudes() const;
  /// Componentwise v - q.
  VectorField shifted(const Point& q) const;

 private:
  Grid grid_;
  std::vector<Point> values_;
};

inline double norm(const Point& p, int dim) {
  return dim == 2 ? std::hypot(p[0], p[1]) : std::abs(p[0]);
}

/// Cell-centered gradient: average over the cell of the forward differences
/// along each axis. Exact for affine node data.
VectorField gradient(const ScalarField& u);
Point cell_gradient(const Grid& g, std::span<const double> values, std::size_t cell);

/// Sum over region cells of weight * value * h^n, in cell order with compensation.
double integrate(const Grid& g, std::span<const double> cell_values, const Region& region);
/// Integral divided by the region measure; throws PreconditionError on an empty region.
double average(const Grid& g, std::span<const double> cell_values, const Region& region);
double measure(const Grid& g, const Region& region);

/// Nodes of region cells that touch a cell outside the region (or the edge of
/// the grid), sorted ascending.
std::vector<std::size_t> boundary_nodes(const Grid& g, const Region& region);
/// All corner nodes of region cells, sorted ascending.
std::vector<std::size_t> region_nodes(const Grid& g, const Region& region);

/// u_r(x) = u(r x) / r sampled on the nodes of `target` (defaults to u's grid).
ScalarField rescale(const ScalarField& u, double r);
ScalarField rescale(const ScalarField& u, double r, const Grid& target);

/// Grid whose node k sits at (node k of g) / r, so that a set of cells of g
/// and its image under x -> x / r are indexed identically.
Grid image_grid(const Grid& g, double r);

}  // namespace ogr
