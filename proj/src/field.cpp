#include "ogr/field.hpp"

#include <algorithm>
#include <cmath>

#include "ogr/detail/numeric.hpp"
#include "ogr/error.hpp"

namespace ogr {

Grid::Grid(int dim, double h, Point origin, std::array<std::size_t, 2> nodes)
    : dim_(dim), h_(h), origin_(origin), nodes_(nodes) {
  if (dim != 1 && dim != 2) throw PreconditionError("grid dimension must be 1 or 2");
  if (!(h > 0.0) || !std::isfinite(h)) throw PreconditionError("grid spacing must be positive");
  if (dim == 1) {
    nodes_[1] = 1;
    origin_[1] = 0.0;
  }
  if (nodes_[0] < 2 || (dim == 2 && nodes_[1] < 2)) {
    throw PreconditionError("grid needs at least 2 nodes per axis");
  }
}

Grid Grid::box(int dim, double h, Point lo, Point hi) {
  std::array<std::size_t, 2> n{1, 1};
  for (int a = 0; a < dim; ++a) {
    const double cells = (hi[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)]) / h;
    const double rounded = std::round(cells);
    if (!(rounded >= 1.0) || std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells)) {
      throw PreconditionError("box extent must be a positive multiple of h");
    }
    n[static_cast<std::size_t>(a)] = static_cast<std::size_t>(rounded) + 1;
  }
  return Grid(dim, h, lo, n);
}

std::size_t Grid::cells(int axis) const noexcept {
  if (axis == 1 && dim_ == 1) return 1;
  return nodes_[static_cast<std::size_t>(axis)] - 1;
}

Point Grid::node_point(std::size_t node) const noexcept {
  const std::size_t i = node % nodes_[0];
  const std::size_t j = node / nodes_[0];
  return {origin_[0] + h_ * static_cast<double>(i),
          dim_ == 2 ? origin_[1] + h_ * static_cast<double>(j) : 0.0};
}

Point Grid::cell_center(std::size_t cell) const noexcept {
  const std::size_t c0 = cells(0);
  const std::size_t i = cell % c0;
  const std::size_t j = cell / c0;
  return {origin_[0] + h_ * (static_cast<double>(i) + 0.5),
          dim_ == 2 ? origin_[1] + h_ * (static_cast<double>(j) + 0.5) : 0.0};
}

std::array<std::size_t, 4> Grid::cell_corners(std::size_t cell) const noexcept {
  const std::size_t c0 = cells(0);
  const std::size_t i = cell % c0;
  const std::size_t j = cell / c0;
  const std::size_t n00 = node_index(i, j);
  if (dim_ == 1) return {n00, n00 + 1, n00, n00 + 1};
  return {n00, n00 + 1, n00 + nodes_[0], n00 + nodes_[0] + 1};
}

Point Grid::upper() const noexcept {
  return {origin_[0] + h_ * static_cast<double>(nodes_[0] - 1),
          dim_ == 2 ? origin_[1] + h_ * static_cast<double>(nodes_[1] - 1) : 0.0};
}

bool Grid::contains(const Point& x, double slack) const noexcept {
  const Point up = upper();
  for (int a = 0; a < dim_; ++a) {
    const auto k = static_cast<std::size_t>(a);
    if (x[k] < origin_[k] - slack || x[k] > up[k] + slack) return false;
  }
  return true;
}

std::string to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::Full: return "full";
    case RegionKind::Ball: return "ball";
    case RegionKind::Annulus: return "annulus";
    case RegionKind::Box: return "box";
    case RegionKind::Bitmap: return "bitmap";
  }
  return "unknown";
}

namespace {

double dist2(const Point& a, const Point& b, int dim) {
  const double dx = a[0] - b[0];
  const double dy = dim == 2 ? a[1] - b[1] : 0.0;
  return dx * dx + dy * dy;
}

// Cell index ranges per axis whose cells may meet the box [lo, hi].
std::array<std::size_t, 4> cell_window(const Grid& g, const Point& lo, const Point& hi) {
  std::array<std::size_t, 4> w{0, 0, 0, 0};
  for (int a = 0; a < 2; ++a) {
    const auto k = static_cast<std::size_t>(a);
    const std::size_t nc = g.cells(a);
    if (a == 1 && g.dim() == 1) {
      w[2] = 0;
      w[3] = 1;
      continue;
    }
    const double f0 = std::floor((lo[k] - g.origin()[k]) / g.h()) - 1.0;
    const double f1 = std::ceil((hi[k] - g.origin()[k]) / g.h()) + 1.0;
    const auto clamp = [nc](double v) {
      return static_cast<std::size_t>(std::clamp(v, 0.0, static_cast<double>(nc)));
    };
    w[2 * k] = clamp(f0);
    w[2 * k + 1] = clamp(f1);
  }
  return w;
}

}  // namespace

Region Region::full(const Grid& g) {
  Region r;
  r.kind_ = RegionKind::Full;
  r.lo_ = g.origin();
  r.hi_ = g.upper();
  r.cells_.resize(g.cell_count());
  for (std::size_t c = 0; c < r.cells_.size(); ++c) r.cells_[c] = c;
  r.weights_.assign(r.cells_.size(), 1.0);
  return r;
}

Region Region::ball(const Grid& g, Point center, double radius) {
  if (!(radius > 0.0)) throw PreconditionError("ball radius must be positive");
  Region r;
  r.kind_ = RegionKind::Ball;
  r.center_ = center;
  r.r_ = radius;
  const auto w = cell_window(g, {center[0] - radius, center[1] - radius},
                             {center[0] + radius, center[1] + radius});
  const double r2 = radius * radius;
  for (std::size_t j = w[2]; j < w[3]; ++j) {
    for (std::size_t i = w[0]; i < w[1]; ++i) {
      const std::size_t c = g.cell_index(i, j);
      if (dist2(g.cell_center(c), center, g.dim()) < r2) r.cells_.push_back(c);
    }
  }
  r.weights_.assign(r.cells_.size(), 1.0);
  return r;
}

Region Region::annulus(const Grid& g, Point center, double r_in, double r_out) {
  if (!(r_in >= 0.0) || !(r_out > r_in)) throw PreconditionError("annulus needs 0 <= r_in < r_out");
  Region r;
  r.kind_ = RegionKind::Annulus;
  r.center_ = center;
  r.r_ = r_out;
  r.r_in_ = r_in;
  const auto w = cell_window(g, {center[0] - r_out, center[1] - r_out},
                             {center[0] + r_out, center[1] + r_out});
  for (std::size_t j = w[2]; j < w[3]; ++j) {
    for (std::size_t i = w[0]; i < w[1]; ++i) {
      const std::size_t c = g.cell_index(i, j);
      const double d2 = dist2(g.cell_center(c), center, g.dim());
      if (d2 < r_out * r_out && d2 >= r_in * r_in) r.cells_.push_back(c);
    }
  }
  r.weights_.assign(r.cells_.size(), 1.0);
  return r;
}

Region Region::box(const Grid& g, Point lo, Point hi) {
  Region r;
  r.kind_ = RegionKind::Box;
  r.lo_ = lo;
  r.hi_ = hi;
  const auto w = cell_window(g, lo, hi);
  for (std::size_t j = w[2]; j < w[3]; ++j) {
    for (std::size_t i = w[0]; i < w[1]; ++i) {
      const std::size_t c = g.cell_index(i, j);
      const Point x = g.cell_center(c);
      bool in = x[0] >= lo[0] && x[0] <= hi[0];
      if (g.dim() == 2) in = in && x[1] >= lo[1] && x[1] <= hi[1];
      if (in) r.cells_.push_back(c);
    }
  }
  r.weights_.assign(r.cells_.size(), 1.0);
  return r;
}

Region Region::bitmap(const Grid& g, std::vector<std::size_t> cells) {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  if (!cells.empty() && cells.back() >= g.cell_count()) {
    throw PreconditionError("bitmap region references a cell outside the grid");
  }
  Region r;
  r.kind_ = RegionKind::Bitmap;
  r.cells_ = std::move(cells);
  r.weights_.assign(r.cells_.size(), 1.0);
  return r;
}

Region Region::ball_fractional(const Grid& g, Point center, double radius, int subsamples) {
  if (!(radius > 0.0) || subsamples < 1) {
    throw PreconditionError("ball_fractional needs a positive radius and subsamples");
  }
  Region r;
  r.kind_ = RegionKind::Ball;
  r.center_ = center;
  r.r_ = radius;
  const auto w = cell_window(g, {center[0] - radius, center[1] - radius},
                             {center[0] + radius, center[1] + radius});
  const double r2 = radius * radius;
  const int sy = g.dim() == 2 ? subsamples : 1;
  const double per = 1.0 / (static_cast<double>(subsamples) * sy);
  for (std::size_t j = w[2]; j < w[3]; ++j) {
    for (std::size_t i = w[0]; i < w[1]; ++i) {
      const std::size_t c = g.cell_index(i, j);
      const Point base = g.cell_center(c);
      int hits = 0;
      for (int b = 0; b < sy; ++b) {
        for (int a = 0; a < subsamples; ++a) {
          Point x = base;
          x[0] += g.h() * ((a + 0.5) / subsamples - 0.5);
          if (g.dim() == 2) x[1] += g.h() * ((b + 0.5) / sy - 0.5);
          if (dist2(x, center, g.dim()) < r2) ++hits;
        }
      }
      if (hits > 0) {
        r.cells_.push_back(c);
        r.weights_.push_back(hits * per);
      }
    }
  }
  return r;
}

std::vector<std::uint8_t> Region::dense_mask(const Grid& g) const {
  std::vector<std::uint8_t> m(g.cell_count(), 0);
  for (std::size_t c : cells_) m[c] = 1;
  return m;
}

Region Region::intersect(const Region& other) const {
  Region r;
  r.kind_ = RegionKind::Bitmap;
  std::size_t a = 0;
  std::size_t b = 0;
  while (a < cells_.size() && b < other.cells_.size()) {
    if (cells_[a] < other.cells_[b]) {
      ++a;
    } else if (other.cells_[b] < cells_[a]) {
      ++b;
    } else {
      r.cells_.push_back(cells_[a]);
      r.weights_.push_back(weights_[a] * other.weights_[b]);
      ++a;
      ++b;
    }
  }
  return r;
}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.node_count()) {
    throw PreconditionError("field size does not match the grid node count");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw PreconditionError("field values must be finite");
  }
}

ScalarField::ScalarField(Grid grid, double fill)
    : grid_(std::move(grid)), values_(grid_.node_count(), fill) {}

std::vector<double> ScalarField::cell_values() const {
  std::vector<double> out(grid_.cell_count());
  const int k = grid_.corners_per_cell();
  for (std::size_t c = 0; c < out.size(); ++c) {
    const auto n = grid_.cell_corners(c);
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += values_[n[static_cast<std::size_t>(i)]];
    out[c] = s / k;
  }
  return out;
}

double ScalarField::sample(const Point& x) const {
  const double h = grid_.h();
  const double slack = 1e-12 * h;
  if (!grid_.contains(x, slack)) throw DomainError("sample point outside the grid");
  auto locate = [&](int axis, std::size_t& i, double& s) {
    const auto k = static_cast<std::size_t>(axis);
    const double f = (x[k] - grid_.origin()[k]) / h;
    const double cells = static_cast<double>(grid_.nodes(axis) - 1);
    const double fl = std::clamp(std::floor(f), 0.0, cells - 1.0);
    i = static_cast<std::size_t>(fl);
    s = std::clamp(f - fl, 0.0, 1.0);
  };
  std::size_t i = 0;
  double s = 0.0;
  locate(0, i, s);
  if (grid_.dim() == 1) {
    return (1.0 - s) * values_[i] + s * values_[i + 1];
  }
  std::size_t j = 0;
  double t = 0.0;
  locate(1, j, t);
  const std::size_t n00 = grid_.node_index(i, j);
  const std::size_t nx = grid_.nodes(0);
  return (1.0 - s) * (1.0 - t) * values_[n00] + s * (1.0 - t) * values_[n00 + 1] +
         (1.0 - s) * t * values_[n00 + nx] + s * t * values_[n00 + nx + 1];
}

VectorField::VectorField(Grid grid, std::vector<Point> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.cell_count()) {
    throw PreconditionError("vector field size does not match the grid cell count");
  }
}

std::vector<double> VectorField::magnitudes() const {
  std::vector<double> out(values_.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = norm(values_[c], grid_.dim());
  return out;
}

VectorField VectorField::shifted(const Point& q) const {
  std::vector<Point> v(values_);
  for (auto& p : v) {
    p[0] -= q[0];
    if (grid_.dim() == 2) p[1] -= q[1];
  }
  return VectorField(grid_, std::move(v));
}

Point cell_gradient(const Grid& g, std::span<const double> u, std::size_t cell) {
  const auto n = g.cell_corners(cell);
  const double h = g.h();
  if (g.dim() == 1) return {(u[n[1]] - u[n[0]]) / h, 0.0};
  return {0.5 * ((u[n[1]] - u[n[0]]) + (u[n[3]] - u[n[2]])) / h,
          0.5 * ((u[n[2]] - u[n[0]]) + (u[n[3]] - u[n[1]])) / h};
}

VectorField gradient(const ScalarField& u) {
  const Grid& g = u.grid();
  std::vector<Point> out(g.cell_count());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = cell_gradient(g, u.values(), c);
  return VectorField(g, std::move(out));
}

double integrate(const Grid& g, std::span<const double> cell_values, const Region& region) {
  if (cell_values.size() != g.cell_count()) {
    throw PreconditionError("integrate: cell value count does not match the grid");
  }
  detail::CompensatedSum s;
  const auto cells = region.cells();
  const auto w = region.weights();
  for (std::size_t k = 0; k < cells.size(); ++k) s += w[k] * cell_values[cells[k]];
  return s.value() * g.cell_volume();
}

double measure(const Grid& g, const Region& region) {
  detail::CompensatedSum s;
  for (double w : region.weights()) s += w;
  return s.value() * g.cell_volume();
}

double average(const Grid& g, std::span<const double> cell_values, const Region& region) {
  if (region.empty()) throw PreconditionError("average over an empty region");
  return integrate(g, cell_values, region) / measure(g, region);
}

std::vector<std::size_t> region_nodes(const Grid& g, const Region& region) {
  std::vector<std::size_t> out;
  out.reserve(region.size() * 2);
  const int k = g.corners_per_cell();
  for (std::size_t c : region.cells()) {
    const auto n = g.cell_corners(c);
    for (int i = 0; i < k; ++i) out.push_back(n[static_cast<std::size_t>(i)]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> boundary_nodes(const Grid& g, const Region& region) {
  const auto mask = region.dense_mask(g);
  std::vector<std::size_t> out;
  const std::size_t nx = g.nodes(0);
  const std::size_t ny = g.nodes(1);
  const std::size_t cx = g.cells(0);
  for (std::size_t node : region_nodes(g, region)) {
    const std::size_t i = node % nx;
    const std::size_t j = node / nx;
    bool boundary = false;
    // The node's neighbouring cells are (i-1|i, j-1|j); a missing one is off-grid.
    const int jcount = g.dim() == 2 ? 2 : 1;
    for (int dj = 0; dj < jcount && !boundary; ++dj) {
      for (int di = 0; di < 2 && !boundary; ++di) {
        const bool ok_i = di == 0 ? i > 0 : i + 1 < nx;
        const bool ok_j = g.dim() == 1 || (dj == 0 ? j > 0 : j + 1 < ny);
        if (!ok_i || !ok_j) {
          boundary = true;
          break;
        }
        const std::size_t ci = di == 0 ? i - 1 : i;
        const std::size_t cj = g.dim() == 1 ? 0 : (dj == 0 ? j - 1 : j);
        if (!mask[cj * cx + ci]) boundary = true;
      }
    }
    if (boundary) out.push_back(node);
  }
  return out;
}

ScalarField rescale(const ScalarField& u, double r) { return rescale(u, r, u.grid()); }

ScalarField rescale(const ScalarField& u, double r, const Grid& target) {
  if (!(r > 0.0) || r > 1.0) throw PreconditionError("rescale requires r in (0, 1]");
  if (r == 1.0 && target == u.grid()) return u;
  std::vector<double> v(target.node_count());
  for (std::size_t k = 0; k < v.size(); ++k) {
    Point x = target.node_point(k);
    x[0] *= r;
    x[1] *= r;
    v[k] = u.sample(x) / r;
  }
  return ScalarField(target, std::move(v));
}

Grid image_grid(const Grid& g, double r) {
  if (!(r > 0.0)) throw PreconditionError("image_grid requires r > 0");
  return Grid(g.dim(), g.h() / r, {g.origin()[0] / r, g.origin()[1] / r}, {g.nodes(0), g.nodes(1)});
}

}  // namespace ogr
