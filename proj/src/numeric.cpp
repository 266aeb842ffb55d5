#include "ogr/detail/numeric.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ogr/error.hpp"

namespace ogr::detail {

double solve_increasing(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double lo, double hi,
                        double rel_tol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo > 0.0 || fhi < 0.0) {
    throw NumericError("solve_increasing: root not bracketed", std::min(std::abs(flo), std::abs(fhi)));
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= rel_tol * std::max(1.0, std::abs(x))) return 0.5 * (lo + hi);
    double next = 0.5 * (lo + hi);
    if (df) {
      const double d = df(x);
      if (d > 0.0 && std::isfinite(d)) {
        const double newton = x - fx / d;
        if (newton > lo && newton < hi) next = newton;
      }
    }
    if (next == x) return x;
    x = next;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> golden_section(const std::function<double(double)>& f, double lo,
                                         double hi, double abs_tol, int max_iter) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > abs_tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  // Endpoints are included so monotone objectives report the true boundary minimum.
  std::array<std::pair<double, double>, 4> cand{{{c, fc}, {d, fd}, {lo, f(lo)}, {hi, f(hi)}}};
  return *std::min_element(cand.begin(), cand.end(),
                           [](const auto& l, const auto& r) { return l.second < r.second; });
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  LinearFit fit;
  if (n < 2) return fit;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 double* error) {
  if (a == b) {
    if (error) *error = 0.0;
    return 0.0;
  }
  // Boost compares the error of the unscaled [-1, 1] rule against a scaled
  // tolerance, which never converges on short intervals. Integrating over a
  // fixed [0, 1] image keeps both in the same units.
  rel_tol = std::max(rel_tol, 1e-14);
  const double len = b - a;
  auto mapped = [&f, a, len](double x) { return f(a + len * x) * len; };
  double err = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      mapped, 0.0, 1.0, 20, rel_tol, &err, &l1);
  l1 = std::abs(l1);
  if (error) *error = err;
  const double roundoff = 1e3 * std::numeric_limits<double>::epsilon() * l1;
  if (!std::isfinite(value) ||
      err > std::max(10.0 * rel_tol * std::max(std::abs(value), l1), roundoff)) {
    throw NumericError("adaptive quadrature did not converge", err);
  }
  return value;
}

std::span<const std::pair<double, double>> gauss_legendre16_unit() {
  static const std::array<std::pair<double, double>, 16> table = [] {
    using Rule = boost::math::quadrature::gauss<double, 16>;
    std::array<std::pair<double, double>, 16> out{};
    const auto& abscissa = Rule::abscissa();
    const auto& weights = Rule::weights();
    // Boost stores the nonnegative half of a symmetric rule.
    std::size_t k = 0;
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      const double x = abscissa[i];
      const double w = weights[i];
      out[k++] = {0.5 * (1.0 + x), 0.5 * w};
      if (x != 0.0) out[k++] = {0.5 * (1.0 - x), 0.5 * w};
    }
    return out;
  }();
  return table;
}

}  // namespace ogr::detail
