#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <utility>

namespace ogr::detail {

/// Neumaier compensated summation. Accumulation order is the call order,
/// so results are reproducible for a fixed traversal.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Root of an increasing function f on [lo, hi] with f(lo) <= 0 <= f(hi).
/// Newton steps using df are taken when they stay inside the bracket,
/// otherwise bisection. Stops when the bracket is below rel_tol * max(1, |x|).
double solve_increasing(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double lo, double hi,
                        double rel_tol = 1e-15, int max_iter = 400);

/// Minimizer of a unimodal function on [lo, hi] by golden-section search.
/// Returns (argmin, min value).
std::pair<double, double> golden_section(const std::function<double(double)>& f, double lo,
                                         double hi, double abs_tol, int max_iter = 300);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Adaptive Gauss-Kronrod (15 point) of f on [a, b]; rel_tol is clamped to
/// >= 1e-14 and `error` receives the estimate. Throws NumericError when the
/// tolerance (or the roundoff floor) is not met.
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 double* error = nullptr);

/// 16-point Gauss-Legendre nodes and weights mapped to [0, 1].
std::span<const std::pair<double, double>> gauss_legendre16_unit();

}  // namespace ogr::detail
