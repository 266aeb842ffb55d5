#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ogr {

enum class YoungFamily { Power, PLog, Tabulated };

std::string to_string(YoungFamily family);
YoungFamily young_family_from_string(const std::string& name);

/// A Young function G(t) = int_0^t g with g satisfying the Lieberman window
/// delta <= t g'(t) / g(t) <= g0, 1 < delta <= g0, normalized so G(1) = 1.
///
/// Three descriptors are supported:
///   - Power:     G(t) = t^p, p > 2 (delta = g0 = p - 1).
///   - PLog:      g(t) proportional to p t^(p-1) (1 + log(1 + t)) / (1 + log 2),
///                amplitude rescaled so that G(1) = 1.
///   - Tabulated: samples of g on an ascending grid, interpolated monotonically
///                in log-log coordinates and power-law extrapolated at both ends.
///
/// Values are immutable after construction; all members are safe to call
/// concurrently.
class YoungFunction {
 public:
  static YoungFunction power(double p, double quad_tol = 1e-12);
  static YoungFunction plog(double p, double quad_tol = 1e-12);
  static YoungFunction tabulated(std::vector<double> t, std::vector<double> g,
                                 double quad_tol = 1e-12);

  YoungFamily family() const noexcept { return family_; }
  /// Exponent parameter; NaN for tabulated descriptors.
  double p() const noexcept { return p_; }
  double delta() const noexcept { return delta_; }
  double g0() const noexcept { return g0_; }
  double quad_tol() const noexcept { return quad_tol_; }
  /// Factor applied to the raw descriptor so that G(1) = 1.
  double amplitude() const noexcept { return amplitude_; }
  std::span<const double> table_t() const noexcept { return table_t_; }
  /// Raw (un-normalized) g samples as supplied.
  std::span<const double> table_g() const noexcept { return table_g_raw_; }
  bool has_closed_form_derivative() const noexcept { return family_ != YoungFamily::Tabulated; }

  double g(double t) const;
  /// g'(t): closed form for Power/PLog, centered difference (step t * 1e-5) otherwise.
  double dg(double t) const;
  double G(double t) const;
  double inverse_G(double y) const;
  /// Unique a >= 0 with g(a) = y.
  double inverse_g(double y) const;
  /// Complementary function sup_{a > 0} (t a - G(a)).
  double complementary(double t) const;

 private:
  YoungFunction() = default;
  double raw_g(double t) const;
  double raw_G(double t) const;
  void finalize();

  YoungFamily family_ = YoungFamily::Power;
  double p_ = 0.0;
  double quad_tol_ = 1e-12;
  double amplitude_ = 1.0;
  double delta_ = 0.0;
  double g0_ = 0.0;

  // Tabulated representation (log-log monotone cubic Hermite).
  std::vector<double> table_t_;
  std::vector<double> table_g_raw_;
  std::vector<double> log_t_;
  std::vector<double> log_g_;
  std::vector<double> slope_;
  std::vector<double> cumulative_;  // raw int_0^{t_i} g
};

// --- Free operations -----------------------------------------------------

inline double eval_g(const YoungFunction& f, double t) { return f.g(t); }
inline double eval_G(const YoungFunction& f, double t) { return f.G(t); }
inline double inverse_G(const YoungFunction& f, double y) { return f.inverse_G(y); }
inline double complementary(const YoungFunction& f, double t) { return f.complementary(t); }

struct IndexEstimate {
  double delta_hat = 0.0;
  double g0_hat = 0.0;
};

/// inf / sup of t g'(t) / g(t) over a log-spaced sample of [t_min, t_max].
IndexEstimate lieberman_indices(const YoungFunction& f, double t_min, double t_max,
                                std::size_t samples);

struct DoublingViolation {
  std::string check;
  double t = 0.0;  // first argument (a for the split-sum check)
  double s = 0.0;  // second argument of the split-sum check, otherwise 0
  double lhs = 0.0;
  double rhs = 0.0;
};

struct DoublingReport {
  bool ok = true;
  std::size_t checked = 0;
  /// max over samples of lhs / rhs for each check (<= 1 means satisfied)
  double worst_G_doubling = 0.0;
  double worst_complementary_doubling = 0.0;
  double worst_index_sandwich = 0.0;
  double worst_split_sum = 0.0;
  std::vector<DoublingViolation> violations;
};

/// Checks G(2t) <= 2^{g0+1} G(t), G~(2t) <= 2^{1+1/delta} G~(t),
/// delta+1 <= t g(t)/G(t) <= g0+1 on a log sample of [1e-3, 1e3], and
/// G(a+b) <= 2^{g0} (G(a)+G(b)) on seeded random pairs. Relative slack 1e-9.
DoublingReport check_doubling(const YoungFunction& f, std::size_t samples,
                              std::uint64_t seed = 42);

struct Envelope {
  double lower = 0.0;
  double upper = 0.0;
};

/// Bounds for G(theta t): G(t) min/max{theta^{delta+1}, theta^{g0+1}}.
Envelope homogeneity_envelope(const YoungFunction& f, double theta, double t);
/// Bounds for G^{-1}(theta t): G^{-1}(t) min/max{theta^{1/(delta+1)}, theta^{1/(g0+1)}}.
Envelope inverse_homogeneity_envelope(const YoungFunction& f, double theta, double t);

enum class EmbeddingCase { Conjugate, Morrey, Inconclusive };

std::string to_string(EmbeddingCase c);

struct SobolevConjugateClass {
  EmbeddingCase kind = EmbeddingCase::Inconclusive;
  /// Ratio of successive dyadic tail increments of int_1^T G^{-1}(s) s^{-1-1/n} ds
  /// at the largest T examined.
  double tail_ratio = 0.0;
  /// (t, (G*)^{-1}(t)) on a dyadic grid; filled only in the Conjugate case.
  std::optional<std::vector<std::pair<double, double>>> conjugate_inverse;
  /// (delta+1)^* > g0+1, reported only when n > delta+1.
  std::optional<bool> exponent_check;
};

/// Growth test of int_1^infty G^{-1}(s) / s^{1+1/n} ds. Dimension n >= 1.
SobolevConjugateClass sobolev_conjugate_classify(const YoungFunction& f, int n);

}  // namespace ogr
