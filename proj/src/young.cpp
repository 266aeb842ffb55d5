#include "ogr/young.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "ogr/detail/numeric.hpp"
#include "ogr/error.hpp"

namespace ogr {

namespace {

constexpr double kLog2 = std::numbers::ln2;

// t / ((1 + t)(1 + log(1 + t))): the excess of t g'/g over p - 1 for the p-log family.
double plog_index_excess(double t) { return t / ((1.0 + t) * (1.0 + std::log1p(t))); }

double log_space(double lo, double hi, std::size_t i, std::size_t n) {
  if (n <= 1) return lo;
  const double s = static_cast<double>(i) / static_cast<double>(n - 1);
  return std::exp(std::log(lo) + s * (std::log(hi) - std::log(lo)));
}

}  // namespace

std::string to_string(YoungFamily family) {
  switch (family) {
    case YoungFamily::Power: return "power";
    case YoungFamily::PLog: return "plog";
    case YoungFamily::Tabulated: return "tabulated";
  }
  return "unknown";
}

YoungFamily young_family_from_string(const std::string& name) {
  if (name == "power") return YoungFamily::Power;
  if (name == "plog" || name == "p-log") return YoungFamily::PLog;
  if (name == "tabulated") return YoungFamily::Tabulated;
  throw ParseError("family", "unknown Young family '" + name + "'");
}

std::string to_string(EmbeddingCase c) {
  switch (c) {
    case EmbeddingCase::Conjugate: return "conjugate";
    case EmbeddingCase::Morrey: return "morrey";
    case EmbeddingCase::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

YoungFunction YoungFunction::power(double p, double quad_tol) {
  if (!(p > 2.0) || !std::isfinite(p)) {
    throw InvalidFunctionError("power family requires p > 2 (delta = p - 1 > 1), got p = " +
                               std::to_string(p));
  }
  YoungFunction f;
  f.family_ = YoungFamily::Power;
  f.p_ = p;
  f.quad_tol_ = quad_tol;
  f.delta_ = p - 1.0;
  f.g0_ = p - 1.0;
  f.finalize();
  return f;
}

YoungFunction YoungFunction::plog(double p, double quad_tol) {
  if (!(p > 2.0) || !std::isfinite(p)) {
    throw InvalidFunctionError("p-log family requires p > 2, got p = " + std::to_string(p));
  }
  YoungFunction f;
  f.family_ = YoungFamily::PLog;
  f.p_ = p;
  f.quad_tol_ = quad_tol;
  f.delta_ = p - 1.0;
  // sup_t of the excess term: coarse log scan, then golden refinement in log t.
  double best_x = 0.0;
  double best = -1.0;
  for (int i = 0; i <= 400; ++i) {
    const double x = -8.0 + 16.0 * i / 400.0;
    const double v = plog_index_excess(std::exp(x));
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  const auto [xmax, neg] = detail::golden_section(
      [](double x) { return -plog_index_excess(std::exp(x)); }, best_x - 0.05, best_x + 0.05,
      1e-12);
  f.g0_ = p - 1.0 - neg;
  (void)xmax;
  f.finalize();
  return f;
}

YoungFunction YoungFunction::tabulated(std::vector<double> t, std::vector<double> g,
                                       double quad_tol) {
  if (t.size() != g.size() || t.size() < 3) {
    throw InvalidFunctionError("tabulated family needs matching t[] and g[] with at least 3 samples");
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || !(g[i] > 0.0) || !std::isfinite(t[i]) || !std::isfinite(g[i])) {
      throw InvalidFunctionError("tabulated samples must be positive and finite");
    }
    if (i > 0 && !(t[i] > t[i - 1])) {
      throw InvalidFunctionError("tabulated t[] must be strictly ascending");
    }
    if (i > 0 && !(g[i] > g[i - 1])) {
      throw InvalidFunctionError("tabulated g[] must be strictly increasing");
    }
  }
  YoungFunction f;
  f.family_ = YoungFamily::Tabulated;
  f.p_ = std::numeric_limits<double>::quiet_NaN();
  f.quad_tol_ = quad_tol;
  f.table_t_ = std::move(t);
  f.table_g_raw_ = std::move(g);

  const std::size_t n = f.table_t_.size();
  f.log_t_.resize(n);
  f.log_g_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    f.log_t_[i] = std::log(f.table_t_[i]);
    f.log_g_[i] = std::log(f.table_g_raw_[i]);
  }
  // Fritsch-Butland slopes: monotone, and for increasing data positive.
  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    secant[i] = (f.log_g_[i + 1] - f.log_g_[i]) / (f.log_t_[i + 1] - f.log_t_[i]);
  }
  f.slope_.resize(n);
  f.slope_[0] = secant[0];
  f.slope_[n - 1] = secant[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double a = secant[i - 1];
    const double b = secant[i];
    f.slope_[i] = (a * b > 0.0) ? 2.0 * a * b / (a + b) : 0.0;
  }
  if (!(f.slope_[0] > 0.0)) {
    throw InvalidFunctionError("tabulated g must grow at the lower end (g(0) = 0)");
  }

  f.cumulative_.resize(n);
  f.cumulative_[0] = f.table_g_raw_[0] * f.table_t_[0] / (f.slope_[0] + 1.0);
  for (std::size_t i = 1; i < n; ++i) {
    f.cumulative_[i] =
        f.cumulative_[i - 1] + detail::integrate([&f](double s) { return f.raw_g(s); },
                                                 f.table_t_[i - 1], f.table_t_[i], quad_tol);
  }

  // Indices from the interpolant by centered differences over the table and
  // one decade on each side (the extrapolated tails have constant index).
  f.amplitude_ = 1.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const double a = f.table_t_.front() / 10.0;
  const double b = f.table_t_.back() * 10.0;
  for (std::size_t i = 0; i < 4000; ++i) {
    const double s = log_space(a, b, i, 4000);
    const double h = s * 1e-5;
    const double d = (f.raw_g(s + h) - f.raw_g(s - h)) / (2.0 * h);
    const double r = s * d / f.raw_g(s);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  f.delta_ = lo;
  f.g0_ = hi;
  f.finalize();
  return f;
}

void YoungFunction::finalize() {
  if (!(delta_ > 1.0) || !(g0_ >= delta_) || !std::isfinite(g0_)) {
    throw InvalidFunctionError("Lieberman window violated: need 1 < delta <= g0 < inf, got delta = " +
                               std::to_string(delta_) + ", g0 = " + std::to_string(g0_));
  }
  if (family_ != YoungFamily::Power) {
    amplitude_ = 1.0;
    const double raw_one = raw_G(1.0);
    if (!(raw_one > 0.0)) throw InvalidFunctionError("G(1) must be positive");
    amplitude_ = 1.0 / raw_one;
  }
  // Sampled structural checks: positivity, monotonicity and convexity of g.
  double prev = 0.0;
  for (std::size_t i = 0; i < 200; ++i) {
    const double t = log_space(1e-4, 1e4, i, 200);
    const double gt = g(t);
    if (!(gt > prev) || !std::isfinite(gt)) {
      throw InvalidFunctionError("g must be positive and strictly increasing on (0, inf)");
    }
    prev = gt;
    const double step = 0.01 * t;
    const double second = g(t + step) + g(t - step) - 2.0 * gt;
    if (second < -1e-9 * gt) {
      throw InvalidFunctionError("g must be convex (negative second difference at t = " +
                                 std::to_string(t) + ")");
    }
  }
}

double YoungFunction::raw_g(double t) const {
  switch (family_) {
    case YoungFamily::Power:
      return p_ * std::pow(t, p_ - 1.0);
    case YoungFamily::PLog:
      return p_ * std::pow(t, p_ - 1.0) * (1.0 + std::log1p(t)) / (1.0 + kLog2);
    case YoungFamily::Tabulated: {
      if (t <= 0.0) return 0.0;
      const double x = std::log(t);
      const std::size_t n = log_t_.size();
      if (x <= log_t_.front()) return std::exp(log_g_.front() + slope_.front() * (x - log_t_.front()));
      if (x >= log_t_.back()) return std::exp(log_g_.back() + slope_.back() * (x - log_t_.back()));
      const auto it = std::upper_bound(log_t_.begin(), log_t_.end(), x);
      const std::size_t k = static_cast<std::size_t>(it - log_t_.begin()) - 1;
      (void)n;
      const double hk = log_t_[k + 1] - log_t_[k];
      const double s = (x - log_t_[k]) / hk;
      const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
      const double h10 = s * (1 - s) * (1 - s);
      const double h01 = s * s * (3 - 2 * s);
      const double h11 = s * s * (s - 1);
      const double y = h00 * log_g_[k] + h10 * hk * slope_[k] + h01 * log_g_[k + 1] +
                       h11 * hk * slope_[k + 1];
      return std::exp(y);
    }
  }
  return 0.0;
}

double YoungFunction::raw_G(double t) const {
  switch (family_) {
    case YoungFamily::Power:
      return std::pow(t, p_);
    case YoungFamily::PLog: {
      if (t == 0.0) return 0.0;
      const double p = p_;
      const double tail = detail::integrate(
          [p](double s) { return std::pow(s, p - 1.0) * std::log1p(s); }, 0.0, t, quad_tol_);
      return p / (1.0 + kLog2) * (std::pow(t, p) / p + tail);
    }
    case YoungFamily::Tabulated: {
      if (t == 0.0) return 0.0;
      const double t0 = table_t_.front();
      if (t <= t0) {
        const double d = slope_.front();
        return table_g_raw_.front() * t0 / (d + 1.0) * std::pow(t / t0, d + 1.0);
      }
      const double tn = table_t_.back();
      if (t >= tn) {
        const double d = slope_.back();
        return cumulative_.back() +
               table_g_raw_.back() * tn / (d + 1.0) * (std::pow(t / tn, d + 1.0) - 1.0);
      }
      const auto it = std::upper_bound(table_t_.begin(), table_t_.end(), t);
      const std::size_t k = static_cast<std::size_t>(it - table_t_.begin()) - 1;
      return cumulative_[k] +
             detail::integrate([this](double s) { return raw_g(s); }, table_t_[k], t, quad_tol_);
    }
  }
  return 0.0;
}

double YoungFunction::g(double t) const {
  if (t < 0.0 || std::isnan(t)) throw DomainError("g(t) requires t >= 0");
  if (t == 0.0) return 0.0;
  return amplitude_ * raw_g(t);
}

double YoungFunction::dg(double t) const {
  if (t < 0.0 || std::isnan(t)) throw DomainError("g'(t) requires t >= 0");
  switch (family_) {
    case YoungFamily::Power:
      if (t == 0.0) return p_ > 2.0 ? 0.0 : p_ * (p_ - 1.0);
      return p_ * (p_ - 1.0) * std::pow(t, p_ - 2.0);
    case YoungFamily::PLog: {
      if (t == 0.0) return 0.0;
      const double c = amplitude_ * p_ / (1.0 + kLog2);
      return c * ((p_ - 1.0) * std::pow(t, p_ - 2.0) * (1.0 + std::log1p(t)) +
                  std::pow(t, p_ - 1.0) / (1.0 + t));
    }
    case YoungFamily::Tabulated: {
      if (t == 0.0) return 0.0;
      const double h = t * 1e-5;
      return (g(t + h) - g(t - h)) / (2.0 * h);
    }
  }
  return 0.0;
}

double YoungFunction::G(double t) const {
  if (t < 0.0 || std::isnan(t)) throw DomainError("G(t) requires t >= 0");
  if (t == 0.0) return 0.0;
  if (std::isinf(t)) return t;
  return amplitude_ * raw_G(t);
}

double YoungFunction::inverse_G(double y) const {
  if (y < 0.0 || std::isnan(y)) throw DomainError("G^{-1}(y) requires y >= 0");
  if (y == 0.0) return 0.0;
  if (family_ == YoungFamily::Power) return std::pow(y, 1.0 / p_);
  // Bracket from t^{g0+1} <= G(t) <= t^{delta+1} on (0, 1] and the reverse on (1, inf).
  const double a = std::pow(y, 1.0 / (delta_ + 1.0));
  const double b = std::pow(y, 1.0 / (g0_ + 1.0));
  double lo = std::min(a, b);
  double hi = std::max(a, b);
  lo *= (1.0 - 1e-12);
  hi *= (1.0 + 1e-12);
  while (G(lo) > y) lo *= 0.5;
  while (G(hi) < y) hi *= 2.0;
  return detail::solve_increasing([this, y](double t) { return G(t) - y; },
                                  [this](double t) { return g(t); }, lo, hi);
}

double YoungFunction::inverse_g(double y) const {
  if (y < 0.0 || std::isnan(y)) throw DomainError("g^{-1}(y) requires y >= 0");
  if (y == 0.0) return 0.0;
  if (family_ == YoungFamily::Power) return std::pow(y / p_, 1.0 / (p_ - 1.0));
  double lo = 0.0;
  double hi = 1.0;
  while (g(hi) < y) {
    lo = hi;
    hi *= 2.0;
  }
  while (lo == 0.0 && g(hi * 0.5) > y && hi > 1e-300) hi *= 0.5;
  return detail::solve_increasing([this, y](double t) { return g(t) - y; },
                                  [this](double t) { return dg(t); }, lo, hi);
}

double YoungFunction::complementary(double t) const {
  if (t < 0.0 || std::isnan(t)) throw DomainError("complementary(t) requires t >= 0");
  if (t == 0.0) return 0.0;
  if (family_ == YoungFamily::Power) {
    // closed form (p-1) (t/p)^{p/(p-1)}
    return (p_ - 1.0) * std::pow(t / p_, p_ / (p_ - 1.0));
  }
  const double a = inverse_g(t);
  return t * a - G(a);
}

IndexEstimate lieberman_indices(const YoungFunction& f, double t_min, double t_max,
                                std::size_t samples) {
  if (!(t_min > 0.0) || !(t_max > t_min) || samples < 2) {
    throw PreconditionError("lieberman_indices requires 0 < t_min < t_max and samples >= 2");
  }
  IndexEstimate est{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = log_space(t_min, t_max, i, samples);
    const double gt = f.g(t);
    const double ratio = t * f.dg(t) / gt;
    if (!(gt > 0.0) || !std::isfinite(ratio)) {
      throw InvalidFunctionError("non-finite index ratio at t = " + std::to_string(t));
    }
    est.delta_hat = std::min(est.delta_hat, ratio);
    est.g0_hat = std::max(est.g0_hat, ratio);
  }
  return est;
}

DoublingReport check_doubling(const YoungFunction& f, std::size_t samples, std::uint64_t seed) {
  constexpr double slack = 1e-9;
  DoublingReport rep;
  const double delta = f.delta();
  const double g0 = f.g0();
  const double kG = std::pow(2.0, g0 + 1.0);
  const double kGt = std::pow(2.0, 1.0 + 1.0 / delta);
  const double kSum = std::pow(2.0, g0);

  auto record = [&rep](const char* name, double t, double s, double lhs, double rhs, double& worst) {
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    worst = std::max(worst, ratio);
    ++rep.checked;
    if (lhs > rhs * (1.0 + slack)) {
      rep.ok = false;
      rep.violations.push_back({name, t, s, lhs, rhs});
    }
  };

  for (std::size_t i = 0; i < samples; ++i) {
    const double t = log_space(1e-3, 1e3, i, samples);
    const double Gt = f.G(t);
    record("G_doubling", t, 0.0, f.G(2.0 * t), kG * Gt, rep.worst_G_doubling);
    record("complementary_doubling", t, 0.0, f.complementary(2.0 * t), kGt * f.complementary(t),
           rep.worst_complementary_doubling);
    const double index = t * f.g(t) / Gt;
    record("index_lower", t, 0.0, delta + 1.0, index, rep.worst_index_sandwich);
    record("index_upper", t, 0.0, index, g0 + 1.0, rep.worst_index_sandwich);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(std::log(1e-3), std::log(1e3));
  for (std::size_t i = 0; i < samples; ++i) {
    const double a = std::exp(unif(rng));
    const double b = std::exp(unif(rng));
    record("split_sum", a, b, f.G(a + b), kSum * (f.G(a) + f.G(b)), rep.worst_split_sum);
  }
  return rep;
}

Envelope homogeneity_envelope(const YoungFunction& f, double theta, double t) {
  if (theta < 0.0 || t < 0.0) throw DomainError("homogeneity_envelope requires theta, t >= 0");
  const double a = std::pow(theta, f.delta() + 1.0);
  const double b = std::pow(theta, f.g0() + 1.0);
  const double Gt = f.G(t);
  return {Gt * std::min(a, b), Gt * std::max(a, b)};
}

Envelope inverse_homogeneity_envelope(const YoungFunction& f, double theta, double t) {
  if (theta < 0.0 || t < 0.0) throw DomainError("inverse_homogeneity_envelope requires theta, t >= 0");
  const double a = std::pow(theta, 1.0 / (f.delta() + 1.0));
  const double b = std::pow(theta, 1.0 / (f.g0() + 1.0));
  const double Gi = f.inverse_G(t);
  return {Gi * std::min(a, b), Gi * std::max(a, b)};
}

SobolevConjugateClass sobolev_conjugate_classify(const YoungFunction& f, int n) {
  if (n < 1) throw PreconditionError("sobolev_conjugate_classify requires n >= 1");
  const double expo = 1.0 + 1.0 / static_cast<double>(n);
  auto integrand = [&f, expo](double s) {
    if (!(s > 0.0)) return 0.0;
    // log form avoids underflow of s^expo for the tanh-sinh abscissae near 0
    return std::exp(std::log(f.inverse_G(s)) - expo * std::log(s));
  };

  constexpr int kLevels = 64;
  constexpr int kWindow = 8;
  std::vector<double> increments;
  increments.reserve(kLevels);
  for (int k = 0; k < kLevels; ++k) {
    const double a = std::ldexp(1.0, k);
    increments.push_back(detail::integrate(integrand, a, 2.0 * a, 1e-10));
  }
  double max_ratio = 0.0;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (int k = kLevels - kWindow; k < kLevels; ++k) {
    const double r = increments[static_cast<std::size_t>(k)] / increments[static_cast<std::size_t>(k - 1)];
    max_ratio = std::max(max_ratio, r);
    min_ratio = std::min(min_ratio, r);
  }

  SobolevConjugateClass out;
  out.tail_ratio = increments[kLevels - 1] / increments[kLevels - 2];
  if (max_ratio < 0.9) {
    out.kind = EmbeddingCase::Morrey;
  } else if (min_ratio >= 1.0 - 1e-6) {
    out.kind = EmbeddingCase::Conjugate;
  } else {
    out.kind = EmbeddingCase::Inconclusive;
  }

  const double d1 = f.delta() + 1.0;
  if (static_cast<double>(n) > d1) {
    const double star = static_cast<double>(n) * d1 / (static_cast<double>(n) - d1);
    out.exponent_check = star > f.g0() + 1.0;
  }

  if (out.kind == EmbeddingCase::Conjugate) {
    // (G*)^{-1}(t) = int_0^t G^{-1}(s) s^{-1-1/n} ds; the integrand is integrably
    // singular at 0 exactly in this case, which tanh-sinh handles.
    boost::math::quadrature::tanh_sinh<double> ts;
    std::vector<std::pair<double, double>> table;
    const double start = std::ldexp(1.0, -20);
    double acc = ts.integrate(integrand, 0.0, start);
    table.emplace_back(start, acc);
    for (int j = -20; j < 20; ++j) {
      const double a = std::ldexp(1.0, j);
      acc += detail::integrate(integrand, a, 2.0 * a, 1e-10);
      table.emplace_back(2.0 * a, acc);
    }
    out.conjugate_inverse = std::move(table);
  }
  return out;
}

}  // namespace ogr
