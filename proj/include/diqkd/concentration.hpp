#pragma once

// Martingale concentration bounds: Azuma deviations, Kato's inequality,
// and the closed-form optimizers for Kato's (delta, delta') pair.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace diqkd {

class FailureProb {
 public:
  explicit FailureProb(double eps) : eps_(eps) {
    if (!(eps > 0.0 && eps < 1.0)) {
      throw std::domain_error("FailureProb: epsilon outside (0, 1)");
    }
  }
  double value() const { return eps_; }

 private:
  double eps_;
};

struct KatoParams {
  double delta = 0.0;        // >= 0
  double delta_prime = 0.0;  // any real except the -3/4 singularity
};

// Per-round-normalized Azuma deviation: exceeding c*sqrt(-ln(eps)/(2n))
// per round has probability at most eps for increments of range c.
inline double azuma_deviation(std::int64_t n, double c, FailureProb eps) {
  if (n < 1) throw std::invalid_argument("azuma_deviation: n < 1");
  if (c < 0.0) throw std::invalid_argument("azuma_deviation: c < 0");
  return c * std::sqrt(-std::log(eps.value()) / (2.0 * static_cast<double>(n)));
}

// min(1, exp(-2n(delta^2 - delta'^2) / (1 + 4 delta'/3)^2)).
inline double kato_tail(std::int64_t n, const KatoParams& p) {
  if (n < 1) throw std::invalid_argument("kato_tail: n < 1");
  const double denom = 1.0 + 4.0 * p.delta_prime / 3.0;
  if (std::abs(denom) < 1e-15) {
    throw std::domain_error("kato_tail: delta' at the -3/4 singularity");
  }
  const double expo = -2.0 * static_cast<double>(n) *
                      (p.delta * p.delta - p.delta_prime * p.delta_prime) / (denom * denom);
  return std::min(1.0, std::exp(expo));
}

// delta such that kato_tail(n, {delta, delta'}) == eps:
//   delta = sqrt(delta'^2 - ln(eps) (1 + 4 delta'/3)^2 / (2n)).
inline KatoParams solve_kato_delta(std::int64_t n, FailureProb eps, double delta_prime) {
  if (n < 1) throw std::invalid_argument("solve_kato_delta: n < 1");
  const double denom = 1.0 + 4.0 * delta_prime / 3.0;
  if (std::abs(denom) < 1e-15) {
    throw std::domain_error("solve_kato_delta: delta' at the -3/4 singularity");
  }
  const double d2 = delta_prime * delta_prime -
                    std::log(eps.value()) * denom * denom / (2.0 * static_cast<double>(n));
  return KatoParams{std::sqrt(d2), delta_prime};
}

namespace detail {

// The singularity at delta' = -3/4 is excluded with margin 1e-2; negative
// delta' is allowed and occasionally optimal.
inline constexpr double kDeltaPrimeLo = -0.74;
inline constexpr double kDeltaPrimeHi = 1.0;

inline double upper_objective(std::int64_t n, FailureProb eps, double x, double dp) {
  const KatoParams p = solve_kato_delta(n, eps, dp);
  return (1.0 + 2.0 * dp) * x - p.delta - dp;
}

inline double lower_objective(std::int64_t n, FailureProb eps, double chi, double dp) {
  const KatoParams p = solve_kato_delta(n, eps, dp);
  return (chi + p.delta + dp) / (1.0 + 2.0 * dp);
}

// Candidate delta' values for the grid oracles: a linear sweep plus
// log-spaced points of both signs to resolve the near-zero optimum.
inline std::vector<double> delta_prime_grid(int n_linear, int n_log) {
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(n_linear + 2 * n_log));
  for (int i = 0; i < n_linear; ++i) {
    g.push_back(kDeltaPrimeLo + (kDeltaPrimeHi - kDeltaPrimeLo) * (i + 1) /
                                    static_cast<double>(n_linear));
  }
  for (int i = 0; i < n_log; ++i) {
    const double mag = std::pow(10.0, -12.0 + 12.0 * i / static_cast<double>(n_log - 1));
    g.push_back(mag);
    if (-mag > kDeltaPrimeLo) g.push_back(-mag);
  }
  return g;
}

template <typename F>
double golden_refine(F f, double a, double b, bool maximize, int iters = 80) {
  const double gr = 0.6180339887498949;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && b - a > 1e-14; ++i) {
    const bool pick_c = maximize ? (fc > fd) : (fc < fd);
    if (pick_c) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

// Grid-search oracles for the Kato parameter optimization: 400 linear plus
// 400 log-spaced delta' candidates on (-0.74, 1], delta solved from the
// tail constraint, followed by a local golden-section refinement.
inline KatoParams optimize_kato_upper_grid(std::int64_t n, FailureProb eps, double x_tilde) {
  double best_dp = 0.0, best = -1e300;
  for (double dp : detail::delta_prime_grid(400, 200)) {
    const double obj = detail::upper_objective(n, eps, x_tilde, dp);
    if (obj > best) { best = obj; best_dp = dp; }
  }
  const double lo = std::max(detail::kDeltaPrimeLo + 1e-9, best_dp - 0.01);
  const double hi = std::min(detail::kDeltaPrimeHi, best_dp + 0.01);
  const double dp = detail::golden_refine(
      [&](double d) { return detail::upper_objective(n, eps, x_tilde, d); }, lo, hi, true);
  return solve_kato_delta(n, eps,
                          detail::upper_objective(n, eps, x_tilde, dp) > best ? dp : best_dp);
}

inline KatoParams optimize_kato_lower_grid(std::int64_t n, FailureProb eps, double chi_tilde) {
  double best_dp = 0.0, best = 1e300;
  for (double dp : detail::delta_prime_grid(400, 200)) {
    const double obj = detail::lower_objective(n, eps, chi_tilde, dp);
    if (obj < best) { best = obj; best_dp = dp; }
  }
  const double lo = std::max(detail::kDeltaPrimeLo + 1e-9, best_dp - 0.01);
  const double hi = std::min(detail::kDeltaPrimeHi, best_dp + 0.01);
  const double dp = detail::golden_refine(
      [&](double d) { return detail::lower_objective(n, eps, chi_tilde, d); }, lo, hi, false);
  return solve_kato_delta(n, eps,
                          detail::lower_objective(n, eps, chi_tilde, dp) < best ? dp : best_dp);
}

// Closed-form maximizer of (1 + 2 delta') x~ - delta - delta' subject to the
// Kato tail constraint. The quadratic in the closed form has two roots; the
// printed radical sign is the optimum only on one side of x~ = 1/2, so both
// roots are evaluated and the better one kept. Falls back to the grid when
// the expression degenerates.
inline KatoParams optimize_kato_upper(std::int64_t n, FailureProb eps, double x_tilde) {
  if (!(x_tilde >= 0.0 && x_tilde <= 1.0)) {
    throw std::domain_error("optimize_kato_upper: x_tilde outside [0, 1]");
  }
  const double t = std::log(eps.value()) / static_cast<double>(n);
  const double x = x_tilde;
  const double rad = 2 * t * t - 9 * t * x - 8 * t * t * x + 45 * t * x * x +
                     8 * t * t * x * x - 72 * t * x * x * x + 36 * t * x * x * x * x;
  const double den = 4 * (-18 * t + 16 * t * t + 81 * x - 72 * t * x - 81 * x * x +
                          72 * t * x * x);
  if (!(rad >= 0.0) || std::abs(den) < 1e-12) {
    return optimize_kato_upper_grid(n, eps, x_tilde);
  }
  const double root = 9.0 * std::sqrt(2.0) * std::sqrt(rad);
  std::optional<double> best_dp;
  double best = -1e300;
  for (double s : {-1.0, 1.0}) {
    const double dp = 3 * (-16 * t * t + 72 * t * x - 72 * t * x * x + s * root) / den;
    if (!(dp > detail::kDeltaPrimeLo) || !std::isfinite(dp)) continue;
    const double obj = detail::upper_objective(n, eps, x, dp);
    if (obj > best) { best = obj; best_dp = dp; }
  }
  if (!best_dp) return optimize_kato_upper_grid(n, eps, x_tilde);
  return solve_kato_delta(n, eps, *best_dp);
}

// Closed-form minimizer of (chi~ + delta + delta') / (1 + 2 delta'), same
// two-root treatment.
inline KatoParams optimize_kato_lower(std::int64_t n, FailureProb eps, double chi_tilde) {
  if (!(chi_tilde >= 0.0 && chi_tilde <= 1.0)) {
    throw std::domain_error("optimize_kato_lower: chi_tilde outside [0, 1]");
  }
  const double t = std::log(eps.value()) / static_cast<double>(n);
  const double c = chi_tilde;
  const double rad = t * t - 18 * t * c - 4 * t * t * c + 90 * t * c * c +
                     4 * t * t * c * c - 144 * t * c * c * c + 72 * t * c * c * c * c;
  const double den = 4 * (36 * t + 4 * t * t + 81 * c - 72 * t * c - 81 * c * c +
                          72 * t * c * c);
  if (!(rad >= 0.0) || std::abs(den) < 1e-12) {
    return optimize_kato_lower_grid(n, eps, chi_tilde);
  }
  const double root = 9.0 * std::sqrt(rad);
  std::optional<double> best_dp;
  double best = 1e300;
  for (double s : {-1.0, 1.0}) {
    const double dp = 3 * (-27 * t - 4 * t * t + 72 * t * c - 72 * t * c * c + s * root) / den;
    if (!(dp > detail::kDeltaPrimeLo) || !std::isfinite(dp)) continue;
    const double obj = detail::lower_objective(n, eps, c, dp);
    if (obj < best) { best = obj; best_dp = dp; }
  }
  if (!best_dp) return optimize_kato_lower_grid(n, eps, chi_tilde);
  return solve_kato_delta(n, eps, *best_dp);
}

}  // namespace diqkd
