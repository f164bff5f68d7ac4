#pragma once

// Single-round analytic bounds: phase-error probability as a function of
// the expected CHSH value, its regularised variant, and the dual form.

#include <cmath>
#include <stdexcept>

#include "diqkd/entropy.hpp"

namespace diqkd {

inline constexpr double kTsirelson = 2.8284271247461900976;  // 2*sqrt(2)
// Constructor guard: values within one ulp-ish of 2*sqrt(2) produced by
// downstream arithmetic (e.g. 8*(2+sqrt(2))/4 - 4) must not be rejected.
inline constexpr double kBellSlack = 1e-12;

// Expected CHSH value. Valid range on construction [0, 4]; the bound
// operations additionally reject super-quantum values above 2*sqrt(2).
class BellValue {
 public:
  explicit BellValue(double s) : s_(s) {
    if (!(s >= 0.0 && s <= 4.0)) {
      throw std::domain_error("BellValue: S outside [0, 4]");
    }
  }
  double value() const { return s_; }

 private:
  double s_;
};

// Regularisation parameter xi in (0, 1/2).
class Regularization {
 public:
  explicit Regularization(double xi) : xi_(xi) {
    if (!(xi > 0.0 && xi < 0.5)) {
      throw std::domain_error("Regularization: xi outside (0, 1/2)");
    }
  }
  double value() const { return xi_; }

 private:
  double xi_;
};

class PhaseErrorProb {
 public:
  explicit PhaseErrorProb(double v) : v_(v) {
    if (!(v >= 0.0 && v <= 0.5)) {
      throw std::domain_error("PhaseErrorProb: value outside [0, 1/2]");
    }
  }
  double value() const { return v_; }

 private:
  double v_;
};

namespace detail {
inline void require_quantum(double s) {
  if (s < 0.0 || s > kTsirelson + kBellSlack) {
    throw std::domain_error("phase error bound: S outside [0, 2*sqrt(2)]");
  }
}
}  // namespace detail

// alpha(S) = sqrt((S/2)^2 - 1) on (2, 2*sqrt(2)], 0 below. Lower bound on
// the complementary-basis correlation achievable at expected Bell value S.
inline double correlation_bound(BellValue S) {
  const double s = S.value();
  detail::require_quantum(s);
  if (s <= 2.0) return 0.0;
  const double a2 = 0.25 * s * s - 1.0;
  return std::sqrt(std::min(a2, 1.0));
}

// e_p(S) = (1 - alpha(S)) / 2; equals 1/2 for S <= 2. Both branches give
// 1/2 at S = 2, so the piecewise form is continuous there.
inline PhaseErrorProb phase_error_prob(BellValue S) {
  return PhaseErrorProb(0.5 * (1.0 - correlation_bound(S)));
}

// 1/2 - e_p(S) = alpha(S)/2, free of the cancellation that computing
// 0.5 - phase_error_prob(S) would incur near S = 2*sqrt(2)... and, more
// importantly, exact when iterated by the B-step recursion.
inline double half_minus_phase_error(BellValue S) {
  return 0.5 * correlation_bound(S);
}

// e_p^xi(S) = (e_p(S) + xi) / (1 + 2 xi); range [xi/(1+2xi), 1/2].
inline PhaseErrorProb regularized_phase_error(BellValue S, Regularization reg) {
  const double xi = reg.value();
  return PhaseErrorProb((phase_error_prob(S).value() + xi) / (1.0 + 2.0 * xi));
}

// c_xi = log2((1 + 2 xi) / xi), the martingale range of the regularised
// sample-entropy increments.
inline double c_xi(Regularization reg) {
  const double xi = reg.value();
  return std::log2((1.0 + 2.0 * xi) / xi);
}

// S*(alpha) = 2 sqrt(1 + alpha^2): largest Bell value compatible with
// complementary correlation alpha. Inverse of correlation_bound on [2, 2*sqrt(2)].
inline BellValue dual_bell_max(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::domain_error("dual_bell_max: alpha outside [0, 1]");
  }
  return BellValue(2.0 * std::sqrt(1.0 + alpha * alpha));
}

}  // namespace diqkd
