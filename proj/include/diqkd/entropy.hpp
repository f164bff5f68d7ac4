#pragma once

// Binary entropy and friends, log base 2 throughout.

#include <cmath>
#include <stdexcept>

namespace diqkd {

inline constexpr double kLn2 = 0.6931471805599453094;

// h(x) = -x log2 x - (1-x) log2 (1-x), with h(0) = h(1) = 0.
inline double binary_entropy(double x) {
  if (x < 0.0 || x > 1.0) {
    throw std::domain_error("binary_entropy: argument outside [0, 1]");
  }
  if (x == 0.0 || x == 1.0) return 0.0;
  return (-x * std::log(x) - (1.0 - x) * std::log1p(-x)) / kLn2;
}

// h'(x) = log2((1-x)/x)
inline double binary_entropy_derivative(double x) {
  if (x <= 0.0 || x >= 1.0) {
    throw std::domain_error("binary_entropy_derivative: argument outside (0, 1)");
  }
  return std::log2((1.0 - x) / x);
}

// 1 - h(1/2 - g) without cancellation. Direct evaluation of h near 1/2
// loses all significant digits of the complement; the series
//   ln 2 - H_nats(1/2 - g) = sum_k (2g)^{2k} / (2k(2k-1))
// keeps them. Needed by the B-step iteration, where 1/2 - e_p shrinks
// doubly exponentially with the number of steps.
inline double one_minus_binary_entropy_near_half(double g) {
  if (g < 0.0 || g > 0.5) {
    throw std::domain_error("one_minus_binary_entropy_near_half: g outside [0, 1/2]");
  }
  if (g > 1e-3) return 1.0 - binary_entropy(0.5 - g);
  const double g2 = g * g;
  return (2.0 * g2 + (4.0 / 3.0) * g2 * g2 + (32.0 / 15.0) * g2 * g2 * g2) / kLn2;
}

// h(x) for x possibly denormal-small; the direct formula underflows in
// the (1-x)log(1-x) term's accuracy before x does.
inline double binary_entropy_small(double x) {
  if (x < 0.0 || x > 1.0) throw std::domain_error("binary_entropy_small: argument outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x > 1e-5) return binary_entropy(x);
  // H_nats(x) = x ln(1/x) + x - x^2/2 - x^3/6 - ...
  return (x * std::log(1.0 / x) + x - 0.5 * x * x - x * x * x / 6.0) / kLn2;
}

}  // namespace diqkd
