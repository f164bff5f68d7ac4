#pragma once

// Entropy-accumulation baselines used for comparison: the original
// spot-checking key length and the block-based modified version, evaluated
// exactly as printed (including the ceiling terms), with the min-tradeoff
// crossover point optimized by grid plus golden-section refinement.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "diqkd/concentration.hpp"
#include "diqkd/entropy.hpp"

namespace diqkd {

inline constexpr double kChshMaxWin = 0.85355339059327376220;  // (2+sqrt(2))/4

struct EatBudget {
  FailureProb eps_s;
  FailureProb eps_ec;
  FailureProb eps_pa;
  FailureProb eps_ea;
  FailureProb eps_complete;

  // Equal split of the soundness error; the completeness error is a
  // separate knob (1e-2 in all comparison sweeps).
  static EatBudget original_split(double eps_sound, double eps_complete) {
    const double e = eps_sound / 4.0;
    return EatBudget{FailureProb(e), FailureProb(e), FailureProb(e), FailureProb(e),
                     FailureProb(eps_complete)};
  }
  // Modified analysis counts eps_ec twice in the soundness sum
  // (2 eps_ec + eps_pa + eps_s = eps_sound with all components equal).
  static EatBudget modified_split(double eps_sound, double eps_complete) {
    const double e = eps_sound / 4.0;
    return EatBudget{FailureProb(e), FailureProb(e), FailureProb(e), FailureProb(e),
                     FailureProb(eps_complete)};
  }
};

struct SpotCheckParams {
  double n = 0;           // rounds (modified analysis: expected rounds m * s_bar)
  double gamma = 0;       // test-round ratio
  double omega_exp = 0;   // expected CHSH winning probability
  double delta_est = 0;   // completeness confidence width
};

// g(p): certified one-round rate at per-round winning probability p (the
// test ratio gamma divides out). 0 at the classical boundary p/gamma = 3/4,
// 1 from the quantum maximum (2+sqrt(2))/4 on.
inline double eat_g(double p, double gamma) {
  const double u = p / gamma;
  if (u < 0.75) throw std::domain_error("eat_g: p/gamma below the classical bound 3/4");
  if (u > 1.0 + 1e-12) throw std::domain_error("eat_g: p/gamma above 1");
  if (u >= kChshMaxWin) return 1.0;
  const double r = std::sqrt(16.0 * u * (u - 1.0) + 3.0);
  return 1.0 - binary_entropy(0.5 + 0.5 * r);
}

// dg/dp, analytic. Validated against central finite differences in tests.
inline double eat_g_derivative(double p, double gamma) {
  const double u = p / gamma;
  if (u <= 0.75 || u >= kChshMaxWin) return 0.0;
  const double r = std::sqrt(16.0 * u * (u - 1.0) + 3.0);
  const double v = 0.5 + 0.5 * r;
  return -binary_entropy_derivative(v) * (8.0 * u - 4.0) / r / gamma;
}

// Cut-and-glue min-tradeoff: g below the crossover p_t, its tangent above.
inline double eat_min_tradeoff(double p, double p_t, double gamma) {
  if (p <= p_t) return eat_g(p, gamma);
  const double slope = eat_g_derivative(p_t, gamma);
  return slope * p + (eat_g(p_t, gamma) - slope * p_t);
}

// Shannon-limit reconciliation leakage: n [gamma h(omega_exp) + (1-gamma) f_ec h(e_b)].
inline double leak_ec(double n, double gamma, double omega_exp, double e_b,
                      double f_ec = 1.0) {
  return n * (gamma * binary_entropy(omega_exp) + (1.0 - gamma) * f_ec * binary_entropy(e_b));
}

namespace detail {

template <typename F>
double maximize_over_pt(F objective, double lo, double hi) {
  // 200-point grid, then golden-section refinement around the best cell.
  double best = -1e300, best_pt = lo;
  constexpr int kGrid = 200;
  for (int i = 1; i < kGrid; ++i) {
    const double pt = lo + (hi - lo) * i / static_cast<double>(kGrid);
    const double v = objective(pt);
    if (v > best) { best = v; best_pt = pt; }
  }
  const double step = (hi - lo) / kGrid;
  const double a = std::max(lo + 1e-15, best_pt - step);
  const double b = std::min(hi - 1e-15, best_pt + step);
  const double gr = 0.6180339887498949;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  double aa = a, bb = b;
  for (int i = 0; i < 60; ++i) {
    if (f1 > f2) { bb = x2; x2 = x1; f2 = f1; x1 = bb - gr * (bb - aa); f1 = objective(x1); }
    else { aa = x1; x1 = x2; f1 = f2; x2 = aa + gr * (bb - aa); f2 = objective(x2); }
  }
  return std::max(best, std::max(f1, f2));
}

}  // namespace detail

// Original spot-checking key length. Returns the (possibly negative) key
// balance; a nonpositive value means abort.
inline double eat_keylength_original(const SpotCheckParams& params, const EatBudget& budget,
                                     double e_b, double f_ec = 1.0) {
  const double n = params.n, gamma = params.gamma;
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::domain_error("eat_keylength_original: gamma");
  const double p_cert = params.omega_exp * gamma - params.delta_est;
  if (p_cert <= 0.75 * gamma) return -1e18;  // certified below the classical bound
  const double eps_s4 = budget.eps_s.value() / 4.0;
  const double eps_e = budget.eps_ea.value() + budget.eps_ec.value();
  const double fluct = std::sqrt(1.0 - 2.0 * std::log2(eps_s4 * eps_e));
  const double eta_opt = detail::maximize_over_pt(
      [&](double pt) {
        const double ceil_slope = std::ceil(eat_g_derivative(pt, gamma));
        return eat_min_tradeoff(p_cert, pt, gamma) -
               (2.0 / std::sqrt(n)) * (std::log2(13.0) + ceil_slope) * fluct;
      },
      0.75 * gamma, kChshMaxWin * gamma);
  return n * eta_opt - leak_ec(n, gamma, params.omega_exp, e_b, f_ec) -
         3.0 * std::log2(1.0 - std::sqrt(1.0 - eps_s4 * eps_s4)) - gamma * n -
         std::sqrt(n) * 2.0 * std::log2(7.0) * fluct + 2.0 * std::log2(budget.eps_pa.value());
}

// Block-based modified key length (blocks end at the first test or after
// s_max = ceil(1/gamma) rounds; s_bar expected rounds per block).
inline double eat_keylength_modified(const SpotCheckParams& params, const EatBudget& budget,
                                     double e_b, double f_ec = 1.0) {
  const double n = params.n, gamma = params.gamma;
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::domain_error("eat_keylength_modified: gamma");
  const double s_max = std::ceil(1.0 / gamma);
  const double blk = 1.0 - std::pow(1.0 - gamma, s_max);  // test prob per block
  const double s_bar = blk / gamma;
  const double m_blocks = n / s_bar;
  const double om = params.omega_exp, dest = params.delta_est;
  if (om + dest >= 1.0 || om - dest <= 0.5) return -1e18;
  const double p_cert = om * blk - dest;
  if (p_cert <= 0.75 * blk) return -1e18;
  const double eps_s = budget.eps_s.value();
  const double fluct = std::sqrt(1.0 - 2.0 * std::log2(eps_s));
  // log2(1 + 6*2^s_max) without overflow for large s_max
  const double log_branch =
      s_max > 50.0 ? s_max + std::log2(6.0) : std::log2(1.0 + 6.0 * std::exp2(s_max));
  const auto g_block = [&](double p) {
    const double u = p / blk;
    if (u >= kChshMaxWin) return s_bar;
    if (u <= 0.75) return 0.0;
    const double r = std::sqrt(16.0 * u * (u - 1.0) + 3.0);
    return s_bar * (1.0 - binary_entropy(0.5 + 0.5 * r));
  };
  const auto g_block_deriv = [&](double p) {
    const double u = p / blk;
    if (u <= 0.75 || u >= kChshMaxWin) return 0.0;
    const double r = std::sqrt(16.0 * u * (u - 1.0) + 3.0);
    const double v = 0.5 + 0.5 * r;
    return s_bar * (-binary_entropy_derivative(v)) * (8.0 * u - 4.0) / r / blk;
  };
  const double eta_opt = detail::maximize_over_pt(
      [&](double pt) {
        const double slope = g_block_deriv(pt);
        const double f_min = slope * p_cert + (g_block(pt) - slope * pt);
        const double nu2 = 2.0 * (log_branch + std::ceil(slope)) * fluct;
        return f_min - nu2 / std::sqrt(m_blocks);
      },
      0.75 * blk, kChshMaxWin * blk);
  const double nu1 =
      2.0 * (std::log2(7.0) + std::ceil(binary_entropy_derivative(om + dest) / blk)) * fluct;
  const double ratio = eps_s / (4.0 * (budget.eps_ea.value() + budget.eps_ec.value()));
  if (ratio >= 1.0) throw std::domain_error("eat_keylength_modified: eps_s/(4(eps_EA+eps_EC)) >= 1");
  return m_blocks * eta_opt - m_blocks * binary_entropy(om - dest) - std::sqrt(m_blocks) * nu1 -
         leak_ec(n, gamma, om, e_b, f_ec) -
         3.0 * std::log2(1.0 - std::sqrt(1.0 - ratio * ratio)) +
         2.0 * std::log2(1.0 / (2.0 * budget.eps_pa.value()));
}

}  // namespace diqkd
